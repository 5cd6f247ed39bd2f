// Copyright 2026 The GeoDock Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "geodock/kernel.hpp"
#include "support/oracles.hpp"
#include "support/test_helpers.hpp"

using namespace geodock;
using Catch::Matchers::WithinAbs;
using geodock::testing::small_dataset;

namespace {

// One-rotamer ligand whose right fragment carries a probe atom, plus a
// pocket crafted so the probe's rotation profile peaks exactly at 90
// degrees (a pocket point sits on the probe's 90-degree position).
struct PeakRig {
  Ligand ligand;
  Pocket pocket;

  static PeakRig make() {
    std::vector<Atom> atoms = {{0, {0, 0, 0}, 1.0}, {1, {0, 0, 1}, 1.0}, {2, {1, 0, 1}, 1.0}};
    std::vector<Bond> bonds = {{0, 1, true}, {1, 2, false}};
    Ligand ligand("rig", std::move(atoms), std::move(bonds));
    // Probe at angle 90 about the axis 1 -> 0 (-z) lands on (0,-1,1).
    Pocket pocket("p", {{0, 0, 0}, {0, 0, 1.2}, {0, -1, 1}});
    return {std::move(ligand), std::move(pocket)};
  }
};

}  // namespace

TEST_CASE("optimal_tile_size matches the divisor argmin") {
  CHECK(optimal_tile_size(1) == 18);    // ties with 20, smaller tile wins
  CHECK(optimal_tile_size(4) == 36);    // 36 and 40 tie at y=19
  CHECK(optimal_tile_size(360) == 360); // degenerate: y = 2
  for (int step = 1; step <= 360; ++step)
    CHECK(optimal_tile_size(step) == geodock::testing::tile_size_oracle(step));
}

TEST_CASE("KnobConfig validation") {
  CHECK_NOTHROW((KnobConfig{1, 45, 0.0, 3, false}).validate());
  CHECK_THROWS_AS((KnobConfig{7, 45, 0.0, 3, false}).validate(), Error);   // 7 does not divide 360
  CHECK_THROWS_AS((KnobConfig{10, 5, 0.0, 3, false}).validate(), Error);   // lp < hp
  CHECK_THROWS_AS((KnobConfig{1, 45, 1.5, 3, false}).validate(), Error);   // threshold out of range
  CHECK_THROWS_AS((KnobConfig{1, 45, 0.0, 0, false}).validate(), Error);   // repetitions < 1
  CHECK_THROWS_AS((KnobConfig{0, 45, 0.0, 3, false}).validate(), Error);   // step < 1
}

TEST_CASE("flat search: step 360 evaluates only the current pose") {
  const auto rig = PeakRig::make();
  const auto [left, right] = grow_fragments(rig.ligand, find_rotamers(rig.ligand)[0]);
  Pose pose = make_initial_pose(rig.ligand);
  const Pose before = pose;
  SearchCounters counters;
  const auto result = optimize_fragment_flat(pose, rig.ligand, right, rig.pocket, 360, &counters);
  CHECK(result.best_angle == 0);
  CHECK(pose.positions == before.positions);
  CHECK(counters.feasibility_checks == 1);
  CHECK(counters.evaluations == 1);
}

TEST_CASE("flat search: step 90 considers exactly four candidates") {
  const auto rig = PeakRig::make();
  const auto [left, right] = grow_fragments(rig.ligand, find_rotamers(rig.ligand)[0]);
  Pose pose = make_initial_pose(rig.ligand);
  SearchCounters counters;
  optimize_fragment_flat(pose, rig.ligand, right, rig.pocket, 90, &counters);
  CHECK(counters.feasibility_checks == 4);
  CHECK(counters.evaluations <= 4);
}

TEST_CASE("flat search: a 30-degree grid finds the 90-degree peak") {
  const auto rig = PeakRig::make();
  const auto [left, right] = grow_fragments(rig.ligand, find_rotamers(rig.ligand)[0]);
  const Pose initial = make_initial_pose(rig.ligand);

  // Confirm with a one-degree brute force that the unique best angle is 90.
  int brute_best = 0;
  double brute_score = -1.0;
  for (int angle = 0; angle < 360; ++angle) {
    const Pose candidate = rotate_fragment(initial, rig.ligand, right, angle);
    if (!check_bumps(candidate, rig.ligand, right)) continue;
    const double score = overlap_score(candidate, rig.pocket);
    if (score > brute_score) {
      brute_score = score;
      brute_best = angle;
    }
  }
  REQUIRE(brute_best == 90);

  Pose pose = initial;
  const auto result = optimize_fragment_flat(pose, rig.ligand, right, rig.pocket, 30);
  CHECK(result.best_angle == 90);
}

TEST_CASE("refined search stays within the two-phase evaluation budget") {
  const auto rig = PeakRig::make();
  const auto [left, right] = grow_fragments(rig.ligand, find_rotamers(rig.ligand)[0]);
  Pose pose = make_initial_pose(rig.ligand);
  SearchCounters counters;
  const auto result =
      optimize_fragment_refined(pose, rig.ligand, right, rig.pocket, 1, &counters);
  CHECK(counters.evaluations <= 20 + 18);  // 360/18 + 18/1
  CHECK(result.best_score >= overlap_score(make_initial_pose(rig.ligand), rig.pocket));
}

TEST_CASE("refined search: a constant profile resolves to the first tile's center") {
  // A one-atom fragment sitting on the rotation axis never moves, so every
  // angle scores exactly the same; phase 1 ties break to tile 0 and the
  // scan cannot beat its center.
  std::vector<Atom> atoms = {{0, {0, 0, 0}, 1.0}, {1, {0, 0, 1}, 1.0}};
  std::vector<Bond> bonds = {{0, 1, true}};
  const Ligand ligand("axial", std::move(atoms), std::move(bonds));
  const Pocket pocket("p", {{0.5, 0, 1}});
  const auto [left, right] = grow_fragments(ligand, find_rotamers(ligand)[0]);
  Pose pose = make_initial_pose(ligand);
  const auto result = optimize_fragment_refined(pose, ligand, right, pocket, 1);
  CHECK(result.best_angle == 9);  // centre of tile [0, 18)
}

TEST_CASE("refined search captures a peak wider than the tile") {
  // Unimodal profile with the unique maximum at 99 degrees and a width well
  // past one 18-degree tile: the tiling must land on the max's tile and the
  // fine scan must then match the flat one-degree search exactly.
  std::vector<Atom> atoms = {{0, {0, 0, 0}, 1.0}, {1, {0, 0, 1}, 1.0}, {2, {1, 0, 1}, 1.0}};
  std::vector<Bond> bonds = {{0, 1, true}, {1, 2, false}};
  const Ligand ligand("rig", std::move(atoms), std::move(bonds));
  const auto [left, right] = grow_fragments(ligand, find_rotamers(ligand)[0]);
  const Pose initial = make_initial_pose(ligand);
  // Pocket point exactly on the probe's 99-degree position; the second
  // point sets the background distance that controls the peak width.
  const Vec3 probe_at_99 = rotate_fragment(initial, ligand, right, 99).positions[2];
  const Pocket pocket("p", {{0, 0, 0}, {0, 0, 1.585}, probe_at_99});

  int brute_best = 0;
  double brute_score = -1.0;
  int width = 0;
  for (int angle = 0; angle < 360; ++angle) {
    const Pose candidate = rotate_fragment(initial, ligand, right, angle);
    const double score = overlap_score(candidate, pocket);
    if (score > brute_score) {
      brute_score = score;
      brute_best = angle;
    }
  }
  for (int angle = 0; angle < 360; ++angle) {
    const Pose candidate = rotate_fragment(initial, ligand, right, angle);
    if (overlap_score(candidate, pocket) > brute_score / 2.0) ++width;
  }
  REQUIRE(brute_best == 99);
  REQUIRE(width > 18);

  Pose flat_pose = initial;
  const auto flat = optimize_fragment_flat(flat_pose, ligand, right, pocket, 1);
  Pose refined_pose = initial;
  const auto refined = optimize_fragment_refined(refined_pose, ligand, right, pocket, 1);
  CHECK(flat.best_angle == 99);
  CHECK(refined.best_angle == 99);
  CHECK(refined.best_score == flat.best_score);
  CHECK(refined_pose.positions == flat_pose.positions);
}

TEST_CASE("match_probes_shape: baseline checks 360 candidates per fragment pass") {
  const auto rig = PeakRig::make();
  const KnobConfig baseline{1, 45, 0.0, 3, false};
  const auto result =
      match_probes_shape(rig.ligand, rig.pocket, make_initial_pose(rig.ligand), baseline);
  // 1 rotamer, 2 fragments, 3 repetitions, plus the initial pose.
  CHECK(result.feasibility_checks == 1 + 3 * 2 * 360);
  CHECK(result.evaluations <= result.feasibility_checks);
}

TEST_CASE("match_probes_shape: refinement respects the per-fragment budget") {
  const auto rig = PeakRig::make();
  const KnobConfig refined{1, 45, 0.0, 1, true};
  const auto result =
      match_probes_shape(rig.ligand, rig.pocket, make_initial_pose(rig.ligand), refined);
  CHECK(result.evaluations <= 1 + 1 * 2 * 38);
}

TEST_CASE("match_probes_shape: threshold 1 sends every fragment to the low step") {
  const auto rig = PeakRig::make();
  const KnobConfig coarse{1, 90, 1.0, 1, false};
  const auto result =
      match_probes_shape(rig.ligand, rig.pocket, make_initial_pose(rig.ligand), coarse);
  // Four candidates per fragment at a 90-degree step.
  CHECK(result.feasibility_checks == 1 + 1 * 2 * 4);
}

TEST_CASE("match_probes_shape: a rigid ligand scores the input pose once") {
  std::vector<Atom> atoms = {{0, {0, 0, 0}, 1.0}, {1, {0, 0, 1.5}, 1.0}};
  std::vector<Bond> bonds = {{0, 1, false}};
  const Ligand rigid("rigid", std::move(atoms), std::move(bonds));
  const Pocket pocket("p", {{0, 0, 1}});
  const Pose initial = make_initial_pose(rigid);
  const auto result = match_probes_shape(rigid, pocket, initial, KnobConfig{});
  CHECK(result.evaluations == 1);
  CHECK(result.score == overlap_score(initial, pocket));
  CHECK(result.final_pose.positions == initial.positions);
}

TEST_CASE("match_probes_shape: deterministic, committed, and never regressing") {
  const auto dataset = small_dataset(10, 321);
  const KnobConfig config{2, 90, 0.3, 2, true};
  for (const Ligand& ligand : dataset.ligands) {
    const Pose initial = make_initial_pose(ligand);
    const auto a = match_probes_shape(ligand, dataset.pocket, initial, config);
    const auto b = match_probes_shape(ligand, dataset.pocket, initial, config);
    CHECK(a.score == b.score);  // bit-identical
    CHECK(a.final_pose.positions == b.final_pose.positions);
    CHECK(a.evaluations == b.evaluations);
    // The reported score is the score of the committed pose.
    CHECK(a.score == overlap_score(a.final_pose, dataset.pocket));
    // Greedy passes only ever improve on the input pose.
    CHECK(a.score >= overlap_score(initial, dataset.pocket));
  }
}

TEST_CASE("match_probes_shape: evaluations shrink with coarser steps, grow with repetitions") {
  const auto dataset = small_dataset(5, 555);
  for (const Ligand& ligand : dataset.ligands) {
    const Pose initial = make_initial_pose(ligand);
    long previous = -1;
    for (const int step : {1, 2, 3, 5, 10}) {
      const auto result = match_probes_shape(ligand, dataset.pocket, initial,
                                             KnobConfig{step, 90, 0.0, 1, false});
      if (previous >= 0) CHECK(result.evaluations <= previous);
      previous = result.evaluations;
    }
    const auto once = match_probes_shape(ligand, dataset.pocket, initial,
                                         KnobConfig{5, 90, 0.0, 1, false});
    const auto thrice = match_probes_shape(ligand, dataset.pocket, initial,
                                           KnobConfig{5, 90, 0.0, 3, false});
    CHECK(thrice.feasibility_checks - 1 == 3 * (once.feasibility_checks - 1));
  }
}

TEST_CASE("match_probes_shape: the baseline configuration reproduces the one-pass kernel") {
  const auto dataset = small_dataset(30, 4242);
  const KnobConfig single_pass{1, 45, 0.0, 1, false};
  for (const Ligand& ligand : dataset.ligands) {
    const Pose initial = make_initial_pose(ligand);
    const double oracle = geodock::testing::algorithm1_dock(ligand, dataset.pocket, initial);
    const auto kernel = match_probes_shape(ligand, dataset.pocket, initial, single_pass);
    CHECK(kernel.score == oracle);  // bit-for-bit
  }
}

TEST_CASE("match_probes_shape: the spatial index changes nothing") {
  const auto dataset = small_dataset(6, 9001);
  const PocketIndex index(dataset.pocket);
  const KnobConfig config{3, 45, 0.2, 1, true};
  for (const Ligand& ligand : dataset.ligands) {
    const Pose initial = make_initial_pose(ligand);
    const auto plain = match_probes_shape(ligand, dataset.pocket, initial, config);
    const auto indexed = match_probes_shape(ligand, dataset.pocket, initial, config, &index);
    CHECK(plain.score == indexed.score);
    CHECK(plain.final_pose.positions == indexed.final_pose.positions);
  }
}
