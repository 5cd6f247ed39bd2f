// Copyright 2026 The GeoDock Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "geodock/analysis.hpp"
#include "support/oracles.hpp"
#include "support/test_helpers.hpp"

using namespace geodock;
using Catch::Matchers::WithinAbs;
using geodock::testing::small_dataset;

namespace {

RotationProfile constant_profile(double value) {
  RotationProfile profile;
  profile.relative_size = 0.5;
  profile.valid.fill(true);
  profile.scores.fill(value);
  return profile;
}

}  // namespace

TEST_CASE("rotation_profile: a far-away rigid pair is valid everywhere") {
  // Two-atom fragments cannot bump anything (graph distances < 4).
  std::vector<Atom> atoms = {{0, {0, 0, 0}, 1.0}, {1, {0, 0, 1.4}, 1.0}, {2, {1.2, 0, 1.4}, 1.0}};
  std::vector<Bond> bonds = {{0, 1, true}, {1, 2, false}};
  const Ligand ligand("l", std::move(atoms), std::move(bonds));
  const Pocket pocket("p", {{0, 0, 1}});
  const auto [left, right] = grow_fragments(ligand, find_rotamers(ligand)[0]);
  const Pose pose = make_initial_pose(ligand);
  const RotationProfile profile = rotation_profile(pose, ligand, right, pocket);
  for (int angle = 0; angle < 360; ++angle) CHECK(profile.valid[angle]);
  CHECK(profile.scores[0] == overlap_score(pose, pocket));
}

TEST_CASE("rotation_profile: validity matches the brute-force bump oracle") {
  const auto dataset = small_dataset(6, 1234);
  for (const Ligand& ligand : dataset.ligands) {
    const Pose pose = make_initial_pose(ligand);
    const auto rotamers = find_rotamers(ligand);
    const auto [left, right] = grow_fragments(ligand, rotamers[0]);
    const RotationProfile profile = rotation_profile(pose, ligand, left, dataset.pocket);
    int valid_count = 0;
    int oracle_count = 0;
    for (int angle = 0; angle < 360; ++angle) {
      if (profile.valid[angle]) ++valid_count;
      const Pose candidate = rotate_fragment(pose, ligand, left, angle);
      if (geodock::testing::bump_oracle(candidate, ligand, left)) ++oracle_count;
    }
    CHECK(valid_count == oracle_count);
  }
}

TEST_CASE("detect_peaks: single rectangular peak") {
  RotationProfile profile = constant_profile(0.0);
  profile.scores[2] = 1.0;
  profile.scores[3] = 1.0;
  const PeakStats stats = detect_peaks(profile);
  CHECK(stats.delta_overlap == 1.0);
  REQUIRE(stats.peaks.size() == 1);
  CHECK(stats.peaks[0].start_angle == 2);
  CHECK(stats.peaks[0].width == 2);
  CHECK(stats.peaks[0].height_ratio == 1.0);
  CHECK(stats.best_peak_width == 2);
}

TEST_CASE("detect_peaks: a flat profile has no peaks") {
  const PeakStats stats = detect_peaks(constant_profile(3.5));
  CHECK(stats.delta_overlap == 0.0);
  CHECK(stats.peaks.empty());
  CHECK(stats.best_peak_width == 0);
}

TEST_CASE("detect_peaks: runs touching 359 and 0 merge into one peak") {
  RotationProfile profile = constant_profile(0.0);
  for (const int angle : {358, 359, 0, 1}) profile.scores[angle] = 1.0;
  const PeakStats stats = detect_peaks(profile);
  REQUIRE(stats.peaks.size() == 1);
  CHECK(stats.peaks[0].start_angle == 358);
  CHECK(stats.peaks[0].width == 4);
  CHECK(stats.best_peak_width == 4);
}

TEST_CASE("detect_peaks: all-invalid profile is an error") {
  RotationProfile profile;
  profile.valid.fill(false);
  CHECK_THROWS_WITH(detect_peaks(profile), Catch::Matchers::ContainsSubstring("no feasible"));
}

TEST_CASE("detect_peaks: invariant under adding a constant") {
  const auto dataset = small_dataset(4, 88);
  for (const Ligand& ligand : dataset.ligands) {
    const auto [left, right] = grow_fragments(ligand, find_rotamers(ligand)[0]);
    RotationProfile profile =
        rotation_profile(make_initial_pose(ligand), ligand, left, dataset.pocket);
    PeakStats base;
    try {
      base = detect_peaks(profile);
    } catch (const Error&) {
      continue;
    }
    for (double& s : profile.scores) s += 17.25;
    const PeakStats shifted = detect_peaks(profile);
    CHECK_THAT(shifted.delta_overlap, WithinAbs(base.delta_overlap, 1e-9));
    REQUIRE(shifted.peaks.size() == base.peaks.size());
    for (std::size_t i = 0; i < base.peaks.size(); ++i) {
      CHECK(shifted.peaks[i].start_angle == base.peaks[i].start_angle);
      CHECK(shifted.peaks[i].width == base.peaks[i].width);
      CHECK_THAT(shifted.peaks[i].height_ratio, WithinAbs(base.peaks[i].height_ratio, 1e-9));
    }
  }
}

TEST_CASE("detect_peaks: structural invariants on synthetic profiles") {
  const auto dataset = small_dataset(8, 4096);
  int profiles_checked = 0;
  for (const Ligand& ligand : dataset.ligands) {
    for (const Rotamer& rotamer : find_rotamers(ligand)) {
      const auto [left, right] = grow_fragments(ligand, rotamer);
      for (const Fragment* fragment : {&left, &right}) {
        const RotationProfile profile =
            rotation_profile(make_initial_pose(ligand), ligand, *fragment, dataset.pocket);
        PeakStats stats;
        try {
          stats = detect_peaks(profile);
        } catch (const Error&) {
          continue;
        }
        ++profiles_checked;
        int total_width = 0;
        for (const Peak& peak : stats.peaks) {
          CHECK(peak.width >= 1);
          CHECK(peak.height_ratio >= 0.0);
          CHECK(peak.height_ratio <= 1.0);
          total_width += peak.width;
        }
        CHECK(total_width <= 360);
        if (stats.delta_overlap > 0.0) {
          // The global max lies in exactly one reported peak.
          int best_angle = -1;
          double best = 0.0;
          for (int angle = 0; angle < 360; ++angle)
            if (profile.valid[angle] && (best_angle < 0 || profile.scores[angle] > best)) {
              best_angle = angle;
              best = profile.scores[angle];
            }
          int containing = 0;
          for (const Peak& peak : stats.peaks)
            if ((best_angle - peak.start_angle + 360) % 360 < peak.width) ++containing;
          CHECK(containing == 1);
        }
      }
    }
  }
  CHECK(profiles_checked > 10);
}

TEST_CASE("tile_hit_probability: counts, evaluation model, monotonicity") {
  PeakStats wide;
  wide.best_peak_width = 68;
  const std::vector<PeakStats> dataset(10, wide);

  const auto hits = tile_hit_probability(dataset, {18, 90});
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].probability == 1.0);
  CHECK(hits[1].probability == 0.0);
  CHECK(hits[0].eval_count == 38.0);  // 360/18 + 18

  CHECK(tile_hit_probability(dataset, {}).empty());

  // Probability is non-increasing in the tile size on mixed data.
  std::vector<PeakStats> mixed;
  for (int width : {5, 20, 40, 68, 120, 200}) {
    PeakStats stats;
    stats.best_peak_width = width;
    mixed.push_back(stats);
  }
  const std::vector<int> tiles = {2, 6, 12, 18, 30, 60, 90, 180};
  const auto table = tile_hit_probability(mixed, tiles);
  for (std::size_t i = 1; i < table.size(); ++i)
    CHECK(table[i].probability <= table[i - 1].probability);
}

TEST_CASE("analyze_ligand produces consistent rows") {
  const auto dataset = small_dataset(3, 31337);
  const KnobConfig config{3, 90, 0.0, 1, false};
  for (const Ligand& ligand : dataset.ligands) {
    const LigandAnalysis analysis = analyze_ligand(ligand, dataset.pocket, config);
    CHECK(analysis.dock.score > 0.0);
    CHECK(analysis.fragments.size() == analysis.stats.size());
    for (const FragmentProfileRow& row : analysis.fragments) {
      CHECK(row.ligand_id == ligand.id());
      CHECK(row.relative_size > 0.0);
      CHECK(row.relative_size < 1.0);
      CHECK(row.delta_normalized >= 0.0);
    }
  }
}
