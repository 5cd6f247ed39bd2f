// Copyright 2026 The GeoDock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "geodock/error.hpp"
#include "geodock/geometry.hpp"
#include "geodock/molecule.hpp"

namespace geodock {

/// The five tunable knobs of the pose-optimization kernel.
struct KnobConfig {
  int high_precision_step = 1;   // degrees, divisor of 360
  int low_precision_step = 45;   // degrees, divisor of 360, >= high step
  double threshold = 0.0;        // fragments at or below this relative size get the low step
  int repetitions = 3;           // full greedy passes over all rotamers
  bool enable_refinement = false;

  void validate() const {
    if (high_precision_step < 1 || 360 % high_precision_step != 0)
      throw Error("knob config: high-precision step must be a divisor of 360");
    if (low_precision_step < 1 || 360 % low_precision_step != 0)
      throw Error("knob config: low-precision step must be a divisor of 360");
    if (low_precision_step < high_precision_step)
      throw Error("knob config: low-precision step must be >= high-precision step");
    if (!(threshold >= 0.0 && threshold <= 1.0))
      throw Error("knob config: threshold must be in [0,1]");
    if (repetitions < 1) throw Error("knob config: repetitions must be >= 1");
  }

  friend bool operator==(const KnobConfig&, const KnobConfig&) = default;
};

/// Total order over configurations used for deterministic tie-breaking.
inline bool knob_order_less(const KnobConfig& a, const KnobConfig& b) {
  return std::tie(a.high_precision_step, a.low_precision_step, a.threshold, a.repetitions,
                  a.enable_refinement) < std::tie(b.high_precision_step, b.low_precision_step,
                                                  b.threshold, b.repetitions, b.enable_refinement);
}

struct PoseResult {
  std::string ligand_id;
  double score = 0.0;
  Pose final_pose;
  long evaluations = 0;        // scored candidate poses
  long feasibility_checks = 0; // candidate poses considered
  double wall_time_seconds = 0.0;
};

/// Tile size (a divisor of 360) minimizing the two-phase evaluation count
/// 360/x + x/step. Ties go to the smaller tile. Integer arithmetic keeps the
/// comparison exact: minimizing y is minimizing y*step = step*(360/x) + x.
inline int optimal_tile_size(int high_precision_step) {
  if (high_precision_step < 1) throw Error("optimal_tile_size: step must be >= 1");
  long best_scaled = std::numeric_limits<long>::max();
  int best_tile = 360;
  for (int x = 1; x <= 360; ++x) {
    if (360 % x != 0) continue;
    const long scaled = static_cast<long>(high_precision_step) * (360 / x) + x;
    if (scaled < best_scaled) {
      best_scaled = scaled;
      best_tile = x;
    }
  }
  return best_tile;
}

struct SearchCounters {
  long evaluations = 0;
  long feasibility_checks = 0;
};

struct FragmentSearchResult {
  int best_angle = 0;
  double best_score = 0.0;
};

namespace detail {

/// Candidate handling shared by the searches. Angle 0 is the current pose:
/// it is always treated as feasible and is never rotated.
struct CandidateEvaluator {
  const Pose& entry_pose;
  const Ligand& ligand;
  const Fragment& fragment;
  const Pocket& pocket;
  const PocketIndex* index;
  SearchCounters* counters;
  Pose scratch;

  std::optional<double> evaluate(int angle) {
    if (counters != nullptr) ++counters->feasibility_checks;
    const Pose* candidate;
    if (angle == 0) {
      candidate = &entry_pose;
    } else {
      rotate_fragment_into(entry_pose, ligand, fragment, angle, scratch);
      if (!check_bumps(scratch, ligand, fragment)) return std::nullopt;
      candidate = &scratch;
    }
    if (counters != nullptr) ++counters->evaluations;
    return overlap_score(*candidate, pocket, index);
  }
};

inline void commit_angle(Pose& pose, const Ligand& ligand, const Fragment& fragment, int angle) {
  if (angle != 0) pose = rotate_fragment(pose, ligand, fragment, angle);
}

}  // namespace detail

/// Exhaustive scan of the angles {0, step, ..., 360-step} relative to the
/// current pose. Infeasible poses are skipped; angle 0 seeds the best and
/// the first-encountered angle wins ties. On return the pose is committed
/// to the best angle.
inline FragmentSearchResult optimize_fragment_flat(Pose& pose, const Ligand& ligand,
                                                   const Fragment& fragment, const Pocket& pocket,
                                                   int step, SearchCounters* counters = nullptr,
                                                   const PocketIndex* index = nullptr) {
  if (step < 1 || 360 % step != 0) throw Error("optimize_fragment_flat: step must divide 360");
  detail::CandidateEvaluator eval{pose, ligand, fragment, pocket, index, counters, {}};
  FragmentSearchResult best{0, 0.0};
  bool have_best = false;
  for (int angle = 0; angle < 360; angle += step) {
    const std::optional<double> score = eval.evaluate(angle);
    if (!score) continue;
    if (!have_best || *score > best.best_score) {
      best = {angle, *score};
      have_best = true;
    }
  }
  detail::commit_angle(pose, ligand, fragment, best.best_angle);
  return best;
}

/// Two-phase search: score the central element of each tile, then scan the
/// winning tile with the high-precision step. The unrotated pose (angle 0)
/// is kept only when strictly better than every scored candidate, so the
/// committed score never regresses. `entry_score` is the score of `pose` if
/// already known; passing it avoids one redundant evaluation.
inline FragmentSearchResult optimize_fragment_refined(
    Pose& pose, const Ligand& ligand, const Fragment& fragment, const Pocket& pocket,
    int high_precision_step, SearchCounters* counters = nullptr,
    std::optional<double> entry_score = std::nullopt, const PocketIndex* index = nullptr) {
  if (high_precision_step < 1 || 360 % high_precision_step != 0)
    throw Error("optimize_fragment_refined: step must divide 360");
  const int tile = optimal_tile_size(high_precision_step);
  const int tile_count = 360 / tile;

  detail::CandidateEvaluator eval{pose, ligand, fragment, pocket, index, counters, {}};
  FragmentSearchResult best{0, 0.0};
  bool have_best = false;
  int winning_tile = -1;
  double winning_score = 0.0;

  for (int t = 0; t < tile_count; ++t) {
    const int angle = t * tile + tile / 2;
    const std::optional<double> score = eval.evaluate(angle);
    if (!score) continue;
    if (!have_best || *score > best.best_score) {
      best = {angle, *score};
      have_best = true;
    }
    if (winning_tile < 0 || *score > winning_score) {
      winning_tile = t;
      winning_score = *score;
    }
  }

  if (winning_tile >= 0) {
    const int start = winning_tile * tile;
    for (int k = 0; (k + 1) * high_precision_step <= tile; ++k) {
      const int angle = start + k * high_precision_step;
      const std::optional<double> score = eval.evaluate(angle);
      if (!score) continue;
      if (!have_best || *score > best.best_score) {
        best = {angle, *score};
        have_best = true;
      }
    }
  }

  const double entry = entry_score ? *entry_score : overlap_score(pose, pocket, index);
  if (counters != nullptr) ++counters->feasibility_checks;
  if (!have_best || entry > best.best_score) best = {0, entry};

  detail::commit_angle(pose, ligand, fragment, best.best_angle);
  return best;
}

/// Pose-optimization kernel. Runs `repetitions` greedy passes; per rotamer
/// the left then the right fragment is optimized and the pose committed to
/// the winning angle before moving on. Fragments at or below the threshold
/// relative size use the low-precision flat scan; the rest use either the
/// refined two-phase search or a high-precision flat scan.
inline PoseResult match_probes_shape(const Ligand& ligand, const Pocket& pocket,
                                     const Pose& initial_pose, const KnobConfig& config,
                                     const PocketIndex* index = nullptr) {
  config.validate();
  if (initial_pose.positions.size() != static_cast<std::size_t>(ligand.atom_count()))
    throw Error("match_probes_shape: pose/ligand size mismatch");

  const auto start_time = std::chrono::steady_clock::now();
  SearchCounters counters;

  Pose pose = initial_pose;
  ++counters.feasibility_checks;  // the input pose counts as a candidate
  ++counters.evaluations;
  double current_score = overlap_score(pose, pocket, index);

  const std::vector<Rotamer> rotamers = find_rotamers(ligand);
  std::vector<std::pair<Fragment, Fragment>> fragments;
  fragments.reserve(rotamers.size());
  for (const Rotamer& rotamer : rotamers) fragments.push_back(grow_fragments(ligand, rotamer));

  for (int rep = 0; rep < config.repetitions; ++rep) {
    for (const auto& [left, right] : fragments) {
      for (const Fragment* fragment : {&left, &right}) {
        FragmentSearchResult result;
        if (fragment->relative_size <= config.threshold) {
          result = optimize_fragment_flat(pose, ligand, *fragment, pocket,
                                          config.low_precision_step, &counters, index);
        } else if (config.enable_refinement) {
          result = optimize_fragment_refined(pose, ligand, *fragment, pocket,
                                             config.high_precision_step, &counters, current_score,
                                             index);
        } else {
          result = optimize_fragment_flat(pose, ligand, *fragment, pocket,
                                          config.high_precision_step, &counters, index);
        }
        current_score = result.best_score;
      }
    }
  }

  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_time;
  return PoseResult{ligand.id(), current_score, std::move(pose),
                    counters.evaluations, counters.feasibility_checks, elapsed.count()};
}

}  // namespace geodock
