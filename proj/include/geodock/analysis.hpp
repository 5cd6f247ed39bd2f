// Copyright 2026 The GeoDock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <vector>

#include "geodock/error.hpp"
#include "geodock/geometry.hpp"
#include "geodock/kernel.hpp"
#include "geodock/molecule.hpp"

namespace geodock {

/// Overlap score and bump feasibility of a fragment across the full integer
/// rotation space, measured from a fixed reference pose.
struct RotationProfile {
  double relative_size = 0.0;
  std::array<double, 360> scores{};  // meaningful only where valid
  std::array<bool, 360> valid{};
};

struct Peak {
  int start_angle = 0;        // first angle of the run (circular)
  int width = 0;              // degrees
  double height_ratio = 0.0;  // (peak max - min) / delta, in [0,1]
};

struct PeakStats {
  double delta_overlap = 0.0;
  std::vector<Peak> peaks;     // ordered by start angle
  int best_peak_width = 0;     // width of the peak containing the global max
};

inline RotationProfile rotation_profile(const Pose& pose, const Ligand& ligand,
                                        const Fragment& fragment, const Pocket& pocket,
                                        const PocketIndex* index = nullptr) {
  RotationProfile profile;
  profile.relative_size = fragment.relative_size;
  Pose scratch;
  for (int angle = 0; angle < 360; ++angle) {
    const Pose* candidate;
    if (angle == 0) {
      candidate = &pose;
    } else {
      rotate_fragment_into(pose, ligand, fragment, angle, scratch);
      candidate = &scratch;
    }
    profile.valid[angle] = check_bumps(*candidate, ligand, fragment);
    if (profile.valid[angle]) profile.scores[angle] = overlap_score(*candidate, pocket, index);
  }
  return profile;
}

/// Peak extraction. A peak is a maximal circularly-contiguous run of valid
/// angles whose score strictly exceeds min + delta/2. A flat profile
/// (delta == 0) has no peaks.
inline PeakStats detect_peaks(const RotationProfile& profile) {
  double vmin = 0.0, vmax = 0.0;
  bool any_valid = false;
  int max_angle = 0;
  for (int angle = 0; angle < 360; ++angle) {
    if (!profile.valid[angle]) continue;
    const double s = profile.scores[angle];
    if (!any_valid) {
      vmin = vmax = s;
      max_angle = angle;
      any_valid = true;
    } else {
      if (s < vmin) vmin = s;
      if (s > vmax) {
        vmax = s;
        max_angle = angle;
      }
    }
  }
  if (!any_valid) throw Error("detect_peaks: no feasible rotation");

  PeakStats stats;
  stats.delta_overlap = vmax - vmin;
  if (stats.delta_overlap == 0.0) return stats;  // nothing exceeds the threshold

  const double threshold = vmin + 0.5 * stats.delta_overlap;
  const auto qualifies = [&](int angle) {
    return profile.valid[angle] && profile.scores[angle] > threshold;
  };

  // Linear scan into runs; a run touching both ends of the array wraps.
  std::vector<Peak> peaks;
  int run_start = -1;
  for (int angle = 0; angle < 360; ++angle) {
    if (qualifies(angle)) {
      if (run_start < 0) run_start = angle;
    } else if (run_start >= 0) {
      double peak_max = profile.scores[run_start];
      for (int a = run_start; a < angle; ++a) peak_max = std::max(peak_max, profile.scores[a]);
      peaks.push_back({run_start, angle - run_start, (peak_max - vmin) / stats.delta_overlap});
      run_start = -1;
    }
  }
  if (run_start >= 0) {
    double peak_max = profile.scores[run_start];
    for (int a = run_start; a < 360; ++a) peak_max = std::max(peak_max, profile.scores[a]);
    Peak tail{run_start, 360 - run_start, (peak_max - vmin) / stats.delta_overlap};
    if (!peaks.empty() && peaks.front().start_angle == 0) {
      // Merge across the 359 -> 0 boundary.
      const Peak head = peaks.front();
      peaks.erase(peaks.begin());
      tail.width += head.width;
      tail.height_ratio = std::max(tail.height_ratio, head.height_ratio);
    }
    peaks.push_back(tail);
  }
  stats.peaks = std::move(peaks);

  for (const Peak& peak : stats.peaks) {
    const int offset = (max_angle - peak.start_angle + 360) % 360;
    if (offset < peak.width) {
      stats.best_peak_width = peak.width;
      break;
    }
  }
  return stats;
}

struct TileHit {
  int tile_size = 0;
  double probability = 0.0;  // fraction of fragments whose best peak is wider than the tile
  double eval_count = 0.0;   // two-phase evaluations at a 1-degree fine step
};

inline std::vector<TileHit> tile_hit_probability(const std::vector<PeakStats>& dataset,
                                                 const std::vector<int>& tile_sizes) {
  if (dataset.empty()) throw Error("tile_hit_probability: empty dataset");
  std::vector<TileHit> out;
  out.reserve(tile_sizes.size());
  for (const int tile : tile_sizes) {
    long hits = 0;
    for (const PeakStats& stats : dataset)
      if (stats.best_peak_width > tile) ++hits;
    out.push_back({tile, static_cast<double>(hits) / dataset.size(),
                   360.0 / tile + static_cast<double>(tile)});
  }
  return out;
}

/// Per-fragment summary row for the exported analysis tables.
struct FragmentProfileRow {
  std::string ligand_id;
  int rotamer_index = 0;
  Side side = Side::left;
  double relative_size = 0.0;
  double delta_overlap = 0.0;
  double delta_normalized = 0.0;  // delta / final committed score of the ligand
  int peak_count = 0;
  int best_peak_width = 0;
};

struct PeakRow {
  std::string ligand_id;
  int rotamer_index = 0;
  Side side = Side::left;
  int start_angle = 0;
  int width = 0;
  double height_ratio = 0.0;
};

struct LigandAnalysis {
  PoseResult dock;
  std::vector<FragmentProfileRow> fragments;
  std::vector<PeakRow> peaks;
  std::vector<PeakStats> stats;  // one per profiled fragment
};

/// Docks the ligand with `config`, then profiles every fragment from the
/// final committed pose. Fragments with no feasible rotation are skipped.
inline LigandAnalysis analyze_ligand(const Ligand& ligand, const Pocket& pocket,
                                     const KnobConfig& config,
                                     const PocketIndex* index = nullptr) {
  LigandAnalysis analysis;
  analysis.dock = match_probes_shape(ligand, pocket, make_initial_pose(ligand), config, index);

  const std::vector<Rotamer> rotamers = find_rotamers(ligand);
  for (int ri = 0; ri < static_cast<int>(rotamers.size()); ++ri) {
    const auto [left, right] = grow_fragments(ligand, rotamers[ri]);
    for (const Fragment* fragment : {&left, &right}) {
      const RotationProfile profile =
          rotation_profile(analysis.dock.final_pose, ligand, *fragment, pocket, index);
      PeakStats stats;
      try {
        stats = detect_peaks(profile);
      } catch (const Error&) {
        continue;  // no feasible rotation for this fragment
      }
      FragmentProfileRow row;
      row.ligand_id = ligand.id();
      row.rotamer_index = ri;
      row.side = fragment->side;
      row.relative_size = fragment->relative_size;
      row.delta_overlap = stats.delta_overlap;
      row.delta_normalized =
          analysis.dock.score > 0.0 ? stats.delta_overlap / analysis.dock.score : 0.0;
      row.peak_count = static_cast<int>(stats.peaks.size());
      row.best_peak_width = stats.best_peak_width;
      analysis.fragments.push_back(row);
      for (const Peak& peak : stats.peaks)
        analysis.peaks.push_back(
            {ligand.id(), ri, fragment->side, peak.start_angle, peak.width, peak.height_ratio});
      analysis.stats.push_back(std::move(stats));
    }
  }
  return analysis;
}

}  // namespace geodock
