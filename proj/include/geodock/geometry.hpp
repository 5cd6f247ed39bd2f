// Copyright 2026 The GeoDock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "geodock/error.hpp"
#include "geodock/molecule.hpp"
#include "geodock/vec3.hpp"

namespace geodock {

/// Ligand conformation: one position per atom, indexed like Ligand::atoms().
struct Pose {
  std::vector<Vec3> positions;
};

inline Pose make_initial_pose(const Ligand& ligand) {
  Pose pose;
  pose.positions.reserve(ligand.atoms().size());
  for (const Atom& atom : ligand.atoms()) pose.positions.push_back(atom.position);
  return pose;
}

// Per-atom floor on the minimum squared distance (Angstrom^2). Keeps the
// overlap score finite when an atom sits exactly on a pocket point while
// preserving the ordering of scores.
constexpr double kMinDistanceSq = 1e-12;

// Steric clash when two atoms get closer than this fraction of the sum of
// their radii.
constexpr double kBumpScale = 0.8;

// Pairs closer than this many bonds in the graph can never bump (1-4 rule).
constexpr int kBumpGraphDistance = 4;

// Rotation axes shorter than this are degenerate.
constexpr double kMinAxisLength = 1e-9;

/// Uniform-grid accelerator for nearest-pocket-point queries. Returns minima
/// bit-identical to the brute-force scan; only the visiting order differs.
class PocketIndex {
 public:
  explicit PocketIndex(const Pocket& pocket) : points_(pocket.points()) {
    lo_ = hi_ = points_[0];
    for (const Vec3& p : points_) {
      lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y), std::min(lo_.z, p.z)};
      hi_ = {std::max(hi_.x, p.x), std::max(hi_.y, p.y), std::max(hi_.z, p.z)};
    }
    cell_ = 2.0 * max_nearest_neighbor_spacing();
    if (!(cell_ > 0.0)) cell_ = 1.0;  // all points coincide
    for (int axis = 0; axis < 3; ++axis) {
      const double extent = component(hi_, axis) - component(lo_, axis);
      dims_[axis] = std::max(1, static_cast<int>(extent / cell_) + 1);
      dims_[axis] = std::min(dims_[axis], 64);
    }
    cells_.assign(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2], {});
    for (int i = 0; i < static_cast<int>(points_.size()); ++i)
      cells_[cell_of(points_[i])].push_back(i);
  }

  /// Exact minimum squared distance from `q` to any pocket point.
  double min_distance_sq(const Vec3& q) const {
    int cx = clamp_coord(q.x, 0), cy = clamp_coord(q.y, 1), cz = clamp_coord(q.z, 2);
    double best = std::numeric_limits<double>::infinity();
    const int max_ring = std::max({dims_[0], dims_[1], dims_[2]});
    for (int ring = 0; ring <= max_ring; ++ring) {
      // Cells in Chebyshev ring r are at least (r-1) cell edges away.
      if (best < std::numeric_limits<double>::infinity() && ring >= 2) {
        const double bound = (ring - 1) * cell_;
        if (bound * bound > best) break;
      }
      scan_ring(q, cx, cy, cz, ring, best);
    }
    return best;
  }

 private:
  static double component(const Vec3& v, int axis) { return axis == 0 ? v.x : axis == 1 ? v.y : v.z; }

  double max_nearest_neighbor_spacing() const {
    if (points_.size() < 2) return 1.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      double nn = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < points_.size(); ++j)
        if (j != i) nn = std::min(nn, distance_sq(points_[i], points_[j]));
      worst = std::max(worst, nn);
    }
    return std::sqrt(worst);
  }

  int clamp_coord(double v, int axis) const {
    const int c = static_cast<int>((v - component(lo_, axis)) / cell_);
    return std::clamp(c, 0, dims_[axis] - 1);
  }

  std::size_t cell_index(int x, int y, int z) const {
    return (static_cast<std::size_t>(x) * dims_[1] + y) * dims_[2] + z;
  }

  std::size_t cell_of(const Vec3& p) const {
    return cell_index(clamp_coord(p.x, 0), clamp_coord(p.y, 1), clamp_coord(p.z, 2));
  }

  void scan_cell(const Vec3& q, int x, int y, int z, double& best) const {
    if (x < 0 || y < 0 || z < 0 || x >= dims_[0] || y >= dims_[1] || z >= dims_[2]) return;
    for (const int pi : cells_[cell_index(x, y, z)])
      best = std::min(best, distance_sq(q, points_[pi]));
  }

  void scan_ring(const Vec3& q, int cx, int cy, int cz, int ring, double& best) const {
    if (ring == 0) {
      scan_cell(q, cx, cy, cz, best);
      return;
    }
    for (int dx = -ring; dx <= ring; ++dx)
      for (int dy = -ring; dy <= ring; ++dy)
        for (int dz = -ring; dz <= ring; ++dz)
          if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) == ring)
            scan_cell(q, cx + dx, cy + dy, cz + dz, best);
  }

  std::vector<Vec3> points_;
  Vec3 lo_, hi_;
  double cell_ = 1.0;
  int dims_[3] = {1, 1, 1};
  std::vector<std::vector<int>> cells_;
};

/// Geometric fit between a pose and a pocket: atom count divided by the sum
/// over atoms of the (clamped) minimum squared distance to any pocket point.
/// Higher is better. Summation runs in atom order so results are
/// reproducible bit-for-bit.
inline double overlap_score(const Pose& pose, const Pocket& pocket,
                            const PocketIndex* index = nullptr) {
  if (pose.positions.empty()) throw Error("overlap_score: empty pose");
  double sum = 0.0;
  for (const Vec3& atom : pose.positions) {
    double min_sq;
    if (index != nullptr) {
      min_sq = index->min_distance_sq(atom);
    } else {
      min_sq = std::numeric_limits<double>::infinity();
      for (const Vec3& point : pocket.points()) min_sq = std::min(min_sq, distance_sq(atom, point));
    }
    sum += std::max(kMinDistanceSq, min_sq);
  }
  return static_cast<double>(pose.positions.size()) / sum;
}

/// Rotates the fragment's atoms by `angle_deg` (right-hand rule) about the
/// directed axis running from the fragment's own bond endpoint to the
/// opposite endpoint, writing the result into `out`. Atoms outside the
/// fragment are copied through untouched. `out` may not alias `pose`.
inline void rotate_fragment_into(const Pose& pose, const Ligand& ligand, const Fragment& fragment,
                                 double angle_deg, Pose& out) {
  if (pose.positions.size() != static_cast<std::size_t>(ligand.atom_count()))
    throw Error("rotate_fragment: pose/ligand size mismatch");
  const Vec3 origin = pose.positions[fragment.axis_atom];
  const Vec3 axis = pose.positions[fragment.anchor_atom] - origin;
  const double axis_len = norm(axis);
  if (axis_len < kMinAxisLength) throw Error("rotate_fragment: degenerate rotation axis");
  const Vec3 k = axis / axis_len;

  if (angle_deg == 0.0) {  // exact identity
    out.positions = pose.positions;
    return;
  }

  const double theta = angle_deg * (std::numbers::pi / 180.0);
  const double c = std::cos(theta);
  const double s = std::sin(theta);

  out.positions = pose.positions;
  for (const int i : fragment.atom_indices) {
    const Vec3 v = pose.positions[i] - origin;
    // Rodrigues: v' = v c + (k x v) s + k (k . v)(1 - c)
    out.positions[i] = origin + v * c + cross(k, v) * s + k * (dot(k, v) * (1.0 - c));
  }
}

inline Pose rotate_fragment(const Pose& pose, const Ligand& ligand, const Fragment& fragment,
                            double angle_deg) {
  Pose out;
  rotate_fragment_into(pose, ligand, fragment, angle_deg, out);
  return out;
}

/// Steric feasibility: false iff some cross-fragment atom pair at bond-graph
/// distance >= 4 sits closer than kBumpScale times the sum of its radii.
/// Intra-fragment pairs cannot move relative to each other under the
/// fragment rotation, so only cross-fragment pairs are examined.
inline bool check_bumps(const Pose& pose, const Ligand& ligand, const Fragment& fragment) {
  const int n = ligand.atom_count();
  const auto& atoms = ligand.atoms();
  for (const int i : fragment.atom_indices) {
    const Vec3& pi = pose.positions[i];
    const double ri = atoms[i].radius;
    for (int j = 0; j < n; ++j) {
      if (fragment.membership[j]) continue;
      if (ligand.graph_distance_capped(i, j) < kBumpGraphDistance) continue;
      const double cutoff = kBumpScale * (ri + atoms[j].radius);
      if (distance_sq(pi, pose.positions[j]) < cutoff * cutoff) return false;
    }
  }
  return true;
}

}  // namespace geodock
