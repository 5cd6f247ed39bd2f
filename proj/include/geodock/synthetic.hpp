// Copyright 2026 The GeoDock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "geodock/error.hpp"
#include "geodock/molecule.hpp"
#include "geodock/vec3.hpp"

namespace geodock {

/// Parameters for the synthetic pocket/ligand generator. The default atom
/// and rotamer ranges match a realistic screening library envelope.
struct DatasetSpec {
  int ligand_count = 100;
  int atom_min = 28;
  int atom_max = 153;
  int rotamer_min = 2;
  int rotamer_max = 53;
  int pocket_points = 150;
  double pocket_radius = 10.0;  // Angstrom, cavity bounding sphere
  std::uint64_t seed = 1;
  std::string pocket_id = "P0";
};

struct SyntheticDataset {
  Pocket pocket;
  std::vector<Ligand> ligands;
};

namespace detail {

/// Thin wrapper over mt19937_64 with portable scaling helpers so identical
/// seeds give bit-identical datasets on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  Vec3 unit_vector() {
    const double z = uniform(-1.0, 1.0);
    const double phi = uniform(0.0, 2.0 * 3.14159265358979323846);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace detail

/// Deterministic synthetic data: ligands are random trees of rigid 3-6 atom
/// groups joined by rotatable bonds (so the rotamer count is exact), the
/// pocket is a point cloud sampled inside a bounded cavity sphere.
inline SyntheticDataset generate_synthetic(const DatasetSpec& spec) {
  if (spec.ligand_count < 0) throw Error("infeasible dataset spec: negative ligand count");
  if (spec.atom_min < 2 || spec.atom_min > spec.atom_max)
    throw Error("infeasible dataset spec: bad atom range");
  if (spec.rotamer_min < 0 || spec.rotamer_min > spec.rotamer_max)
    throw Error("infeasible dataset spec: bad rotamer range");
  if (spec.pocket_points < 1 || !(spec.pocket_radius > 0.0))
    throw Error("infeasible dataset spec: bad pocket parameters");

  // A ligand with R rotamers is R+1 rigid groups of 3..6 atoms.
  const int group_lo = (spec.atom_min + 5) / 6;  // ceil(atom_min / 6)
  const int group_hi = spec.atom_max / 3;
  const int rot_lo = std::max(spec.rotamer_min, group_lo - 1);
  const int rot_hi = std::min(spec.rotamer_max, group_hi - 1);
  if (rot_lo > rot_hi)
    throw Error("infeasible dataset spec: rotamer range incompatible with atom range");

  detail::Rng rng(spec.seed);

  std::vector<Vec3> points;
  points.reserve(spec.pocket_points);
  for (int i = 0; i < spec.pocket_points; ++i) {
    const double r = spec.pocket_radius * std::cbrt(rng.uniform());
    points.push_back(rng.unit_vector() * r);
  }
  Pocket pocket(spec.pocket_id, std::move(points));

  std::vector<Ligand> ligands;
  ligands.reserve(spec.ligand_count);
  for (int li = 0; li < spec.ligand_count; ++li) {
    const int rotamers = rng.uniform_int(rot_lo, rot_hi);
    const int groups = rotamers + 1;
    const int atom_count =
        rng.uniform_int(std::max(spec.atom_min, 3 * groups), std::min(spec.atom_max, 6 * groups));

    std::vector<int> group_size(groups, 3);
    int extra = atom_count - 3 * groups;
    while (extra > 0) {
      const int g = rng.uniform_int(0, groups - 1);
      if (group_size[g] < 6) {
        ++group_size[g];
        --extra;
      }
    }
    std::vector<int> parent(groups, -1);
    for (int g = 1; g < groups; ++g) parent[g] = rng.uniform_int(0, g - 1);

    std::vector<Atom> atoms;
    atoms.reserve(atom_count);
    std::vector<Bond> bonds;
    bonds.reserve(atom_count - 1);
    std::vector<int> group_start(groups, 0);
    // The bond graph is a tree, so pairwise distances grow incrementally:
    // every new atom hangs off exactly one placed atom.
    std::vector<std::vector<int>> tree_dist;
    tree_dist.reserve(atom_count);

    // Self-avoiding placement: resample the direction until the new atom
    // clears every distant-in-graph atom (the steric rule used during
    // docking, with a little margin) or the attempt budget runs out.
    const auto place = [&](int base_atom, double radius) {
      Vec3 best_pos;
      double best_clearance = -std::numeric_limits<double>::infinity();
      for (int attempt = 0; attempt < 50; ++attempt) {
        const Vec3 pos = atoms[base_atom].position + rng.unit_vector() * rng.uniform(1.3, 1.6);
        double clearance = 1.0;
        for (std::size_t j = 0; j < atoms.size(); ++j) {
          const double d = distance(pos, atoms[j].position);
          const int graph_d = tree_dist[base_atom][j] + 1;
          const double floor_d =
              graph_d >= 4 ? 0.85 * (radius + atoms[j].radius) : 0.8;
          clearance = std::min(clearance, d - floor_d);
        }
        if (clearance > best_clearance) {
          best_clearance = clearance;
          best_pos = pos;
        }
        if (clearance >= 0.0) break;
      }
      return best_pos;
    };

    const auto push_atom = [&](int base_atom, const Vec3& position, double radius) {
      const int idx = static_cast<int>(atoms.size());
      std::vector<int> row(idx + 1, 0);
      if (base_atom >= 0)
        for (int j = 0; j < idx; ++j) row[j] = tree_dist[base_atom][j] + 1;
      for (int j = 0; j < idx; ++j) tree_dist[j].push_back(row[j]);
      tree_dist.push_back(std::move(row));
      atoms.push_back({idx, position, radius});
    };

    for (int g = 0; g < groups; ++g) {
      group_start[g] = static_cast<int>(atoms.size());
      for (int k = 0; k < group_size[g]; ++k) {
        const int idx = static_cast<int>(atoms.size());
        const double radius = rng.uniform(1.2, 1.9);
        if (idx == 0) {
          push_atom(-1, {0.0, 0.0, 0.0}, radius);
        } else if (k == 0) {
          // Group root: rotatable bond to a random atom of the parent group.
          const int p = parent[g];
          const int attach = rng.uniform_int(group_start[p], group_start[p] + group_size[p] - 1);
          push_atom(attach, place(attach, radius), radius);
          bonds.push_back({attach, idx, true});
        } else {
          push_atom(idx - 1, place(idx - 1, radius), radius);
          bonds.push_back({idx - 1, idx, false});
        }
      }
    }

    char id[16];
    std::snprintf(id, sizeof id, "L%06d", li);
    ligands.emplace_back(id, std::move(atoms), std::move(bonds));
  }
  return SyntheticDataset{std::move(pocket), std::move(ligands)};
}

}  // namespace geodock
