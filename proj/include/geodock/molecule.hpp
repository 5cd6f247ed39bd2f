// Copyright 2026 The GeoDock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "geodock/error.hpp"
#include "geodock/vec3.hpp"

namespace geodock {

struct Atom {
  int index = 0;       // 0-based ordinal within the ligand
  Vec3 position;       // Angstrom
  double radius = 0.0; // Angstrom, > 0
};

struct Bond {
  int a = 0;
  int b = 0;
  bool rotatable = false;
};

/// A ligand record that could not be turned into a valid Ligand.
struct SkippedRecord {
  std::string id;
  std::string reason;
};

/// Flexible molecule: atoms plus a connected bond graph. Immutable after
/// construction; the constructor validates all structural invariants and
/// precomputes the adjacency and capped pairwise bond-graph distances used
/// by the steric checks.
class Ligand {
 public:
  // Pairwise bond-graph distances are only ever compared against this cap.
  static constexpr int kGraphDistanceCap = 4;

  Ligand(std::string id, std::vector<Atom> atoms, std::vector<Bond> bonds)
      : id_(std::move(id)), atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
    validate();
    build_adjacency();
    build_capped_distances();
  }

  const std::string& id() const { return id_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  int atom_count() const { return static_cast<int>(atoms_.size()); }

  /// Neighbors of `atom` as (neighbor index, bond index) pairs.
  const std::vector<std::pair<int, int>>& neighbors(int atom) const { return adjacency_[atom]; }

  /// Bond-graph distance between two atoms, capped at kGraphDistanceCap.
  int graph_distance_capped(int i, int j) const {
    return capped_distance_[static_cast<std::size_t>(i) * atoms_.size() + j];
  }

 private:
  void validate() const {
    const int n = static_cast<int>(atoms_.size());
    if (n < 2) throw Error("ligand '" + id_ + "': needs at least 2 atoms");
    for (int i = 0; i < n; ++i) {
      const Atom& a = atoms_[i];
      if (a.index != i)
        throw Error("ligand '" + id_ + "': atom index mismatch at position " + std::to_string(i));
      if (!(a.radius > 0.0))
        throw Error("ligand '" + id_ + "': non-positive radius on atom " + std::to_string(i));
      if (!is_finite(a.position))
        throw Error("ligand '" + id_ + "': non-finite position on atom " + std::to_string(i));
    }
    std::vector<std::pair<int, int>> seen;
    seen.reserve(bonds_.size());
    for (const Bond& b : bonds_) {
      if (b.a == b.b) throw Error("ligand '" + id_ + "': self-bond on atom " + std::to_string(b.a));
      if (b.a < 0 || b.a >= n || b.b < 0 || b.b >= n)
        throw Error("ligand '" + id_ + "': bond index out of range");
      seen.emplace_back(std::min(b.a, b.b), std::max(b.a, b.b));
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
      throw Error("ligand '" + id_ + "': duplicate bond");
  }

  void build_adjacency() {
    adjacency_.assign(atoms_.size(), {});
    for (int bi = 0; bi < static_cast<int>(bonds_.size()); ++bi) {
      adjacency_[bonds_[bi].a].emplace_back(bonds_[bi].b, bi);
      adjacency_[bonds_[bi].b].emplace_back(bonds_[bi].a, bi);
    }
    // Connectivity check via BFS from atom 0.
    std::vector<char> visited(atoms_.size(), 0);
    std::queue<int> queue;
    queue.push(0);
    visited[0] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
      const int at = queue.front();
      queue.pop();
      for (const auto& [nb, bond] : adjacency_[at]) {
        if (!visited[nb]) {
          visited[nb] = 1;
          ++reached;
          queue.push(nb);
        }
      }
    }
    if (reached != atoms_.size()) throw Error("ligand '" + id_ + "': disconnected ligand");
  }

  void build_capped_distances() {
    const std::size_t n = atoms_.size();
    capped_distance_.assign(n * n, static_cast<std::uint8_t>(kGraphDistanceCap));
    std::vector<int> dist(n);
    for (std::size_t src = 0; src < n; ++src) {
      std::fill(dist.begin(), dist.end(), -1);
      std::queue<int> queue;
      queue.push(static_cast<int>(src));
      dist[src] = 0;
      capped_distance_[src * n + src] = 0;
      while (!queue.empty()) {
        const int at = queue.front();
        queue.pop();
        if (dist[at] >= kGraphDistanceCap) continue;  // deeper pairs stay at the cap
        for (const auto& [nb, bond] : adjacency_[at]) {
          if (dist[nb] < 0) {
            dist[nb] = dist[at] + 1;
            capped_distance_[src * n + nb] = static_cast<std::uint8_t>(dist[nb]);
            queue.push(nb);
          }
        }
      }
    }
  }

  std::string id_;
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<std::pair<int, int>>> adjacency_;
  std::vector<std::uint8_t> capped_distance_;
};

/// Rigid binding site: a cloud of sphere-centre points.
class Pocket {
 public:
  Pocket(std::string id, std::vector<Vec3> points)
      : id_(std::move(id)), points_(std::move(points)) {
    if (points_.empty()) throw Error("pocket '" + id_ + "': needs at least 1 point");
    for (const Vec3& p : points_)
      if (!is_finite(p)) throw Error("pocket '" + id_ + "': non-finite point");
  }

  const std::string& id() const { return id_; }
  const std::vector<Vec3>& points() const { return points_; }

 private:
  std::string id_;
  std::vector<Vec3> points_;
};

/// A rotatable bridge bond: removing it splits the ligand in two.
struct Rotamer {
  Bond bond;
  int bond_index = 0;  // position in Ligand::bonds()
};

enum class Side { left, right };

/// One of the two connected components obtained by cutting a rotamer bond.
/// The "left" fragment contains the bond endpoint with the smaller index.
struct Fragment {
  Rotamer rotamer;
  Side side = Side::left;
  std::vector<int> atom_indices;   // ascending
  std::vector<char> membership;    // per-atom flag, size == ligand atom count
  double relative_size = 0.0;      // |atom_indices| / atom count, in (0,1)
  int axis_atom = 0;               // bond endpoint inside this fragment
  int anchor_atom = 0;             // bond endpoint on the other side
};

namespace detail {

/// Bridge detection: iterative DFS lowpoint computation.
inline std::vector<char> find_bridges(const Ligand& ligand) {
  const int n = ligand.atom_count();
  std::vector<char> is_bridge(ligand.bonds().size(), 0);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;

  struct Frame {
    int atom;
    int parent_bond;
    std::size_t next_edge;
  };
  std::vector<Frame> stack;
  for (int root = 0; root < n; ++root) {
    if (disc[root] >= 0) continue;
    stack.push_back({root, -1, 0});
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame& frame = stack.back();
      const auto& edges = ligand.neighbors(frame.atom);
      if (frame.next_edge < edges.size()) {
        const auto [nb, bond] = edges[frame.next_edge++];
        if (bond == frame.parent_bond) continue;
        if (disc[nb] >= 0) {
          low[frame.atom] = std::min(low[frame.atom], disc[nb]);
        } else {
          disc[nb] = low[nb] = timer++;
          stack.push_back({nb, bond, 0});
        }
      } else {
        const int atom = frame.atom;
        const int parent_bond = frame.parent_bond;
        stack.pop_back();
        if (!stack.empty()) {
          const int parent = stack.back().atom;
          low[parent] = std::min(low[parent], low[atom]);
          if (low[atom] > disc[parent]) is_bridge[parent_bond] = 1;
        }
      }
    }
  }
  return is_bridge;
}

}  // namespace detail

/// All rotatable bridge bonds, ordered by (min endpoint, max endpoint).
/// Rotatable bonds inside rings are not rotamers and are excluded.
inline std::vector<Rotamer> find_rotamers(const Ligand& ligand) {
  const std::vector<char> is_bridge = detail::find_bridges(ligand);
  std::vector<Rotamer> rotamers;
  for (int bi = 0; bi < static_cast<int>(ligand.bonds().size()); ++bi) {
    const Bond& bond = ligand.bonds()[bi];
    if (bond.rotatable && is_bridge[bi]) rotamers.push_back({bond, bi});
  }
  std::sort(rotamers.begin(), rotamers.end(), [](const Rotamer& x, const Rotamer& y) {
    const auto kx = std::minmax(x.bond.a, x.bond.b);
    const auto ky = std::minmax(y.bond.a, y.bond.b);
    return kx < ky;
  });
  return rotamers;
}

/// Grows the two fragments split off by a rotamer bond. The left fragment is
/// the component reachable from the smaller-indexed bond endpoint once the
/// bond is cut.
inline std::pair<Fragment, Fragment> grow_fragments(const Ligand& ligand, const Rotamer& rotamer) {
  const int n = ligand.atom_count();
  const int lo = std::min(rotamer.bond.a, rotamer.bond.b);
  const int hi = std::max(rotamer.bond.a, rotamer.bond.b);

  std::vector<char> in_left(n, 0);
  std::queue<int> queue;
  queue.push(lo);
  in_left[lo] = 1;
  while (!queue.empty()) {
    const int at = queue.front();
    queue.pop();
    for (const auto& [nb, bond] : ligand.neighbors(at)) {
      if (bond == rotamer.bond_index) continue;
      if (!in_left[nb]) {
        in_left[nb] = 1;
        queue.push(nb);
      }
    }
  }
  if (in_left[hi])
    throw Error("ligand '" + ligand.id() + "': rotamer bond " + std::to_string(rotamer.bond.a) +
                "-" + std::to_string(rotamer.bond.b) + " is not a bridge");

  Fragment left, right;
  left.rotamer = right.rotamer = rotamer;
  left.side = Side::left;
  right.side = Side::right;
  left.membership.assign(n, 0);
  right.membership.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    if (in_left[i]) {
      left.atom_indices.push_back(i);
      left.membership[i] = 1;
    } else {
      right.atom_indices.push_back(i);
      right.membership[i] = 1;
    }
  }
  left.relative_size = static_cast<double>(left.atom_indices.size()) / n;
  right.relative_size = static_cast<double>(right.atom_indices.size()) / n;
  left.axis_atom = lo;
  left.anchor_atom = hi;
  right.axis_atom = hi;
  right.anchor_atom = lo;
  return {std::move(left), std::move(right)};
}

}  // namespace geodock
