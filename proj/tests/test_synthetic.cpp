// Copyright 2026 The GeoDock Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "geodock/formats.hpp"
#include "geodock/synthetic.hpp"

using namespace geodock;

TEST_CASE("generate_synthetic: the same seed reproduces identical files") {
  DatasetSpec spec;
  spec.ligand_count = 30;
  spec.atom_min = 10;
  spec.atom_max = 30;
  spec.rotamer_min = 2;
  spec.rotamer_max = 6;
  spec.pocket_points = 40;
  spec.seed = 987654321;
  const auto a = generate_synthetic(spec);
  const auto b = generate_synthetic(spec);
  CHECK(render_pocket(a.pocket) == render_pocket(b.pocket));
  CHECK(render_ligands(a.ligands) == render_ligands(b.ligands));

  spec.seed = 987654322;
  const auto c = generate_synthetic(spec);
  CHECK(render_ligands(a.ligands) != render_ligands(c.ligands));
}

TEST_CASE("generate_synthetic: default library envelope is honored") {
  DatasetSpec spec;  // defaults: atoms 28..153, rotamers 2..53
  spec.ligand_count = 100;
  spec.seed = 7;
  const auto dataset = generate_synthetic(spec);
  REQUIRE(dataset.ligands.size() == 100);
  for (const Ligand& ligand : dataset.ligands) {
    CHECK(ligand.atom_count() >= 28);
    CHECK(ligand.atom_count() <= 153);
    const auto rotamers = find_rotamers(ligand);
    CHECK(rotamers.size() >= 2);
    CHECK(rotamers.size() <= 53);
  }
}

TEST_CASE("generate_synthetic: exact rotamer counts when the range is a point") {
  DatasetSpec spec;
  spec.ligand_count = 50;
  spec.rotamer_min = 5;
  spec.rotamer_max = 5;
  spec.seed = 11;
  const auto dataset = generate_synthetic(spec);
  for (const Ligand& ligand : dataset.ligands) CHECK(find_rotamers(ligand).size() == 5);
}

TEST_CASE("generate_synthetic: infeasible ranges are rejected") {
  DatasetSpec spec;
  spec.atom_min = 100;
  spec.atom_max = 120;
  spec.rotamer_min = 50;  // 51 groups of >= 3 atoms needs >= 153 atoms
  spec.rotamer_max = 60;
  CHECK_THROWS_WITH(generate_synthetic(spec), Catch::Matchers::ContainsSubstring("infeasible"));

  DatasetSpec backwards;
  backwards.atom_min = 20;
  backwards.atom_max = 10;
  CHECK_THROWS_AS(generate_synthetic(backwards), Error);
}

TEST_CASE("generate_synthetic: structural invariants hold across many seeds") {
  DatasetSpec spec;
  spec.ligand_count = 1;
  spec.atom_min = 6;
  spec.atom_max = 24;
  spec.rotamer_min = 1;
  spec.rotamer_max = 6;
  spec.pocket_points = 5;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    spec.seed = seed;
    // The Ligand constructor enforces connectivity, no duplicate bonds and
    // positive radii; generation itself must never trip it.
    const auto dataset = generate_synthetic(spec);
    REQUIRE(dataset.ligands.size() == 1);
    const Ligand& ligand = dataset.ligands[0];
    CHECK(ligand.atom_count() >= 6);
    CHECK(ligand.atom_count() <= 24);
    const auto rotamers = find_rotamers(ligand);
    CHECK(rotamers.size() >= 1);
    CHECK(rotamers.size() <= 6);
    // Bond lengths and radii stay in the documented windows.
    for (const Bond& bond : ligand.bonds()) {
      const double length =
          distance(ligand.atoms()[bond.a].position, ligand.atoms()[bond.b].position);
      CHECK(length >= 1.3);
      CHECK(length <= 1.6);
    }
    for (const Atom& atom : ligand.atoms()) {
      CHECK(atom.radius >= 1.2);
      CHECK(atom.radius <= 1.9);
    }
    for (const Vec3& point : dataset.pocket.points())
      CHECK(norm(point) <= spec.pocket_radius + 1e-12);
  }
}
