// Copyright 2026 The GeoDock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geodock/error.hpp"
#include "geodock/kernel.hpp"
#include "geodock/molecule.hpp"

namespace geodock {

/// Input-data summary driving the time-to-solution model.
struct DataFeatures {
  int pocket_points = 0;      // 3D points in the pocket
  double avg_atoms = 0.0;     // mean atoms per ligand
  double avg_rotamers = 0.0;  // mean rotamers per ligand
  long ligand_count = 1;      // database size

  friend bool operator==(const DataFeatures&, const DataFeatures&) = default;
};

inline constexpr int kPredictorCount = 7;

inline const std::array<std::string, kPredictorCount + 1> kPredictorNames = {
    "pocket_points",           "avg_atoms",
    "avg_rotamers",            "pocket_points*avg_atoms",
    "pocket_points*avg_rotamers", "avg_atoms*avg_rotamers",
    "pocket_points*avg_atoms*avg_rotamers", "intercept"};

/// The three base features followed by every interaction among them, in a
/// fixed order.
inline std::array<double, kPredictorCount> feature_vector(const DataFeatures& f) {
  const double pp = static_cast<double>(f.pocket_points);
  return {pp,
          f.avg_atoms,
          f.avg_rotamers,
          pp * f.avg_atoms,
          pp * f.avg_rotamers,
          f.avg_atoms * f.avg_rotamers,
          pp * f.avg_atoms * f.avg_rotamers};
}

struct Observation {
  DataFeatures features;
  double time_per_ligand_seconds = 0.0;
};

/// Per-configuration linear cost model: seconds per average ligand as a
/// function of the data features.
struct PerfModel {
  KnobConfig config;
  std::array<double, kPredictorCount> coefficients{};
  double intercept = 0.0;
  double adjusted_r2 = 0.0;
  int n_observations = 0;

  friend bool operator==(const PerfModel&, const PerfModel&) = default;
};

/// Ordinary least squares over the interaction features plus an intercept,
/// solved with a column-pivoting QR factorization.
inline PerfModel fit(const KnobConfig& config, const std::vector<Observation>& observations) {
  const int n = static_cast<int>(observations.size());
  const int p = kPredictorCount + 1;
  if (n < p + 1)
    throw Error("fit: needs at least " + std::to_string(p + 1) + " observations, got " +
                std::to_string(n));

  Eigen::MatrixXd design(n, p);
  Eigen::VectorXd target(n);
  for (int i = 0; i < n; ++i) {
    if (!(observations[i].time_per_ligand_seconds > 0.0))
      throw Error("fit: non-positive observation time");
    const auto x = feature_vector(observations[i].features);
    for (int j = 0; j < kPredictorCount; ++j) design(i, j) = x[j];
    design(i, kPredictorCount) = 1.0;
    target(i) = observations[i].time_per_ligand_seconds;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < p) {
    // The pivot order puts the dependent columns last.
    const auto& perm = qr.colsPermutation().indices();
    std::string names;
    for (int j = qr.rank(); j < p; ++j) {
      if (!names.empty()) names += ", ";
      names += kPredictorNames[perm[j]];
    }
    throw Error("fit: rank-deficient design matrix; collinear columns: " + names);
  }

  const Eigen::VectorXd solution = qr.solve(target);
  const Eigen::VectorXd residual = target - design * solution;
  const double sse = residual.squaredNorm();
  const double mean = target.mean();
  const double sst = (target.array() - mean).matrix().squaredNorm();
  double r2;
  if (sst > 0.0) {
    r2 = 1.0 - sse / sst;
  } else {
    r2 = sse <= 0.0 ? 1.0 : 0.0;  // constant target
  }

  PerfModel model;
  model.config = config;
  for (int j = 0; j < kPredictorCount; ++j) model.coefficients[j] = solution(j);
  model.intercept = solution(kPredictorCount);
  model.adjusted_r2 = 1.0 - (1.0 - r2) * (n - 1) / static_cast<double>(n - p);
  model.n_observations = n;
  return model;
}

struct Prediction {
  double seconds = 0.0;
  bool clamped = false;  // raw prediction was negative
};

/// Time-to-solution for `f.ligand_count` ligands spread over `workers`
/// homogeneous workers. Negative raw predictions clamp to zero.
inline Prediction predict(const PerfModel& model, const DataFeatures& f, int workers) {
  if (workers < 1) throw Error("predict: workers must be >= 1");
  if (f.ligand_count < 1) throw Error("predict: ligand count must be >= 1");
  const auto x = feature_vector(f);
  double per_ligand = model.intercept;
  for (int j = 0; j < kPredictorCount; ++j) per_ligand += model.coefficients[j] * x[j];
  const double raw = static_cast<double>(f.ligand_count) * per_ligand / workers;
  if (raw < 0.0) return {0.0, true};
  return {raw, false};
}

/// Features of a concrete dataset: pocket size plus per-ligand averages.
inline DataFeatures dataset_features(const Pocket& pocket, const std::vector<Ligand>& ligands) {
  DataFeatures f;
  f.pocket_points = static_cast<int>(pocket.points().size());
  f.ligand_count = static_cast<long>(ligands.size());
  if (ligands.empty()) return f;
  double atoms = 0.0, rotamers = 0.0;
  for (const Ligand& ligand : ligands) {
    atoms += ligand.atom_count();
    rotamers += static_cast<double>(find_rotamers(ligand).size());
  }
  f.avg_atoms = atoms / ligands.size();
  f.avg_rotamers = rotamers / ligands.size();
  return f;
}

}  // namespace geodock
