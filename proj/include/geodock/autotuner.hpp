// Copyright 2026 The GeoDock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "geodock/error.hpp"
#include "geodock/kernel.hpp"
#include "geodock/perf_model.hpp"
#include "geodock/screening.hpp"

namespace geodock {

/// One knowledge-base record: a configuration, its profiled accuracy loss,
/// and its fitted cost model.
struct ConfigProfile {
  KnobConfig config;
  double mean_degradation = 0.0;  // percent vs the baseline configuration
  PerfModel perf;

  friend bool operator==(const ConfigProfile&, const ConfigProfile&) = default;
};

struct TrainingSet {
  Pocket pocket;
  std::vector<Ligand> ligands;
};

struct KnowledgeBase {
  std::vector<ConfigProfile> profiles;
  std::vector<std::string> warnings;  // configs dropped during profiling
};

/// Profiles every configuration of the design space over the training sets:
/// screens each set, measures degradation against the baseline screen of the
/// same set, and fits the per-configuration cost model from the per-set
/// observations. The baseline must be part of the design space; configs that
/// fail to profile are dropped with a warning.
inline KnowledgeBase build_knowledge_base(const std::vector<KnobConfig>& design_space,
                                          const std::vector<TrainingSet>& training_sets,
                                          const KnobConfig& baseline, int workers) {
  if (design_space.empty()) throw Error("build_knowledge_base: empty design space");
  if (std::find(design_space.begin(), design_space.end(), baseline) == design_space.end())
    throw Error("build_knowledge_base: baseline must be part of the design space");
  if (training_sets.empty()) throw Error("build_knowledge_base: no training sets");

  std::vector<DataFeatures> features;
  features.reserve(training_sets.size());
  for (const TrainingSet& set : training_sets)
    features.push_back(dataset_features(set.pocket, set.ligands));

  // Baseline screens first: every other config is measured against them.
  std::vector<ScreeningReport> baseline_reports;
  baseline_reports.reserve(training_sets.size());
  std::vector<Observation> baseline_observations;
  for (std::size_t s = 0; s < training_sets.size(); ++s) {
    ScreeningReport report =
        screen(training_sets[s].pocket, training_sets[s].ligands, baseline, workers);
    baseline_observations.push_back(
        {features[s], report.wall_time_seconds / std::max<std::size_t>(1, report.per_ligand.size())});
    baseline_reports.push_back(std::move(report));
  }

  KnowledgeBase kb;
  for (const KnobConfig& config : design_space) {
    try {
      std::vector<Observation> observations;
      double degradation_sum = 0.0;
      if (config == baseline) {
        observations = baseline_observations;
        degradation_sum = 0.0;  // Eq. 4 against itself
      } else {
        for (std::size_t s = 0; s < training_sets.size(); ++s) {
          const ScreeningReport report =
              screen(training_sets[s].pocket, training_sets[s].ligands, config, workers);
          observations.push_back(
              {features[s],
               report.wall_time_seconds / std::max<std::size_t>(1, report.per_ligand.size())});
          degradation_sum += overlap_degradation(report, baseline_reports[s]);
        }
      }
      ConfigProfile profile;
      profile.config = config;
      profile.mean_degradation = degradation_sum / training_sets.size();
      profile.perf = fit(config, observations);
      kb.profiles.push_back(std::move(profile));
    } catch (const std::exception& e) {
      kb.warnings.push_back(std::string("config dropped: ") + e.what());
    }
  }
  if (kb.profiles.empty()) throw Error("build_knowledge_base: every configuration failed");
  return kb;
}

/// A planned screening campaign.
struct Plan {
  KnobConfig chosen;
  double predicted_seconds = 0.0;
  double expected_completion_pct = 0.0;
  double expected_degradation_pct = 0.0;
};

/// Picks the configuration with the least profiled degradation among those
/// predicted to finish within the budget (ties: faster prediction, then
/// canonical knob order). With no feasible configuration the fastest one is
/// chosen and the expected completion drops below 100%.
inline Plan select_config(const std::vector<ConfigProfile>& kb, const DataFeatures& features,
                          double budget_seconds, int workers) {
  if (kb.empty()) throw Error("select_config: empty knowledge base");

  const ConfigProfile* chosen = nullptr;
  double chosen_time = 0.0;
  bool feasible = false;
  for (const ConfigProfile& profile : kb) {
    const double t = predict(profile.perf, features, workers).seconds;
    const bool fits = t <= budget_seconds;
    if (chosen == nullptr) {
      chosen = &profile;
      chosen_time = t;
      feasible = fits;
      continue;
    }
    bool better;
    if (fits != feasible) {
      better = fits;
    } else if (fits) {
      better = std::make_tuple(profile.mean_degradation, t) <
                   std::make_tuple(chosen->mean_degradation, chosen_time) ||
               (profile.mean_degradation == chosen->mean_degradation && t == chosen_time &&
                knob_order_less(profile.config, chosen->config));
    } else {
      better = t < chosen_time ||
               (t == chosen_time && knob_order_less(profile.config, chosen->config));
    }
    if (better) {
      chosen = &profile;
      chosen_time = t;
      feasible = fits;
    }
  }

  Plan plan;
  plan.chosen = chosen->config;
  plan.predicted_seconds = chosen_time;
  plan.expected_degradation_pct = chosen->mean_degradation;
  if (feasible) {
    plan.expected_completion_pct = 100.0;
  } else {
    plan.expected_completion_pct =
        chosen_time > 0.0 ? std::clamp(100.0 * budget_seconds / chosen_time, 0.0, 100.0) : 100.0;
  }
  return plan;
}

enum class SweepVariable { database_size, budget };

struct SweepRow {
  double swept_value = 0.0;
  Plan plan;
};

/// One plan per swept value: either the database size varies under a fixed
/// budget, or the budget varies for a fixed database size.
inline std::vector<SweepRow> scenario_sweep(const std::vector<ConfigProfile>& kb,
                                            const DataFeatures& features_template, int workers,
                                            SweepVariable variable,
                                            const std::vector<double>& values,
                                            double fixed_value) {
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (const double value : values) {
    DataFeatures features = features_template;
    double budget;
    if (variable == SweepVariable::database_size) {
      features.ligand_count = static_cast<long>(std::llround(value));
      budget = fixed_value;
    } else {
      features.ligand_count = static_cast<long>(std::llround(fixed_value));
      budget = value;
    }
    rows.push_back({value, select_config(kb, features, budget, workers)});
  }
  return rows;
}

/// Indices of the non-dominated (throughput up, degradation down) points,
/// ordered by descending throughput.
inline std::vector<std::size_t> pareto_front(
    const std::vector<std::pair<double, double>>& throughput_degradation) {
  std::vector<std::size_t> order(throughput_degradation.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = throughput_degradation[a];
    const auto& pb = throughput_degradation[b];
    if (pa.first != pb.first) return pa.first > pb.first;
    return pa.second < pb.second;
  });
  std::vector<std::size_t> front;
  double best_degradation = std::numeric_limits<double>::infinity();
  for (const std::size_t i : order) {
    if (throughput_degradation[i].second < best_degradation) {
      front.push_back(i);
      best_degradation = throughput_degradation[i].second;
    }
  }
  return front;
}

}  // namespace geodock
