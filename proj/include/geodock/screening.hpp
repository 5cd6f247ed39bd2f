// Copyright 2026 The GeoDock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "geodock/error.hpp"
#include "geodock/kernel.hpp"
#include "geodock/molecule.hpp"

namespace geodock {

struct LigandResult {
  std::string ligand_id;
  double score = 0.0;
  long evaluations = 0;
  double time_seconds = 0.0;
};

struct ScreeningReport {
  std::string pocket_id;
  KnobConfig config;
  std::vector<LigandResult> per_ligand;  // sorted by ligand_id
  std::vector<SkippedRecord> skipped;
  double throughput = 0.0;  // ligand atoms processed per second
  long total_atoms = 0;
  double wall_time_seconds = 0.0;
  double top1pct_mean = 0.0;
};

inline bool operator==(const SkippedRecord& a, const SkippedRecord& b) {
  return a.id == b.id && a.reason == b.reason;
}
inline bool operator==(const LigandResult& a, const LigandResult& b) {
  return a.ligand_id == b.ligand_id && a.score == b.score && a.evaluations == b.evaluations &&
         a.time_seconds == b.time_seconds;
}
inline bool operator==(const ScreeningReport& a, const ScreeningReport& b) {
  return a.pocket_id == b.pocket_id && a.config == b.config && a.per_ligand == b.per_ligand &&
         a.skipped == b.skipped && a.throughput == b.throughput && a.total_atoms == b.total_atoms &&
         a.wall_time_seconds == b.wall_time_seconds && a.top1pct_mean == b.top1pct_mean;
}

/// Pull-based ligand supplier. Implementations yield either a valid ligand
/// or the reason a record was rejected; nullopt ends the stream.
class LigandSource {
 public:
  virtual ~LigandSource() = default;
  virtual std::optional<std::variant<Ligand, SkippedRecord>> next() = 0;
};

class VectorLigandSource : public LigandSource {
 public:
  explicit VectorLigandSource(const std::vector<Ligand>& ligands) : ligands_(ligands) {}

  std::optional<std::variant<Ligand, SkippedRecord>> next() override {
    if (cursor_ >= ligands_.size()) return std::nullopt;
    return ligands_[cursor_++];
  }

 private:
  const std::vector<Ligand>& ligands_;
  std::size_t cursor_ = 0;
};

/// Mean score of the best ceil(N/100) entries (at least one).
inline double top1pct_mean_score(const std::vector<LigandResult>& results) {
  if (results.empty()) return 0.0;
  const std::size_t k =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.01 * results.size())));
  std::vector<double> scores;
  scores.reserve(results.size());
  for (const LigandResult& r : results) scores.push_back(r.score);
  std::partial_sort(scores.begin(), scores.begin() + k, scores.end(), std::greater<double>());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += scores[i];
  return sum / k;
}

/// Screens a ligand stream against one pocket: the calling thread acts as
/// the master feeding a bounded queue, `workers` threads pull ligands and
/// dock them independently. Per-ligand scores do not depend on the worker
/// count; results are reported in ligand-id order. A ligand that fails to
/// dock is recorded as skipped and the screen continues.
inline ScreeningReport screen(const Pocket& pocket, LigandSource& source, const KnobConfig& config,
                              int workers, const PocketIndex* index = nullptr) {
  config.validate();
  if (workers < 1) throw Error("screen: workers must be >= 1");

  const auto start_time = std::chrono::steady_clock::now();

  std::deque<Ligand> queue;
  const std::size_t capacity = static_cast<std::size_t>(workers) * 4;
  std::mutex queue_mutex;
  std::condition_variable not_empty, not_full;
  bool done = false;

  std::mutex results_mutex;
  std::vector<LigandResult> results;
  std::vector<SkippedRecord> skipped;
  long total_atoms = 0;

  auto worker = [&]() {
    for (;;) {
      std::optional<Ligand> ligand;
      {
        std::unique_lock lock(queue_mutex);
        not_empty.wait(lock, [&] { return !queue.empty() || done; });
        if (queue.empty()) return;
        ligand = std::move(queue.front());
        queue.pop_front();
      }
      not_full.notify_one();
      try {
        PoseResult result =
            match_probes_shape(*ligand, pocket, make_initial_pose(*ligand), config, index);
        std::lock_guard lock(results_mutex);
        results.push_back(
            {result.ligand_id, result.score, result.evaluations, result.wall_time_seconds});
        total_atoms += ligand->atom_count();
      } catch (const std::exception& e) {
        std::lock_guard lock(results_mutex);
        skipped.push_back({ligand->id(), e.what()});
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);

  while (auto record = source.next()) {
    if (std::holds_alternative<SkippedRecord>(*record)) {
      std::lock_guard lock(results_mutex);
      skipped.push_back(std::get<SkippedRecord>(std::move(*record)));
      continue;
    }
    std::unique_lock lock(queue_mutex);
    not_full.wait(lock, [&] { return queue.size() < capacity; });
    queue.push_back(std::get<Ligand>(std::move(*record)));
    not_empty.notify_one();
  }
  {
    std::lock_guard lock(queue_mutex);
    done = true;
  }
  not_empty.notify_all();
  for (std::thread& t : pool) t.join();

  std::sort(results.begin(), results.end(),
            [](const LigandResult& a, const LigandResult& b) { return a.ligand_id < b.ligand_id; });
  std::sort(skipped.begin(), skipped.end(),
            [](const SkippedRecord& a, const SkippedRecord& b) { return a.id < b.id; });

  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_time;
  ScreeningReport report;
  report.pocket_id = pocket.id();
  report.config = config;
  report.per_ligand = std::move(results);
  report.skipped = std::move(skipped);
  report.total_atoms = total_atoms;
  report.wall_time_seconds = elapsed.count();
  report.throughput =
      report.per_ligand.empty() ? 0.0 : static_cast<double>(total_atoms) / elapsed.count();
  report.top1pct_mean = top1pct_mean_score(report.per_ligand);
  return report;
}

inline ScreeningReport screen(const Pocket& pocket, const std::vector<Ligand>& ligands,
                              const KnobConfig& config, int workers,
                              const PocketIndex* index = nullptr) {
  VectorLigandSource source(ligands);
  return screen(pocket, source, config, workers, index);
}

/// Accuracy loss of an approximate screen relative to a baseline screen of
/// the same ligand set: (1 - approx/baseline) * 100 on the top-1% mean
/// scores. Negative when the approximation found better poses.
inline double overlap_degradation(const ScreeningReport& approx, const ScreeningReport& baseline) {
  if (baseline.top1pct_mean == 0.0) throw Error("overlap_degradation: degenerate baseline");
  return (1.0 - approx.top1pct_mean / baseline.top1pct_mean) * 100.0;
}

}  // namespace geodock
