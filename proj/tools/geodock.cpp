// Copyright 2026 The GeoDock Authors
// SPDX-License-Identifier: Apache-2.0
//
// geodock: tunable geometric docking and virtual screening.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 plan request that
// cannot be completed within the budget.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geodock/analysis.hpp"
#include "geodock/autotuner.hpp"
#include "geodock/formats.hpp"
#include "geodock/kernel.hpp"
#include "geodock/perf_model.hpp"
#include "geodock/screening.hpp"
#include "geodock/synthetic.hpp"

namespace {

using namespace geodock;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

// --- shared flag groups ----------------------------------------------------

struct KnobFlags {
  int hp = 1;
  int lp = 0;  // 0: default to max(45, hp)
  double threshold = 0.0;
  int reps = 3;
  bool refine = false;

  KnobConfig to_config() const {
    KnobConfig config{hp, lp > 0 ? lp : std::max(45, hp), threshold, reps, refine};
    try {
      config.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return config;
  }
};

void add_knob_flags(CLI::App* cmd, KnobFlags& flags) {
  cmd->add_option("--hp-step", flags.hp, "high-precision rotation step, degrees (divisor of 360)");
  cmd->add_option("--lp-step", flags.lp,
                  "low-precision rotation step, degrees (default: max(45, hp-step))");
  cmd->add_option("--threshold", flags.threshold,
                  "relative fragment size at or below which the low-precision step is used");
  cmd->add_option("--reps", flags.reps, "number of optimization passes");
  cmd->add_flag("--refine", flags.refine, "enable the two-phase tile refinement");
}

struct FeatureFlags {
  int pocket_points = 0;
  double avg_atoms = 0.0;
  double avg_rotamers = 0.0;

  DataFeatures to_features(long db_size) const {
    return DataFeatures{pocket_points, avg_atoms, avg_rotamers, db_size};
  }
};

void add_feature_flags(CLI::App* cmd, FeatureFlags& flags) {
  cmd->add_option("--pocket-points", flags.pocket_points, "number of pocket points")->required();
  cmd->add_option("--avg-atoms", flags.avg_atoms, "average atoms per ligand")->required();
  cmd->add_option("--avg-rotamers", flags.avg_rotamers, "average rotamers per ligand")->required();
}

CLI::Option* add_workers_flag(CLI::App* cmd, int& workers) {
  return cmd->add_option("--workers", workers, "worker threads (env: GEODOCK_WORKERS)")
      ->envname("GEODOCK_WORKERS");
}

KnobConfig parse_config_string(const std::string& text) {
  const auto parts = detail::split_on(text, ',');
  if (parts.size() != 5)
    throw UsageError("expected '<hp>,<lp>,<threshold>,<reps>,<refine>', got '" + text + "'");
  KnobConfig config;
  config.high_precision_step = static_cast<int>(detail::parse_int_token(parts[0], 0));
  config.low_precision_step = static_cast<int>(detail::parse_int_token(parts[1], 0));
  config.threshold = detail::parse_double_token(parts[2], 0);
  config.repetitions = static_cast<int>(detail::parse_int_token(parts[3], 0));
  config.enable_refinement = detail::parse_bool_token(parts[4], 0);
  config.validate();
  return config;
}

std::string describe(const KnobConfig& c) {
  return "hp_step=" + std::to_string(c.high_precision_step) +
         "\nlp_step=" + std::to_string(c.low_precision_step) +
         "\nthreshold=" + format_double(c.threshold) +
         "\nrepetitions=" + std::to_string(c.repetitions) +
         "\nrefinement=" + (c.enable_refinement ? "1" : "0");
}

// --- subcommand runners ----------------------------------------------------

struct GenerateArgs {
  std::string out_pocket, out_ligands;
  DatasetSpec spec;
};

int run_generate(const GenerateArgs& args) {
  const SyntheticDataset dataset = generate_synthetic(args.spec);
  write_file(args.out_pocket, render_pocket(dataset.pocket));
  write_file(args.out_ligands, render_ligands(dataset.ligands));
  std::cout << "pocket_id=" << dataset.pocket.id() << "\n"
            << "pocket_points=" << dataset.pocket.points().size() << "\n"
            << "ligands=" << dataset.ligands.size() << "\n";
  return 0;
}

struct DockArgs {
  std::string pocket_path, ligands_path, ligand_id;
  KnobFlags knobs;
  bool spatial_index = false;
};

int run_dock(const DockArgs& args) {
  const KnobConfig config = args.knobs.to_config();
  const Pocket pocket = parse_pocket(read_file(args.pocket_path));
  std::ifstream in(args.ligands_path, std::ios::binary);
  if (!in) throw Error("cannot open '" + args.ligands_path + "'");
  LigandParser parser(in);
  std::optional<Ligand> target;
  while (auto record = parser.next()) {
    if (std::holds_alternative<SkippedRecord>(*record)) {
      const auto& skip = std::get<SkippedRecord>(*record);
      if (args.ligand_id.empty() || skip.id == args.ligand_id)
        throw Error("ligand record '" + skip.id + "': " + skip.reason);
      continue;
    }
    Ligand ligand = std::get<Ligand>(std::move(*record));
    if (args.ligand_id.empty() || ligand.id() == args.ligand_id) {
      target.emplace(std::move(ligand));
      break;
    }
  }
  if (!target)
    throw Error(args.ligand_id.empty() ? "no ligand records in '" + args.ligands_path + "'"
                                       : "ligand '" + args.ligand_id + "' not found");

  std::optional<PocketIndex> index;
  if (args.spatial_index) index.emplace(pocket);
  const PoseResult result = match_probes_shape(*target, pocket, make_initial_pose(*target), config,
                                               index ? &*index : nullptr);
  std::cout << "ligand_id=" << result.ligand_id << "\n"
            << "score=" << format_double(result.score) << "\n"
            << "evaluations=" << result.evaluations << "\n"
            << "feasibility_checks=" << result.feasibility_checks << "\n"
            << "wall_time_seconds=" << format_double(result.wall_time_seconds) << "\n";
  return 0;
}

struct ScreenArgs {
  std::string pocket_path, ligands_path, out_csv, out_summary;
  KnobFlags knobs;
  int workers = 1;
  bool spatial_index = false;
};

int run_screen(const ScreenArgs& args) {
  const KnobConfig config = args.knobs.to_config();
  const Pocket pocket = parse_pocket(read_file(args.pocket_path));
  std::ifstream in(args.ligands_path, std::ios::binary);
  if (!in) throw Error("cannot open '" + args.ligands_path + "'");
  StreamLigandSource source(in);
  std::optional<PocketIndex> index;
  if (args.spatial_index) index.emplace(pocket);
  const ScreeningReport report =
      screen(pocket, source, config, args.workers, index ? &*index : nullptr);
  if (!args.out_csv.empty()) write_file(args.out_csv, render_report_csv(report));
  if (!args.out_summary.empty()) write_file(args.out_summary, render_report_summary(report));
  std::cout << render_report_summary(report);
  return 0;
}

struct AnalyzeArgs {
  std::string pocket_path, ligands_path;
  std::string out_fragments = "fragments.csv";
  std::string out_peaks = "peaks.csv";
  std::string out_tiles = "tiles.csv";
  std::vector<int> tile_sizes = {2, 3, 4, 5, 6, 8, 9, 10, 12, 15, 18, 20, 24, 30, 36, 40, 45, 60, 72, 90, 120};
  KnobFlags knobs;
};

int run_analyze(const AnalyzeArgs& args) {
  const KnobConfig config = args.knobs.to_config();
  const Pocket pocket = parse_pocket(read_file(args.pocket_path));
  std::ifstream in(args.ligands_path, std::ios::binary);
  if (!in) throw Error("cannot open '" + args.ligands_path + "'");
  LigandParser parser(in);

  std::vector<FragmentProfileRow> fragments;
  std::vector<PeakRow> peaks;
  std::vector<PeakStats> stats;
  while (auto record = parser.next()) {
    if (std::holds_alternative<SkippedRecord>(*record)) {
      const auto& skip = std::get<SkippedRecord>(*record);
      std::cerr << "skipping '" << skip.id << "': " << skip.reason << "\n";
      continue;
    }
    const Ligand ligand = std::get<Ligand>(std::move(*record));
    LigandAnalysis analysis = analyze_ligand(ligand, pocket, config);
    fragments.insert(fragments.end(), analysis.fragments.begin(), analysis.fragments.end());
    peaks.insert(peaks.end(), analysis.peaks.begin(), analysis.peaks.end());
    for (auto& s : analysis.stats) stats.push_back(std::move(s));
  }
  write_file(args.out_fragments, render_fragment_stats_csv(fragments));
  write_file(args.out_peaks, render_peaks_csv(peaks));
  if (!stats.empty())
    write_file(args.out_tiles, render_tile_hits_csv(tile_hit_probability(stats, args.tile_sizes)));
  std::cout << "fragments=" << fragments.size() << "\npeaks=" << peaks.size() << "\n";
  return 0;
}

struct ProfileArgs {
  std::string design_space_path, manifest_path, out_path, baseline_text;
  int workers = 1;
};

int run_profile(const ProfileArgs& args) {
  const std::vector<KnobConfig> space = parse_design_space(read_file(args.design_space_path));

  std::vector<TrainingSet> sets;
  {
    const std::string manifest = read_file(args.manifest_path);
    detail::LineReader lines(manifest);
    while (const auto line = lines.next_content_line()) {
      const auto tokens = detail::split_ws(*line);
      if (tokens.size() != 2)
        throw ParseError("expected '<pocket_file> <ligand_file>'", lines.line());
      sets.push_back({parse_pocket(read_file(std::string(tokens[0]))),
                      parse_ligands(read_file(std::string(tokens[1])))});
    }
  }

  KnobConfig baseline;
  if (!args.baseline_text.empty()) {
    baseline = parse_config_string(args.baseline_text);
  } else {
    // Most precise configuration of the space: finest steps, everything
    // scanned at high precision, most passes, no refinement shortcuts.
    baseline = *std::min_element(space.begin(), space.end(), [](const KnobConfig& a,
                                                                const KnobConfig& b) {
      const auto key = [](const KnobConfig& c) {
        return std::make_tuple(c.high_precision_step, c.threshold, c.enable_refinement,
                               -c.repetitions, c.low_precision_step);
      };
      return key(a) < key(b);
    });
  }

  const KnowledgeBase kb = build_knowledge_base(space, sets, baseline, args.workers);
  for (const std::string& warning : kb.warnings) std::cerr << warning << "\n";
  write_file(args.out_path, render_knowledge_base(kb.profiles));
  std::cout << "configurations=" << kb.profiles.size() << "\n"
            << "training_sets=" << sets.size() << "\n"
            << "baseline:\n" << describe(baseline) << "\n";
  return 0;
}

struct PredictArgs {
  std::string kb_path;
  KnobFlags knobs;
  FeatureFlags features;
  long db_size = 1;
  int workers = 1;
};

int run_predict(const PredictArgs& args) {
  const KnobConfig config = args.knobs.to_config();
  const std::vector<ConfigProfile> kb = parse_knowledge_base(read_file(args.kb_path));
  const auto profile = std::find_if(kb.begin(), kb.end(),
                                    [&](const ConfigProfile& p) { return p.config == config; });
  if (profile == kb.end()) throw Error("configuration not present in the knowledge base");
  const Prediction prediction =
      predict(profile->perf, args.features.to_features(args.db_size), args.workers);
  std::cout << "predicted_seconds=" << format_double(prediction.seconds) << "\n"
            << "clamped=" << (prediction.clamped ? "1" : "0") << "\n"
            << "mean_degradation_pct=" << format_double(profile->mean_degradation) << "\n";
  return 0;
}

struct PlanArgs {
  std::string kb_path;
  FeatureFlags features;
  long db_size = 1;
  double budget_seconds = 0.0;
  int workers = 1;
};

int run_plan(const PlanArgs& args) {
  const std::vector<ConfigProfile> kb = parse_knowledge_base(read_file(args.kb_path));
  const Plan plan =
      select_config(kb, args.features.to_features(args.db_size), args.budget_seconds, args.workers);
  std::cout << describe(plan.chosen) << "\n"
            << "predicted_seconds=" << format_double(plan.predicted_seconds) << "\n"
            << "expected_completion_pct=" << format_double(plan.expected_completion_pct) << "\n"
            << "expected_degradation_pct=" << format_double(plan.expected_degradation_pct) << "\n";
  return plan.expected_completion_pct < 100.0 ? 3 : 0;
}

struct SweepArgs {
  std::string kb_path, out_path;
  FeatureFlags features;
  std::vector<double> db_sizes, budgets;
  long db_size = 0;
  double budget_seconds = 0.0;
  int workers = 1;
};

int run_sweep(const SweepArgs& args) {
  const std::vector<ConfigProfile> kb = parse_knowledge_base(read_file(args.kb_path));
  std::vector<SweepRow> rows;
  const DataFeatures features = args.features.to_features(1);
  if (!args.db_sizes.empty()) {
    if (args.budget_seconds <= 0.0)
      throw UsageError("--db-sizes requires a fixed --budget-seconds");
    rows = scenario_sweep(kb, features, args.workers, SweepVariable::database_size, args.db_sizes,
                          args.budget_seconds);
  } else if (!args.budgets.empty()) {
    if (args.db_size <= 0) throw UsageError("--budgets requires a fixed --db-size");
    rows = scenario_sweep(kb, features, args.workers, SweepVariable::budget, args.budgets,
                          static_cast<double>(args.db_size));
  } else {
    throw UsageError("pass either --db-sizes or --budgets");
  }
  const std::string csv = render_sweep_csv(rows);
  if (!args.out_path.empty()) write_file(args.out_path, csv);
  std::cout << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tunable geometric molecular docking and virtual screening"};
  app.require_subcommand(1);

  GenerateArgs generate_args;
  CLI::App* generate = app.add_subcommand("generate", "generate a synthetic pocket and ligand database");
  generate->add_option("--out-pocket", generate_args.out_pocket, "pocket output file")->required();
  generate->add_option("--out-ligands", generate_args.out_ligands, "ligand output file")->required();
  generate->add_option("--count", generate_args.spec.ligand_count, "number of ligands");
  generate->add_option("--seed", generate_args.spec.seed, "RNG seed");
  generate->add_option("--atom-min", generate_args.spec.atom_min, "minimum atoms per ligand");
  generate->add_option("--atom-max", generate_args.spec.atom_max, "maximum atoms per ligand");
  generate->add_option("--rotamer-min", generate_args.spec.rotamer_min, "minimum rotamers");
  generate->add_option("--rotamer-max", generate_args.spec.rotamer_max, "maximum rotamers");
  generate->add_option("--pocket-points", generate_args.spec.pocket_points, "pocket point count");
  generate->add_option("--pocket-radius", generate_args.spec.pocket_radius, "cavity radius, Angstrom");
  generate->add_option("--pocket-id", generate_args.spec.pocket_id, "pocket identifier");

  DockArgs dock_args;
  CLI::App* dock = app.add_subcommand("dock", "dock a single ligand and print the result");
  dock->add_option("--pocket", dock_args.pocket_path, "pocket file")->required();
  dock->add_option("--ligands", dock_args.ligands_path, "ligand database file")->required();
  dock->add_option("--ligand-id", dock_args.ligand_id, "ligand to dock (default: first record)");
  add_knob_flags(dock, dock_args.knobs);
  dock->add_flag("--spatial-index", dock_args.spatial_index, "use the grid nearest-point index");

  ScreenArgs screen_args;
  CLI::App* screen_cmd = app.add_subcommand("screen", "screen a ligand database against a pocket");
  screen_cmd->add_option("--pocket", screen_args.pocket_path, "pocket file")->required();
  screen_cmd->add_option("--ligands", screen_args.ligands_path, "ligand database file")->required();
  screen_cmd->add_option("--out-csv", screen_args.out_csv, "per-ligand CSV output");
  screen_cmd->add_option("--out-summary", screen_args.out_summary, "summary output (key=value)");
  add_knob_flags(screen_cmd, screen_args.knobs);
  add_workers_flag(screen_cmd, screen_args.workers);
  screen_cmd->add_flag("--spatial-index", screen_args.spatial_index,
                       "use the grid nearest-point index");

  AnalyzeArgs analyze_args;
  CLI::App* analyze = app.add_subcommand("analyze", "rotation profiles, peaks, and tile-hit tables");
  analyze->add_option("--pocket", analyze_args.pocket_path, "pocket file")->required();
  analyze->add_option("--ligands", analyze_args.ligands_path, "ligand database file")->required();
  analyze->add_option("--out-fragments", analyze_args.out_fragments, "fragment summary CSV");
  analyze->add_option("--out-peaks", analyze_args.out_peaks, "per-peak CSV");
  analyze->add_option("--out-tiles", analyze_args.out_tiles, "tile-hit probability CSV");
  analyze->add_option("--tile-sizes", analyze_args.tile_sizes, "tile sizes to tabulate")
      ->delimiter(',');
  add_knob_flags(analyze, analyze_args.knobs);

  ProfileArgs profile_args;
  CLI::App* profile = app.add_subcommand("profile", "build a knowledge base over a design space");
  profile->add_option("--design-space", profile_args.design_space_path,
                      "design-space file (knob = v1,v2,... lines)")->required();
  profile->add_option("--train-manifest", profile_args.manifest_path,
                      "manifest of '<pocket_file> <ligand_file>' training sets")->required();
  profile->add_option("--out", profile_args.out_path, "knowledge-base output file")->required();
  profile->add_option("--baseline", profile_args.baseline_text,
                      "baseline config '<hp>,<lp>,<threshold>,<reps>,<refine>' "
                      "(default: most precise in the space)");
  add_workers_flag(profile, profile_args.workers);

  PredictArgs predict_args;
  CLI::App* predict_cmd = app.add_subcommand("predict", "predict time-to-solution for a configuration");
  predict_cmd->add_option("--kb", predict_args.kb_path, "knowledge-base file")->required();
  add_knob_flags(predict_cmd, predict_args.knobs);
  add_feature_flags(predict_cmd, predict_args.features);
  predict_cmd->add_option("--db-size", predict_args.db_size, "ligand database size")->required();
  add_workers_flag(predict_cmd, predict_args.workers);

  PlanArgs plan_args;
  CLI::App* plan = app.add_subcommand("plan", "pick the most accurate configuration within a budget");
  plan->add_option("--kb", plan_args.kb_path, "knowledge-base file")->required();
  add_feature_flags(plan, plan_args.features);
  plan->add_option("--db-size", plan_args.db_size, "ligand database size")->required();
  plan->add_option("--budget-seconds", plan_args.budget_seconds, "time budget")->required();
  add_workers_flag(plan, plan_args.workers);

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "plan across database sizes or budgets");
  sweep->add_option("--kb", sweep_args.kb_path, "knowledge-base file")->required();
  add_feature_flags(sweep, sweep_args.features);
  sweep->add_option("--db-sizes", sweep_args.db_sizes, "database sizes to sweep")->delimiter(',');
  sweep->add_option("--budgets", sweep_args.budgets, "budgets (seconds) to sweep")->delimiter(',');
  sweep->add_option("--db-size", sweep_args.db_size, "fixed database size for a budget sweep");
  sweep->add_option("--budget-seconds", sweep_args.budget_seconds,
                    "fixed budget for a database-size sweep");
  sweep->add_option("--out", sweep_args.out_path, "CSV output file (default: stdout only)");
  add_workers_flag(sweep, sweep_args.workers);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (generate->parsed()) return run_generate(generate_args);
    if (dock->parsed()) return run_dock(dock_args);
    if (screen_cmd->parsed()) return run_screen(screen_args);
    if (analyze->parsed()) return run_analyze(analyze_args);
    if (profile->parsed()) return run_profile(profile_args);
    if (predict_cmd->parsed()) return run_predict(predict_args);
    if (plan->parsed()) return run_plan(plan_args);
    if (sweep->parsed()) return run_sweep(sweep_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
