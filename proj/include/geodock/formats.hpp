// Copyright 2026 The GeoDock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <charconv>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "geodock/analysis.hpp"
#include "geodock/autotuner.hpp"
#include "geodock/error.hpp"
#include "geodock/kernel.hpp"
#include "geodock/molecule.hpp"
#include "geodock/perf_model.hpp"
#include "geodock/screening.hpp"

namespace geodock {

/// Shortest decimal rendering that round-trips the exact double.
inline std::string format_double(double value) {
  std::array<char, 64> buf;
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), result.ptr);
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

inline std::vector<std::string_view> split_on(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double_token(std::string_view token, int line) {
  double value = 0.0;
  const auto result = std::from_chars(token.data(), token.data() + token.size(), value);
  if (result.ec != std::errc{} || result.ptr != token.data() + token.size())
    throw ParseError("invalid number '" + std::string(token) + "'", line);
  return value;
}

inline long parse_int_token(std::string_view token, int line) {
  long value = 0;
  const auto result = std::from_chars(token.data(), token.data() + token.size(), value);
  if (result.ec != std::errc{} || result.ptr != token.data() + token.size())
    throw ParseError("invalid integer '" + std::string(token) + "'", line);
  return value;
}

inline bool parse_bool_token(std::string_view token, int line) {
  if (token == "true" || token == "1") return true;
  if (token == "false" || token == "0") return false;
  throw ParseError("invalid flag '" + std::string(token) + "'", line);
}

inline bool is_content(std::string_view line) {
  const std::string_view t = trim(line);
  return !t.empty() && t.front() != '#';
}

/// Line cursor over a text blob; tracks 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::optional<std::string_view> next_content_line() {
    while (pos_ < text_.size()) {
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      const std::string_view line = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++line_;
      if (is_content(line)) return line;
    }
    return std::nullopt;
  }

  int line() const { return line_; }
  int next_line() const { return line_ + 1; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 0;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Pocket files: `POCKET <id> <n>` followed by n `<x> <y> <z>` lines.
// '#' starts a comment line.
// ---------------------------------------------------------------------------

inline std::string render_pocket(const Pocket& pocket) {
  std::string out = "POCKET " + pocket.id() + " " + std::to_string(pocket.points().size()) + "\n";
  for (const Vec3& p : pocket.points())
    out += format_double(p.x) + " " + format_double(p.y) + " " + format_double(p.z) + "\n";
  return out;
}

inline Pocket parse_pocket(std::string_view text) {
  detail::LineReader reader(text);
  const auto header = reader.next_content_line();
  if (!header) throw ParseError("missing POCKET header", reader.next_line());
  const auto tokens = detail::split_ws(*header);
  if (tokens.size() != 3 || tokens[0] != "POCKET")
    throw ParseError("expected 'POCKET <id> <n>' header", reader.line());
  const std::string id(tokens[1]);
  const long count = detail::parse_int_token(tokens[2], reader.line());
  if (count < 1) throw ParseError("pocket needs at least 1 point", reader.line());

  std::vector<Vec3> points;
  points.reserve(count);
  for (long i = 0; i < count; ++i) {
    const auto line = reader.next_content_line();
    if (!line)
      throw ParseError("expected " + std::to_string(count) + " points, found " + std::to_string(i),
                       reader.next_line());
    const auto coords = detail::split_ws(*line);
    if (coords.size() != 3) throw ParseError("expected '<x> <y> <z>'", reader.line());
    points.push_back({detail::parse_double_token(coords[0], reader.line()),
                      detail::parse_double_token(coords[1], reader.line()),
                      detail::parse_double_token(coords[2], reader.line())});
  }
  if (reader.next_content_line())
    throw ParseError("unexpected content after " + std::to_string(count) + " points",
                     reader.line());
  return Pocket(id, std::move(points));
}

// ---------------------------------------------------------------------------
// Ligand files: repeated records of
//   LIGAND <id> <natoms> <nbonds>
//   ATOM <idx> <x> <y> <z> <radius>      (natoms lines)
//   BOND <i> <j> <R|F>                   (nbonds lines)
// ---------------------------------------------------------------------------

inline std::string render_ligand(const Ligand& ligand) {
  std::string out = "LIGAND " + ligand.id() + " " + std::to_string(ligand.atoms().size()) + " " +
                    std::to_string(ligand.bonds().size()) + "\n";
  for (const Atom& a : ligand.atoms())
    out += "ATOM " + std::to_string(a.index) + " " + format_double(a.position.x) + " " +
           format_double(a.position.y) + " " + format_double(a.position.z) + " " +
           format_double(a.radius) + "\n";
  for (const Bond& b : ligand.bonds())
    out += "BOND " + std::to_string(b.a) + " " + std::to_string(b.b) + " " +
           (b.rotatable ? "R" : "F") + "\n";
  return out;
}

inline std::string render_ligands(const std::vector<Ligand>& ligands) {
  std::string out;
  for (const Ligand& ligand : ligands) out += render_ligand(ligand);
  return out;
}

/// Streaming ligand reader. Invalid records become SkippedRecord entries and
/// parsing resumes at the next LIGAND header.
class LigandParser {
 public:
  explicit LigandParser(std::istream& in) : in_(in) {}

  std::optional<std::variant<Ligand, SkippedRecord>> next() {
    const auto header = next_content_line();
    if (!header) return std::nullopt;
    const auto tokens = detail::split_ws(*header);
    if (tokens.size() != 4 || tokens[0] != "LIGAND") {
      SkippedRecord skip{"record@line" + std::to_string(line_),
                         "expected 'LIGAND <id> <natoms> <nbonds>' at line " +
                             std::to_string(line_)};
      resync_ = true;
      return skip;
    }
    const std::string id(tokens[1]);
    try {
      const long natoms = detail::parse_int_token(tokens[2], line_);
      const long nbonds = detail::parse_int_token(tokens[3], line_);

      std::vector<Atom> atoms;
      atoms.reserve(natoms);
      for (long i = 0; i < natoms; ++i) {
        const auto line = next_content_line();
        if (!line) throw ParseError("unexpected end of record in ligand '" + id + "'", line_ + 1);
        const auto t = detail::split_ws(*line);
        if (t.size() != 6 || t[0] != "ATOM")
          throw ParseError("expected 'ATOM <idx> <x> <y> <z> <radius>'", line_);
        Atom atom;
        atom.index = static_cast<int>(detail::parse_int_token(t[1], line_));
        atom.position = {detail::parse_double_token(t[2], line_),
                         detail::parse_double_token(t[3], line_),
                         detail::parse_double_token(t[4], line_)};
        atom.radius = detail::parse_double_token(t[5], line_);
        atoms.push_back(atom);
      }
      std::vector<Bond> bonds;
      bonds.reserve(nbonds);
      for (long i = 0; i < nbonds; ++i) {
        const auto line = next_content_line();
        if (!line) throw ParseError("unexpected end of record in ligand '" + id + "'", line_ + 1);
        const auto t = detail::split_ws(*line);
        if (t.size() != 4 || t[0] != "BOND" || (t[3] != "R" && t[3] != "F"))
          throw ParseError("expected 'BOND <i> <j> <R|F>'", line_);
        bonds.push_back({static_cast<int>(detail::parse_int_token(t[1], line_)),
                         static_cast<int>(detail::parse_int_token(t[2], line_)), t[3] == "R"});
      }
      return Ligand(id, std::move(atoms), std::move(bonds));
    } catch (const ParseError& e) {
      resync_ = true;
      return SkippedRecord{id, e.what()};
    } catch (const Error& e) {
      // Structural validation failure; the record was fully consumed.
      return SkippedRecord{id, e.what()};
    }
  }

 private:
  std::optional<std::string> next_content_line() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      if (!detail::is_content(line)) continue;
      if (resync_) {
        if (detail::split_ws(line).size() == 4 && detail::split_ws(line)[0] == "LIGAND")
          resync_ = false;
        else
          continue;
      }
      return line;
    }
    return std::nullopt;
  }

  std::istream& in_;
  int line_ = 0;
  bool resync_ = false;
};

/// Strict variant: throws on the first invalid record.
inline std::vector<Ligand> parse_ligands(std::string_view text) {
  std::istringstream in{std::string(text)};
  LigandParser parser(in);
  std::vector<Ligand> ligands;
  while (auto record = parser.next()) {
    if (std::holds_alternative<SkippedRecord>(*record))
      throw Error(std::get<SkippedRecord>(*record).reason);
    ligands.push_back(std::get<Ligand>(std::move(*record)));
  }
  return ligands;
}

/// LigandSource adapter over a stream, for screening directly from a file.
class StreamLigandSource : public LigandSource {
 public:
  explicit StreamLigandSource(std::istream& in) : parser_(in) {}

  std::optional<std::variant<Ligand, SkippedRecord>> next() override { return parser_.next(); }

 private:
  LigandParser parser_;
};

// ---------------------------------------------------------------------------
// Screening reports: a per-ligand CSV plus a key=value summary.
// ---------------------------------------------------------------------------

inline std::string render_report_csv(const ScreeningReport& report) {
  std::string out = "ligand_id,score,evaluations,time_seconds\n";
  for (const LigandResult& r : report.per_ligand)
    out += r.ligand_id + "," + format_double(r.score) + "," + std::to_string(r.evaluations) + "," +
           format_double(r.time_seconds) + "\n";
  return out;
}

inline std::string render_report_summary(const ScreeningReport& report) {
  std::string out;
  out += "pocket_id=" + report.pocket_id + "\n";
  out += "hp_step=" + std::to_string(report.config.high_precision_step) + "\n";
  out += "lp_step=" + std::to_string(report.config.low_precision_step) + "\n";
  out += "threshold=" + format_double(report.config.threshold) + "\n";
  out += "repetitions=" + std::to_string(report.config.repetitions) + "\n";
  out += std::string("refinement=") + (report.config.enable_refinement ? "1" : "0") + "\n";
  out += "n_ligands=" + std::to_string(report.per_ligand.size()) + "\n";
  out += "n_skipped=" + std::to_string(report.skipped.size()) + "\n";
  out += "total_atoms=" + std::to_string(report.total_atoms) + "\n";
  out += "wall_time_seconds=" + format_double(report.wall_time_seconds) + "\n";
  out += "throughput_atoms_per_second=" + format_double(report.throughput) + "\n";
  out += "top1pct_mean=" + format_double(report.top1pct_mean) + "\n";
  for (const SkippedRecord& s : report.skipped) out += "skipped=" + s.id + ": " + s.reason + "\n";
  return out;
}

inline ScreeningReport parse_report(std::string_view csv, std::string_view summary) {
  ScreeningReport report;

  detail::LineReader lines(summary);
  long n_ligands = -1;
  while (const auto line = lines.next_content_line()) {
    const std::size_t eq = line->find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", lines.line());
    const std::string_view key = line->substr(0, eq);
    const std::string_view value = line->substr(eq + 1);
    const int ln = lines.line();
    if (key == "pocket_id") report.pocket_id = std::string(value);
    else if (key == "hp_step") report.config.high_precision_step = static_cast<int>(detail::parse_int_token(value, ln));
    else if (key == "lp_step") report.config.low_precision_step = static_cast<int>(detail::parse_int_token(value, ln));
    else if (key == "threshold") report.config.threshold = detail::parse_double_token(value, ln);
    else if (key == "repetitions") report.config.repetitions = static_cast<int>(detail::parse_int_token(value, ln));
    else if (key == "refinement") report.config.enable_refinement = detail::parse_bool_token(value, ln);
    else if (key == "n_ligands") n_ligands = detail::parse_int_token(value, ln);
    else if (key == "n_skipped") continue;  // implied by the skipped entries
    else if (key == "total_atoms") report.total_atoms = detail::parse_int_token(value, ln);
    else if (key == "wall_time_seconds") report.wall_time_seconds = detail::parse_double_token(value, ln);
    else if (key == "throughput_atoms_per_second") report.throughput = detail::parse_double_token(value, ln);
    else if (key == "top1pct_mean") report.top1pct_mean = detail::parse_double_token(value, ln);
    else if (key == "skipped") {
      const std::size_t sep = value.find(": ");
      if (sep == std::string_view::npos) throw ParseError("expected 'skipped=<id>: <reason>'", ln);
      report.skipped.push_back(
          {std::string(value.substr(0, sep)), std::string(value.substr(sep + 2))});
    } else {
      throw ParseError("unknown summary key '" + std::string(key) + "'", ln);
    }
  }

  detail::LineReader rows(csv);
  const auto header = rows.next_content_line();
  if (!header || *header != "ligand_id,score,evaluations,time_seconds")
    throw ParseError("bad report CSV header", rows.line());
  while (const auto line = rows.next_content_line()) {
    const auto fields = detail::split_on(*line, ',');
    if (fields.size() != 4) throw ParseError("expected 4 CSV fields", rows.line());
    report.per_ligand.push_back({std::string(fields[0]),
                                 detail::parse_double_token(fields[1], rows.line()),
                                 detail::parse_int_token(fields[2], rows.line()),
                                 detail::parse_double_token(fields[3], rows.line())});
  }
  if (n_ligands >= 0 && n_ligands != static_cast<long>(report.per_ligand.size()))
    throw Error("report CSV row count does not match summary n_ligands");
  return report;
}

// ---------------------------------------------------------------------------
// Knowledge base: one CSV record per profiled configuration.
// ---------------------------------------------------------------------------

inline const std::string kKnowledgeBaseHeader =
    "hp_step,lp_step,threshold,repetitions,refinement,"
    "c_pp,c_la,c_lr,c_pp_la,c_pp_lr,c_la_lr,c_pp_la_lr,"
    "intercept,adjusted_r2,n_observations,mean_degradation_pct";

inline std::string render_knowledge_base(const std::vector<ConfigProfile>& profiles) {
  std::string out = "# geodock knowledge base\n# " + kKnowledgeBaseHeader + "\n";
  for (const ConfigProfile& p : profiles) {
    out += std::to_string(p.config.high_precision_step) + "," +
           std::to_string(p.config.low_precision_step) + "," + format_double(p.config.threshold) +
           "," + std::to_string(p.config.repetitions) + "," +
           (p.config.enable_refinement ? "1" : "0");
    for (const double c : p.perf.coefficients) out += "," + format_double(c);
    out += "," + format_double(p.perf.intercept) + "," + format_double(p.perf.adjusted_r2) + "," +
           std::to_string(p.perf.n_observations) + "," + format_double(p.mean_degradation) + "\n";
  }
  return out;
}

inline std::vector<ConfigProfile> parse_knowledge_base(std::string_view text) {
  std::vector<ConfigProfile> profiles;
  detail::LineReader lines(text);
  while (const auto line = lines.next_content_line()) {
    const auto f = detail::split_on(*line, ',');
    const int ln = lines.line();
    if (f.size() != 16) throw ParseError("expected 16 knowledge-base fields", ln);
    ConfigProfile p;
    p.config.high_precision_step = static_cast<int>(detail::parse_int_token(f[0], ln));
    p.config.low_precision_step = static_cast<int>(detail::parse_int_token(f[1], ln));
    p.config.threshold = detail::parse_double_token(f[2], ln);
    p.config.repetitions = static_cast<int>(detail::parse_int_token(f[3], ln));
    p.config.enable_refinement = detail::parse_bool_token(f[4], ln);
    for (int j = 0; j < kPredictorCount; ++j)
      p.perf.coefficients[j] = detail::parse_double_token(f[5 + j], ln);
    p.perf.intercept = detail::parse_double_token(f[12], ln);
    p.perf.adjusted_r2 = detail::parse_double_token(f[13], ln);
    p.perf.n_observations = static_cast<int>(detail::parse_int_token(f[14], ln));
    p.mean_degradation = detail::parse_double_token(f[15], ln);
    p.perf.config = p.config;
    profiles.push_back(std::move(p));
  }
  return profiles;
}

// ---------------------------------------------------------------------------
// Design-space files: `knob = v1,v2,...` per line, expanded full-factorial.
// Omitted knobs default to threshold=0, repetitions=3, refinement=false and
// a low-precision step equal to each configuration's high-precision step.
// ---------------------------------------------------------------------------

inline std::vector<KnobConfig> parse_design_space(std::string_view text) {
  std::vector<int> hp = {1};
  std::vector<int> lp;  // empty: mirror hp
  std::vector<double> threshold = {0.0};
  std::vector<int> repetitions = {3};
  std::vector<bool> refinement = {false};

  detail::LineReader lines(text);
  while (const auto line = lines.next_content_line()) {
    const std::size_t eq = line->find('=');
    if (eq == std::string_view::npos)
      throw ParseError("expected '<knob> = <v1,v2,...>'", lines.line());
    const std::string_view key = detail::trim(line->substr(0, eq));
    const int ln = lines.line();
    std::vector<std::string_view> values;
    for (const auto v : detail::split_on(line->substr(eq + 1), ','))
      values.push_back(detail::trim(v));
    if (values.empty()) throw ParseError("empty knob value list", ln);
    if (key == "hp_step") {
      hp.clear();
      for (const auto v : values) hp.push_back(static_cast<int>(detail::parse_int_token(v, ln)));
    } else if (key == "lp_step") {
      lp.clear();
      for (const auto v : values) lp.push_back(static_cast<int>(detail::parse_int_token(v, ln)));
    } else if (key == "threshold") {
      threshold.clear();
      for (const auto v : values) threshold.push_back(detail::parse_double_token(v, ln));
    } else if (key == "repetitions") {
      repetitions.clear();
      for (const auto v : values)
        repetitions.push_back(static_cast<int>(detail::parse_int_token(v, ln)));
    } else if (key == "refinement") {
      refinement.clear();
      for (const auto v : values) refinement.push_back(detail::parse_bool_token(v, ln));
    } else {
      throw ParseError("unknown knob '" + std::string(key) + "'", ln);
    }
  }

  std::vector<KnobConfig> space;
  for (const int h : hp) {
    const std::vector<int> lp_values = lp.empty() ? std::vector<int>{h} : lp;
    for (const int l : lp_values)
      for (const double t : threshold)
        for (const int r : repetitions)
          for (const bool e : refinement) {
            KnobConfig config{h, l, t, r, e};
            config.validate();
            space.push_back(config);
          }
  }
  return space;
}

// ---------------------------------------------------------------------------
// Analysis and sweep CSV emission.
// ---------------------------------------------------------------------------

inline std::string render_fragment_stats_csv(const std::vector<FragmentProfileRow>& rows) {
  std::string out =
      "ligand_id,rotamer,side,relative_size,delta_overlap,delta_normalized,peak_count,"
      "best_peak_width\n";
  for (const FragmentProfileRow& r : rows)
    out += r.ligand_id + "," + std::to_string(r.rotamer_index) + "," +
           (r.side == Side::left ? "left" : "right") + "," + format_double(r.relative_size) + "," +
           format_double(r.delta_overlap) + "," + format_double(r.delta_normalized) + "," +
           std::to_string(r.peak_count) + "," + std::to_string(r.best_peak_width) + "\n";
  return out;
}

inline std::string render_peaks_csv(const std::vector<PeakRow>& rows) {
  std::string out = "ligand_id,rotamer,side,start_angle,width,height_ratio\n";
  for (const PeakRow& r : rows)
    out += r.ligand_id + "," + std::to_string(r.rotamer_index) + "," +
           (r.side == Side::left ? "left" : "right") + "," + std::to_string(r.start_angle) + "," +
           std::to_string(r.width) + "," + format_double(r.height_ratio) + "\n";
  return out;
}

inline std::string render_tile_hits_csv(const std::vector<TileHit>& hits) {
  std::string out = "tile_size,probability,eval_count\n";
  for (const TileHit& h : hits)
    out += std::to_string(h.tile_size) + "," + format_double(h.probability) + "," +
           format_double(h.eval_count) + "\n";
  return out;
}

inline std::string render_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "swept_value,completion_pct,degradation_pct,hp_step,lp_step,threshold,repetitions,"
      "refinement\n";
  for (const SweepRow& r : rows)
    out += format_double(r.swept_value) + "," + format_double(r.plan.expected_completion_pct) +
           "," + format_double(r.plan.expected_degradation_pct) + "," +
           std::to_string(r.plan.chosen.high_precision_step) + "," +
           std::to_string(r.plan.chosen.low_precision_step) + "," +
           format_double(r.plan.chosen.threshold) + "," +
           std::to_string(r.plan.chosen.repetitions) + "," +
           (r.plan.chosen.enable_refinement ? "1" : "0") + "\n";
  return out;
}

}  // namespace geodock
