#include "smp/cli/commands.hpp"

#include "smp/error.hpp"
#include "smp/rng.hpp"
#include "smp/srcmetrics.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace smp::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& text, std::string_view what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", what, text));
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot read '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw DataError(fmt::format("failed reading '{}'", path.string()));
  return buffer.str();
}

// ---- bench ---------------------------------------------------------------

struct BenchFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
  std::optional<std::string> formats;
};

int cmd_bench(const BenchFlags& flags, std::ostream& out, std::ostream& err) {
  RunConfig cfg = load_config(flags.config);
  if (flags.seed) cfg.seed = flags.seed;
  if (flags.jobs) cfg.jobs = *flags.jobs;
  if (flags.out) cfg.output = *flags.out;
  if (flags.formats) cfg.formats = parse_formats(*flags.formats);
  validate(cfg);

  const auto report = run_benchmark(cfg, &err);
  if (cfg.formats.empty()) {
    err << "warning: no report formats requested; nothing written\n";
  }
  for (const auto& path : emit_report(report, cfg.formats, cfg.output)) out << "wrote " << path.string() << "\n";
  for (const auto& [name, labels] : ranking_matrix(report)) {
    out << name << ":";
    for (const auto& l : labels) out << " " << l;
    out << "\n";
  }
  if (!report.failures.empty()) {
    err << fmt::format("{} failure(s); see the failure manifest in the report\n", report.failures.size());
    return kPartialFailure;
  }
  return kOk;
}

// ---- rank ----------------------------------------------------------------

struct RankFlags {
  std::string metrics;
  std::optional<std::string> weights;
  std::optional<std::string> directions;
  std::optional<std::string> out;
  std::optional<std::string> formats;
};

int cmd_rank(const RankFlags& flags, std::ostream& out, std::ostream& err) {
  const auto table = ingest::load_table(flags.metrics, ingest::TableFormat::csv);
  const auto dcol = table.find_column("dataset");
  const auto tcol = table.find_column("technique");
  if (!dcol || !tcol) throw ConfigError("rank: metrics CSV needs dataset and technique columns");
  std::vector<std::size_t> crit_cols;
  std::vector<topsis::Criterion> criteria;
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    if (j == *dcol || j == *tcol) continue;
    crit_cols.push_back(j);
    const auto& name = table.columns[j].name;
    criteria.push_back({name, name == "r2" || name == "R2" ? topsis::Direction::benefit : topsis::Direction::cost});
  }
  if (criteria.empty()) throw ConfigError("rank: metrics CSV has no criterion columns");
  if (flags.directions) {
    const auto dirs = split_list(*flags.directions);
    if (dirs.size() != criteria.size()) {
      throw ConfigError(fmt::format("rank: {} directions given for {} criteria", dirs.size(), criteria.size()));
    }
    for (std::size_t j = 0; j < dirs.size(); ++j) criteria[j].direction = topsis::direction_from_string(dirs[j]);
  }
  std::vector<double> raw_weights(criteria.size(), 1.0);
  if (flags.weights) {
    const auto ws = split_list(*flags.weights);
    if (ws.size() != criteria.size()) {
      throw ConfigError(fmt::format("rank: {} weights given for {} criteria", ws.size(), criteria.size()));
    }
    for (std::size_t j = 0; j < ws.size(); ++j) raw_weights[j] = parse_number(ws[j], "rank --weights");
  }
  const topsis::WeightVector weights(raw_weights);

  auto text = [](const ingest::Cell& c) -> std::string {
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    if (const auto* d = std::get_if<double>(&c)) return fmt::format("{}", *d);
    return "";
  };
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto name = text(table.rows[i][*dcol]);
    if (!groups.count(name)) order.push_back(name);
    groups[name].push_back(i);
  }

  Json results = Json::array();
  std::string markdown = "# TOPSIS ranking\n\n";
  std::size_t width = 0;
  std::vector<std::pair<std::string, std::vector<std::string>>> matrix;
  int status = kOk;
  for (const auto& name : order) {
    std::vector<std::string> labels;
    Matrix values(static_cast<Eigen::Index>(groups[name].size()), static_cast<Eigen::Index>(criteria.size()));
    try {
      for (std::size_t r = 0; r < groups[name].size(); ++r) {
        const auto& row = table.rows[groups[name][r]];
        labels.push_back(text(row[*tcol]));
        for (std::size_t j = 0; j < crit_cols.size(); ++j) {
          const auto* v = std::get_if<double>(&row[crit_cols[j]]);
          if (!v) throw DataError(fmt::format("{} / {}: {} is missing or not numeric", name, labels.back(), criteria[j].name));
          values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = *v;
        }
      }
      const auto result = topsis::rank(topsis::DecisionMatrix(labels, criteria, values), weights, true);
      Json rj = result.to_json();
      rj["dataset"] = name;
      results.push_back(rj);
      markdown += fmt::format("## {}\n\n{}\n", name, topsis::to_markdown(result));
      std::vector<std::string> ranked;
      for (auto i : result.order) ranked.push_back(result.alternatives[i]);
      width = std::max(width, ranked.size());
      matrix.emplace_back(name, ranked);
    } catch (const DataError& e) {
      err << fmt::format("error: {}: {}\n", name, e.what());
      results.push_back({{"dataset", name}, {"error", e.what()}});
      status = kPartialFailure;
    }
  }
  markdown += "## Ranking\n\n| Dataset |";
  for (std::size_t r = 1; r <= width; ++r) markdown += fmt::format(" Rank {} |", r);
  markdown += "\n|---|";
  for (std::size_t r = 0; r < width; ++r) markdown += "---|";
  markdown += "\n";
  for (const auto& [name, ranked] : matrix) {
    markdown += fmt::format("| {} |", name);
    for (std::size_t r = 0; r < width; ++r) markdown += fmt::format(" {} |", r < ranked.size() ? ranked[r] : "-");
    markdown += "\n";
  }

  const Json doc{{"schema_version", kReportSchemaVersion}, {"rankings", results}};
  if (flags.out) {
    const auto formats = parse_formats(flags.formats.value_or("json,md"));
    fs::create_directories(*flags.out);
    for (auto f : formats) {
      if (f == Format::json) {
        std::ofstream(fs::path(*flags.out) / "ranking.json", std::ios::binary) << doc.dump(2) << "\n";
      } else if (f == Format::markdown) {
        std::ofstream(fs::path(*flags.out) / "ranking.md", std::ios::binary) << markdown;
      }
    }
  }
  out << markdown;
  return status;
}

// ---- scan ----------------------------------------------------------------

struct ScanFlags {
  std::vector<std::string> paths;
  std::optional<std::string> language;
  std::string variant = "visual_studio";
  bool json = false;
  std::optional<std::string> out;
};

int cmd_scan(const ScanFlags& flags, std::ostream& out, std::ostream& err) {
  const auto variant = mi::variant_from_string(flags.variant);
  const srcmetrics::LanguageProfile* forced = flags.language ? &srcmetrics::profile_by_name(*flags.language) : nullptr;

  std::vector<fs::path> files;
  std::vector<std::pair<std::string, std::string>> errors;
  for (const auto& p : flags.paths) {
    const fs::path path(p);
    std::error_code ec;
    if (fs::is_directory(path, ec)) {
      for (auto it = fs::recursive_directory_iterator(path, ec); !ec && it != fs::recursive_directory_iterator();
           it.increment(ec)) {
        if (it->is_regular_file() && (forced || srcmetrics::profile_for_path(it->path()))) files.push_back(it->path());
      }
      if (ec) errors.emplace_back(p, ec.message());
    } else {
      files.push_back(path);
    }
  }
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());

  Json records = Json::array();
  std::map<std::string, std::size_t> bands{{"red", 0}, {"yellow", 0}, {"green", 0}};
  out << fmt::format("{:<40} {:>5} {:>5} {:>6} {:>6} {:>10} {:>4} {:>6} {:>6} {:>6} {:>8} {}\n", "path", "eta1", "eta2",
                     "N1", "N2", "volume", "G", "loc", "src", "cmt", "MI", "band");
  for (const auto& file : files) {
    Json rec{{"path", file.generic_string()}};
    try {
      const auto* profile = forced ? forced : srcmetrics::profile_for_path(file);
      if (!profile) throw DataError("no language profile for this extension (use --language)");
      const auto report = srcmetrics::file_mi(read_text(file), *profile, variant);
      const auto& m = report.metrics;
      rec["language"] = profile->name;
      rec["eta1"] = m.halstead.eta1;
      rec["eta2"] = m.halstead.eta2;
      rec["N1"] = m.halstead.n1;
      rec["N2"] = m.halstead.n2;
      rec["volume"] = m.halstead.volume;
      rec["cyclomatic"] = m.cyclomatic;
      rec["loc_total"] = m.loc.total;
      rec["loc_source"] = m.loc.source;
      rec["loc_comment"] = m.loc.comment;
      rec["loc_blank"] = m.loc.blank;
      rec["comment_fraction"] = m.loc.comment_fraction;
      rec["mi"] = report.score.value;
      rec["variant"] = mi::to_string(variant);
      rec["band"] = report.score.band ? Json(mi::to_string(*report.score.band)) : Json(nullptr);
      if (report.score.band) {
        std::string key(mi::to_string(*report.score.band));
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
        ++bands[key];
      }
      out << fmt::format("{:<40} {:>5} {:>5} {:>6} {:>6} {:>10.3f} {:>4} {:>6} {:>6} {:>6} {:>8.3f} {}\n",
                         file.generic_string(), m.halstead.eta1, m.halstead.eta2, m.halstead.n1, m.halstead.n2,
                         m.halstead.volume, m.cyclomatic, m.loc.total, m.loc.source, m.loc.comment, report.score.value,
                         report.score.band ? mi::to_string(*report.score.band) : "-");
    } catch (const Error& e) {
      rec["error"] = e.what();
      errors.emplace_back(file.generic_string(), e.what());
      out << fmt::format("{:<40} error: {}\n", file.generic_string(), e.what());
    }
    records.push_back(rec);
  }
  out << fmt::format("bands: red={} yellow={} green={}\n", bands["red"], bands["yellow"], bands["green"]);
  if (files.empty()) err << "warning: no source files found\n";
  for (const auto& [path, message] : errors) err << fmt::format("error: {}: {}\n", path, message);

  const Json doc{{"schema_version", kReportSchemaVersion},
                 {"variant", mi::to_string(variant)},
                 {"files", records},
                 {"bands", bands},
                 {"errors", errors.size()}};
  if (flags.json) out << doc.dump(2) << "\n";
  if (flags.out) {
    fs::create_directories(*flags.out);
    std::ofstream(fs::path(*flags.out) / "scan.json", std::ios::binary) << doc.dump(2) << "\n";
  }
  return errors.empty() ? kOk : kPartialFailure;
}

// ---- mi ------------------------------------------------------------------

struct MiFlags {
  double volume = 0.0;
  double cc = 0.0;
  double loc = 0.0;
  std::optional<double> comments;
  std::string variant = "visual_studio";
};

int cmd_mi(const MiFlags& flags, std::ostream& out) {
  const auto variant = mi::variant_from_string(flags.variant);
  const auto score = mi::compute({flags.volume, flags.cc, flags.loc, flags.comments}, variant);
  out << fmt::format("{} {:.4f}", mi::to_string(variant), score.value);
  if (score.band) out << " " << mi::to_string(*score.band);
  out << "\n";
  return kOk;
}

// ---- inspect -------------------------------------------------------------

struct InspectFlags {
  std::optional<std::string> config;
  std::optional<std::string> path;
  std::optional<std::string> format;
  std::optional<std::string> target;
  std::string variant = "visual_studio";
  std::optional<std::string> volume_col;
  std::optional<std::string> cc_col;
  std::optional<std::string> loc_col;
  std::optional<std::string> comments_col;
};

void describe(const ingest::Dataset& data, std::ostream& out) {
  out << fmt::format("  instances (after preprocessing): {}\n  features: {}\n  target: {}", data.instances(),
                     data.width(), ingest::to_string(data.target_kind));
  if (data.instances() > 0) {
    out << fmt::format(" range [{:.6g}, {:.6g}] mean {:.6g}", data.target.minCoeff(), data.target.maxCoeff(),
                       data.target.mean());
  }
  out << fmt::format("\n  default folds: {}\n", ingest::default_fold_count(data.instances()));
  for (const auto& line : data.provenance) out << "  " << line << "\n";
}

int cmd_inspect(const InspectFlags& flags, std::ostream& out) {
  if (flags.config) {
    const auto cfg = load_config(*flags.config);
    for (const auto& d : cfg.datasets) {
      const auto raw = ingest::load_table(d.path, d.format);
      out << fmt::format("{} ({})\n  instances (raw): {}\n  columns (raw): {}\n", d.name, d.path_text, raw.rows.size(),
                         raw.columns.size());
      describe(load_dataset(d, cfg.preprocess), out);
    }
    return kOk;
  }
  if (!flags.path) throw ConfigError("inspect: give a table path or --config");
  const fs::path path(*flags.path);
  const auto format = flags.format ? ingest::format_from_string(*flags.format) : ingest::format_from_path(path);
  const auto raw = ingest::load_table(path, format);
  std::size_t missing = 0, nominal = 0;
  for (const auto& row : raw.rows) {
    for (const auto& c : row) missing += std::holds_alternative<std::monostate>(c) ? 1 : 0;
  }
  for (const auto& c : raw.columns) nominal += c.kind == ingest::ColumnKind::nominal ? 1 : 0;
  out << fmt::format("{}\n  instances (raw): {}\n  columns (raw): {} ({} nominal)\n  missing cells: {}\n", raw.name,
                     raw.rows.size(), raw.columns.size(), nominal, missing);
  if (!flags.target) return kOk;
  ingest::TargetScheme scheme;
  if (*flags.target == "change" || *flags.target == "change_column") {
    scheme = ingest::ChangeColumn{};
  } else if (*flags.target == "mi" || *flags.target == "mi_from_columns") {
    ingest::MiFromColumns m;
    m.variant = mi::variant_from_string(flags.variant);
    if (flags.volume_col) m.columns.volume = *flags.volume_col;
    if (flags.cc_col) m.columns.cyclomatic = *flags.cc_col;
    if (flags.loc_col) m.columns.loc = *flags.loc_col;
    if (flags.comments_col) m.columns.comments = *flags.comments_col;
    m.drop_invalid_rows = true;
    scheme = m;
  } else {
    throw ConfigError(fmt::format("inspect: unknown target '{}' (expected change or mi)", *flags.target));
  }
  describe(ingest::preprocess(ingest::resolve_target(raw, scheme), {}), out);
  return kOk;
}

}  // namespace

ingest::Dataset load_dataset(const DatasetEntry& entry, const ingest::PreprocessOptions& options) {
  auto raw = ingest::load_table(entry.path, entry.format);
  raw.name = entry.name;
  auto data = ingest::preprocess(ingest::resolve_target(raw, entry.target), options);
  data.name = entry.name;
  ingest::validate(data);
  return data;
}

BenchmarkReport run_benchmark(const RunConfig& cfg, std::ostream* log) {
  validate(cfg);
  BenchmarkReport report;
  report.config = echo(cfg);
  const Exec exec{cfg.jobs};
  const Rng root(*cfg.seed);
  std::vector<topsis::Criterion> criteria;
  std::vector<double> weights;
  for (const auto& c : cfg.criteria) weights.push_back(c.weight);
  const topsis::WeightVector w(weights);

  for (const auto& entry : cfg.datasets) {
    ingest::Dataset data;
    try {
      data = load_dataset(entry, cfg.preprocess);
    } catch (const Error& e) {
      report.failures.push_back({entry.name, "", "ingest", e.what()});
      if (log) *log << fmt::format("[bench] {}: ingest failed: {}\n", entry.name, e.what());
      continue;
    }
    DatasetResult result;
    result.name = entry.name;
    result.instances = data.instances();
    result.features = data.width();
    result.target_kind = data.target_kind;
    result.target_range = data.target.maxCoeff() - data.target.minCoeff();
    result.provenance = data.provenance;
    int k = cfg.folds.value_or(ingest::default_fold_count(data.instances()));
    if (static_cast<std::size_t>(k) > data.instances()) {
      report.notes.push_back(fmt::format("{}: {} folds requested but only {} instances; using {}", entry.name, k,
                                         data.instances(), data.instances()));
      k = static_cast<int>(data.instances());
    }
    result.folds = k;
    const auto plan = ingest::kfold_split(data.instances(), k, root.derive("folds:" + entry.name).next());

    for (const auto& t : cfg.techniques) {
      const auto spec = technique_spec(cfg, t);
      try {
        result.rows.push_back(eval::cross_validate(spec, data, plan, exec));
        if (log) {
          const auto& r = result.rows.back();
          *log << fmt::format("[bench] {} {}: rmse {:.5g} ({:.2f}s)\n", entry.name, models::display_label(t.technique),
                              r.mean.rmse, r.seconds);
        }
      } catch (const Error& e) {
        report.failures.push_back({entry.name, std::string(models::to_string(t.technique)), "cross_validate", e.what()});
        if (log) *log << fmt::format("[bench] {} {}: failed: {}\n", entry.name, models::display_label(t.technique), e.what());
      }
    }
    if (!result.rows.empty()) {
      try {
        result.ranking = topsis::rank(decision_matrix(result.rows, cfg.criteria), w, true);
      } catch (const Error& e) {
        report.failures.push_back({entry.name, "", "rank", e.what()});
      }
    }
    report.datasets.push_back(std::move(result));
  }
  if (cfg.techniques.size() == 1) report.notes.push_back("one technique configured: rankings are trivial");
  return report;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Software maintainability prediction benchmark and TOPSIS ranking", "smp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "Cross-validate every technique on every dataset and rank them");
  bench_cmd->add_option("--config", bench.config, "YAML run configuration")->required();
  bench_cmd->add_option("--seed", bench.seed, "Override the configured seed");
  bench_cmd->add_option("--jobs", bench.jobs, "Worker threads (results do not depend on this)");
  bench_cmd->add_option("--out", bench.out, "Output directory");
  bench_cmd->add_option("--formats", bench.formats, "Comma list of json,csv,md");

  RankFlags rank;
  auto* rank_cmd = app.add_subcommand("rank", "TOPSIS ranking of a metrics CSV");
  rank_cmd->add_option("--metrics", rank.metrics, "CSV with dataset,technique and criterion columns")->required();
  rank_cmd->add_option("--weights", rank.weights, "Comma list of positive weights, one per criterion");
  rank_cmd->add_option("--directions", rank.directions, "Comma list of benefit/cost, one per criterion");
  rank_cmd->add_option("--out", rank.out, "Directory for ranking.json / ranking.md");
  rank_cmd->add_option("--formats", rank.formats, "Comma list of json,md");

  ScanFlags scan;
  auto* scan_cmd = app.add_subcommand("scan", "Halstead, cyclomatic, LOC and MI for source files");
  scan_cmd->add_option("paths", scan.paths, "Files or directories")->required();
  scan_cmd->add_option("--language", scan.language, "Force a profile: c, cpp or java");
  scan_cmd->add_option("--variant", scan.variant, "MI variant (coleman, sei, radon, visual_studio)");
  scan_cmd->add_flag("--json", scan.json, "Also print the JSON report");
  scan_cmd->add_option("--out", scan.out, "Directory for scan.json");

  MiFlags mif;
  auto* mi_cmd = app.add_subcommand("mi", "Maintainability index from explicit inputs");
  mi_cmd->add_option("--volume", mif.volume, "Halstead volume")->required();
  mi_cmd->add_option("--cc", mif.cc, "Cyclomatic complexity")->required();
  mi_cmd->add_option("--loc", mif.loc, "Lines of code")->required();
  mi_cmd->add_option("--comments", mif.comments, "Comment-line fraction in [0, 1]");
  mi_cmd->add_option("--variant", mif.variant, "coleman, sei, radon or visual_studio");

  InspectFlags insp;
  auto* inspect_cmd = app.add_subcommand("inspect", "Summarize a dataset or the datasets of a config");
  inspect_cmd->add_option("path", insp.path, "ARFF or CSV table");
  inspect_cmd->add_option("--config", insp.config, "Inspect every dataset of a run configuration");
  inspect_cmd->add_option("--format", insp.format, "arff or csv (default: from the extension)");
  inspect_cmd->add_option("--target", insp.target, "change or mi");
  inspect_cmd->add_option("--variant", insp.variant, "MI variant for --target mi");
  inspect_cmd->add_option("--volume-column", insp.volume_col, "Halstead volume column");
  inspect_cmd->add_option("--cc-column", insp.cc_col, "Cyclomatic complexity column");
  inspect_cmd->add_option("--loc-column", insp.loc_col, "Lines-of-code column");
  inspect_cmd->add_option("--comments-column", insp.comments_col, "Comment fraction column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*bench_cmd) return cmd_bench(bench, out, err);
    if (*rank_cmd) return cmd_rank(rank, out, err);
    if (*scan_cmd) return cmd_scan(scan, out, err);
    if (*mi_cmd) return cmd_mi(mif, out);
    if (*inspect_cmd) return cmd_inspect(insp, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kPartialFailure;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace smp::cli
