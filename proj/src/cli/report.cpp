#include "smp/cli/report.hpp"

#include "smp/error.hpp"

#include <fmt/format.h>

#include <fstream>

namespace smp::cli {

namespace fs = std::filesystem;

namespace {

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json metrics_json(const eval::MetricTriple& m) {
  return Json{{"mae", m.mae}, {"mae_rel", optional_json(m.mae_rel)}, {"rmse", m.rmse}, {"r2", optional_json(m.r2)}};
}

std::optional<double> criterion_value(const eval::MetricTriple& m, const std::string& name) {
  if (name == "mae") return m.mae;
  if (name == "rmse") return m.rmse;
  if (name == "mae_rel") return m.mae_rel;
  if (name == "r2") return m.r2;
  throw ConfigError(fmt::format("unknown criterion '{}'", name));
}

std::string cell(const std::optional<double>& v, int digits = 4) {
  return v ? fmt::format("{:.{}f}", *v, digits) : std::string("n/a");
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace

topsis::DecisionMatrix decision_matrix(const std::vector<eval::BenchRow>& rows,
                                       const std::vector<CriterionEntry>& criteria) {
  std::vector<std::string> labels;
  std::vector<topsis::Criterion> crit;
  for (const auto& c : criteria) crit.push_back({c.name, c.direction});
  Matrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(criteria.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    labels.emplace_back(models::display_label(rows[i].technique));
    for (std::size_t j = 0; j < criteria.size(); ++j) {
      const auto v = criterion_value(rows[i].mean, criteria[j].name);
      if (!v) {
        throw DataError(fmt::format("{}: criterion {} is undefined for {}", rows[i].dataset, criteria[j].name,
                                    labels.back()));
      }
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *v;
    }
  }
  return topsis::DecisionMatrix(std::move(labels), std::move(crit), std::move(values));
}

std::vector<std::pair<std::string, std::vector<std::string>>> ranking_matrix(const BenchmarkReport& report) {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (const auto& d : report.datasets) {
    if (!d.ranking) continue;
    std::vector<std::string> labels;
    for (auto i : d.ranking->order) labels.push_back(d.ranking->alternatives[i]);
    out.emplace_back(d.name, std::move(labels));
  }
  return out;
}

Json to_json(const BenchmarkReport& report) {
  Json datasets = Json::array();
  for (const auto& d : report.datasets) {
    Json rows = Json::array();
    for (const auto& r : d.rows) {
      Json folds = Json::array();
      for (const auto& f : r.folds) {
        Json fj = metrics_json(f.metrics);
        fj["fold"] = f.fold;
        fj["train_size"] = f.train_size;
        fj["test_size"] = f.test_size;
        folds.push_back(fj);
      }
      Json mean = metrics_json(r.mean);
      mean["rmse_pct_of_target_range"] = d.target_range > 0.0 ? Json(100.0 * r.mean.rmse / d.target_range) : Json(nullptr);
      rows.push_back({{"technique", models::to_string(r.technique)},
                      {"label", models::display_label(r.technique)},
                      {"mean", mean},
                      {"folds", folds},
                      {"notes", r.notes}});
    }
    datasets.push_back({{"name", d.name},
                        {"instances", d.instances},
                        {"features", d.features},
                        {"target_kind", ingest::to_string(d.target_kind)},
                        {"target_range", d.target_range},
                        {"folds", d.folds},
                        {"provenance", d.provenance},
                        {"rows", rows},
                        {"ranking", d.ranking ? d.ranking->to_json() : Json(nullptr)}});
  }
  Json matrix = Json::array();
  for (const auto& [name, labels] : ranking_matrix(report)) matrix.push_back({{"dataset", name}, {"ranks", labels}});
  Json failures = Json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"dataset", f.dataset}, {"technique", f.technique}, {"stage", f.stage}, {"message", f.message}});
  }
  return Json{{"schema_version", kReportSchemaVersion},
              {"tool", {{"name", "smp"}, {"version", kToolVersion}}},
              {"config", report.config},
              {"datasets", datasets},
              {"ranking_matrix", matrix},
              {"failures", failures},
              {"notes", report.notes}};
}

std::string to_csv(const BenchmarkReport& report) {
  std::vector<eval::BenchRow> rows;
  for (const auto& d : report.datasets) rows.insert(rows.end(), d.rows.begin(), d.rows.end());
  return eval::to_csv(rows);
}

std::string to_markdown(const BenchmarkReport& report) {
  std::string out = fmt::format("# Benchmark report\n\nseed: {}\n\n", report.config.value("seed", 0ULL));
  for (const auto& d : report.datasets) {
    out += fmt::format("## {}\n\n{} instances, {} features, target {}, {} folds\n\n", d.name, d.instances, d.features,
                       ingest::to_string(d.target_kind), d.folds);
    out += "| Technique | MAE | MAE (relative) | RMSE | RMSE % of range | R2 | Closeness | Rank |\n";
    out += "|---|---:|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& r : d.rows) {
      const std::string label(models::display_label(r.technique));
      std::string closeness = "-";
      std::string rank = "-";
      if (d.ranking) {
        for (std::size_t i = 0; i < d.ranking->alternatives.size(); ++i) {
          if (d.ranking->alternatives[i] == label) {
            closeness = fmt::format("{:.5f}", d.ranking->closeness(static_cast<Eigen::Index>(i)));
            rank = std::to_string(d.ranking->rank[i]);
          }
        }
      }
      const std::optional<double> pct =
          d.target_range > 0.0 ? std::optional<double>(100.0 * r.mean.rmse / d.target_range) : std::nullopt;
      out += fmt::format("| {} | {} | {} | {} | {} | {} | {} | {} |\n", label, cell(r.mean.mae),
                         cell(r.mean.mae_rel), cell(r.mean.rmse), cell(pct, 2), cell(r.mean.r2), closeness, rank);
    }
    if (d.ranking && d.ranking->tie) out += "\nTied closeness values were ordered by label.\n";
    if (d.ranking && d.ranking->trivial) out += "\nOnly one technique was ranked; the ranking is trivial.\n";
    out += "\n";
  }

  const auto matrix = ranking_matrix(report);
  std::size_t width = 0;
  for (const auto& [name, labels] : matrix) width = std::max(width, labels.size());
  out += "## Ranking\n\n| Dataset |";
  for (std::size_t r = 1; r <= width; ++r) out += fmt::format(" Rank {} |", r);
  out += "\n|---|";
  for (std::size_t r = 0; r < width; ++r) out += "---|";
  out += "\n";
  for (const auto& [name, labels] : matrix) {
    out += fmt::format("| {} |", name);
    for (std::size_t r = 0; r < width; ++r) out += fmt::format(" {} |", r < labels.size() ? labels[r] : "-");
    out += "\n";
  }
  if (!report.failures.empty()) {
    out += "\n## Failures\n\n| Dataset | Technique | Stage | Message |\n|---|---|---|---|\n";
    for (const auto& f : report.failures) {
      out += fmt::format("| {} | {} | {} | {} |\n", f.dataset, f.technique.empty() ? "-" : f.technique, f.stage,
                         f.message);
    }
  }
  if (!report.notes.empty()) {
    out += "\n## Notes\n\n";
    for (const auto& n : report.notes) out += "- " + n + "\n";
  }
  return out;
}

std::vector<fs::path> emit_report(const BenchmarkReport& report, const std::vector<Format>& formats,
                                  const fs::path& dir) {
  std::vector<fs::path> written;
  if (formats.empty()) return written;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(fmt::format("cannot create output directory '{}'", dir.string()));
  for (auto f : formats) {
    switch (f) {
      case Format::json: {
        const auto path = dir / "report.json";
        write_file(path, to_json(report).dump(2) + "\n");
        written.push_back(path);
        break;
      }
      case Format::csv: {
        const auto path = dir / "bench.csv";
        write_file(path, to_csv(report));
        written.push_back(path);
        break;
      }
      case Format::markdown: {
        const auto path = dir / "report.md";
        write_file(path, to_markdown(report));
        written.push_back(path);
        break;
      }
    }
  }
  return written;
}

}  // namespace smp::cli
