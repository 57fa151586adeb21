#pragma once

#include "smp/cli/config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace smp::cli {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "1.0.0";

struct Failure {
  std::string dataset;
  std::string technique;  // empty for dataset-level failures
  std::string stage;      // ingest, cross_validate, rank
  std::string message;
};

struct DatasetResult {
  std::string name;
  std::size_t instances = 0;
  std::size_t features = 0;
  ingest::TargetKind target_kind = ingest::TargetKind::change;
  int folds = 0;
  double target_range = 0.0;  // max - min of the preprocessed target
  std::vector<std::string> provenance;
  std::vector<eval::BenchRow> rows;  // config technique order
  std::optional<topsis::RankingResult> ranking;
};

struct BenchmarkReport {
  Json config;  // echo of the resolved run configuration
  std::vector<DatasetResult> datasets;
  std::vector<Failure> failures;
  std::vector<std::string> notes;
};

Json to_json(const BenchmarkReport& report);
std::string to_csv(const BenchmarkReport& report);
std::string to_markdown(const BenchmarkReport& report);

/// Rank labels in order for each dataset with a ranking; the Markdown matrix
/// and the JSON `ranking_matrix` are both built from this.
std::vector<std::pair<std::string, std::vector<std::string>>> ranking_matrix(const BenchmarkReport& report);

/// Writes report.json / bench.csv / report.md into `dir` for the requested
/// formats and returns the paths written. Throws Error if `dir` is unwritable.
std::vector<std::filesystem::path> emit_report(const BenchmarkReport& report, const std::vector<Format>& formats,
                                               const std::filesystem::path& dir);

/// Decision matrix of aggregate metrics for one dataset.
topsis::DecisionMatrix decision_matrix(const std::vector<eval::BenchRow>& rows,
                                       const std::vector<CriterionEntry>& criteria);

}  // namespace smp::cli
