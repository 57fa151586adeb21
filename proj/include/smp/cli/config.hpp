#pragma once

#include "smp/eval.hpp"
#include "smp/ingest.hpp"
#include "smp/models/spec.hpp"
#include "smp/topsis.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace smp::cli {

using Json = nlohmann::json;

struct DatasetEntry {
  std::string name;
  std::string path_text;  // as written in the config
  std::filesystem::path path;  // resolved against the config directory
  ingest::TableFormat format = ingest::TableFormat::csv;
  ingest::TargetScheme target = ingest::ChangeColumn{};
};

struct TechniqueEntry {
  models::Technique technique = models::Technique::rf;
  Json overrides = Json::object();
};

struct CriterionEntry {
  std::string name;  // mae, mae_rel, rmse or r2
  topsis::Direction direction = topsis::Direction::cost;
  double weight = 1.0;
};

enum class Format { json, csv, markdown };

struct RunConfig {
  static constexpr int kVersion = 1;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::filesystem::path output = "smp-out";
  std::optional<int> folds;  // unset = 10 for n >= 100, otherwise 5
  ingest::PreprocessOptions preprocess;
  std::vector<DatasetEntry> datasets;
  std::vector<TechniqueEntry> techniques;
  std::vector<CriterionEntry> criteria;
  std::vector<Format> formats{Format::json, Format::csv, Format::markdown};
};

std::vector<CriterionEntry> default_criteria();
std::vector<models::Technique> default_techniques();

/// Parses the YAML config. Relative dataset paths resolve against `base_dir`.
/// Throws ConfigError on unknown keys, bad values, or missing files.
RunConfig parse_config(std::string_view yaml, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// Checks the invariants that flags may have broken (seed present, jobs >= 1,
/// non-empty technique list, criteria known).
void validate(const RunConfig& cfg);

/// Everything that determines the results, with defaults filled in. Worker
/// count and output directory are left out so reports do not depend on them.
Json echo(const RunConfig& cfg);

/// Spec for one technique: overrides on top of the defaults, seed derived
/// from the run seed and the technique name.
models::RegressorSpec technique_spec(const RunConfig& cfg, const TechniqueEntry& entry);

std::vector<Format> parse_formats(std::string_view list);
std::string_view to_string(Format f) noexcept;

/// Converts a YAML document into JSON; scalars become bool, integer, float
/// or string by their spelling.
Json yaml_to_json(std::string_view yaml);

}  // namespace smp::cli
