#pragma once

#include "smp/linalg.hpp"
#include "smp/mi.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace smp::ingest {

enum class ColumnKind { numeric, nominal };
enum class TableFormat { arff, csv };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::vector<std::string> categories;  // nominal columns only, declaration order
};

/// Missing, numeric value, or verbatim nominal value.
using Cell = std::variant<std::monostate, double, std::string>;

struct RawTable {
  std::string name;
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  /// Case-insensitive column lookup.
  [[nodiscard]] std::optional<std::size_t> find_column(std::string_view column) const;
};

TableFormat format_from_string(std::string_view name);
TableFormat format_from_path(const std::filesystem::path& path);
std::string_view to_string(TableFormat f) noexcept;

/// Throws DataError on I/O failure, malformed header, row arity mismatch, or
/// an unparseable numeric cell. Messages carry 1-based line numbers.
RawTable load_table(const std::filesystem::path& path, TableFormat format);
RawTable parse_arff(std::string_view text, std::string fallback_name);
RawTable parse_csv(std::string_view text, std::string name);

enum class TargetKind { change, mi };
std::string_view to_string(TargetKind k) noexcept;

struct Dataset {
  std::string name;
  Matrix features;  // n x p; NaN marks a missing cell before preprocessing
  std::vector<std::string> feature_names;
  Vector target;
  TargetKind target_kind = TargetKind::change;
  std::vector<std::size_t> row_ids;      // original table row of each instance
  std::vector<std::string> provenance;   // DROP_ROW / DROP_COL lines

  [[nodiscard]] std::size_t instances() const noexcept { return static_cast<std::size_t>(features.rows()); }
  [[nodiscard]] std::size_t width() const noexcept { return static_cast<std::size_t>(features.cols()); }
};

struct ChangeColumn {
  std::string column = "CHANGE";
};

struct MiColumnMap {
  std::string volume = "HALSTEAD_VOLUME";
  std::string cyclomatic = "CYCLOMATIC_COMPLEXITY";
  std::string loc = "LOC_TOTAL";
  std::optional<std::string> comments;  // needed by sei / radon
  double comments_scale = 1.0;          // e.g. 0.01 for percent columns
};

struct MiFromColumns {
  mi::Variant variant = mi::Variant::visual_studio;
  MiColumnMap columns;
  /// Rows whose inputs fall outside the MI domain raise DomainError unless
  /// this is set, in which case they are dropped and logged.
  bool drop_invalid_rows = false;
};

using TargetScheme = std::variant<ChangeColumn, MiFromColumns>;

/// Builds the feature matrix and target. Nominal features become category
/// indices; MI source columns are removed from the features.
Dataset resolve_target(const RawTable& raw, const TargetScheme& scheme);

struct PreprocessOptions {
  bool drop_missing = true;
  bool minmax_normalize = true;
  bool drop_zero_variance = true;
};

/// Drops missing rows, constant columns, then min-max scales. Idempotent.
Dataset preprocess(Dataset data, const PreprocessOptions& options);

/// Throws DataError when the dataset violates the post-preprocessing invariants.
void validate(const Dataset& data);

Dataset subset_rows(const Dataset& data, std::span<const std::size_t> rows);

struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;

  [[nodiscard]] std::vector<std::size_t> test_indices(int fold) const;
  [[nodiscard]] std::vector<std::size_t> train_indices(int fold) const;
  [[nodiscard]] std::vector<std::size_t> fold_sizes() const;
};

/// Shuffled round-robin assignment; fold sizes differ by at most one.
FoldPlan kfold_split(std::size_t n, int k, std::uint64_t seed);

/// 10 folds for n >= 100, otherwise 5.
int default_fold_count(std::size_t n) noexcept;

}  // namespace smp::ingest
