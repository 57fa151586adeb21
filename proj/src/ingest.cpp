#include "smp/ingest.hpp"

#include "smp/error.hpp"
#include "smp/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace smp::ingest {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
    return std::string(s.substr(1, s.size() - 2));
  }
  return std::string(s);
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

/// Splits a comma-separated record, honouring single and double quotes.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) {
        if (quote == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quote = 0;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == ',') {
      out.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.emplace_back(trim(cur));
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

bool is_missing_token(std::string_view s) { return s.empty() || s == "?" || s == "NA"; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw DataError(fmt::format("error reading '{}'", path.string()));
  return ss.str();
}

double cell_as_number(const Cell& cell, const Column& column) {
  if (std::holds_alternative<std::monostate>(cell)) return kMissing;
  if (const auto* v = std::get_if<double>(&cell)) return *v;
  const auto& text = std::get<std::string>(cell);
  const auto it = std::find(column.categories.begin(), column.categories.end(), text);
  return static_cast<double>(it - column.categories.begin());
}

void require_numeric(const RawTable& raw, std::size_t col, std::string_view role) {
  if (raw.columns[col].kind != ColumnKind::numeric) {
    throw DataError(fmt::format("{} column '{}' in '{}' is nominal; a numeric column is required", role,
                                raw.columns[col].name, raw.name));
  }
}

std::size_t require_column(const RawTable& raw, std::string_view name, std::string_view role) {
  const auto idx = raw.find_column(name);
  if (!idx) throw DataError(fmt::format("{} column '{}' not found in '{}'", role, name, raw.name));
  require_numeric(raw, *idx, role);
  return *idx;
}

}  // namespace

std::optional<std::size_t> RawTable::find_column(std::string_view column) const {
  const auto wanted = lower(column);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (lower(columns[i].name) == wanted) return i;
  }
  return std::nullopt;
}

TableFormat format_from_string(std::string_view name) {
  const auto s = lower(name);
  if (s == "arff") return TableFormat::arff;
  if (s == "csv") return TableFormat::csv;
  throw ConfigError(fmt::format("unknown table format '{}' (expected arff or csv)", name));
}

TableFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = lower(path.extension().string());
  if (ext == ".arff") return TableFormat::arff;
  if (ext == ".csv") return TableFormat::csv;
  throw ConfigError(fmt::format("cannot infer table format from '{}'", path.string()));
}

std::string_view to_string(TableFormat f) noexcept { return f == TableFormat::arff ? "arff" : "csv"; }

std::string_view to_string(TargetKind k) noexcept { return k == TargetKind::change ? "CHANGE" : "MI"; }

RawTable parse_arff(std::string_view text, std::string fallback_name) {
  RawTable table;
  table.name = std::move(fallback_name);
  bool in_data = false;
  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto line_no = ln + 1;
    const auto line = trim(lines[ln]);
    if (line.empty() || line.front() == '%') continue;
    if (!in_data) {
      if (line.front() != '@') {
        throw DataError(fmt::format("{}: line {}: expected an @-directive before @data", table.name, line_no));
      }
      if (starts_with_ci(line, "@relation")) {
        const auto rest = trim(line.substr(9));
        if (!rest.empty()) table.name = unquote(rest);
      } else if (starts_with_ci(line, "@attribute")) {
        auto rest = trim(line.substr(10));
        if (rest.empty()) throw DataError(fmt::format("{}: line {}: @attribute without a name", table.name, line_no));
        std::string name;
        std::string_view type;
        if (rest.front() == '\'' || rest.front() == '"') {
          const auto close = rest.find(rest.front(), 1);
          if (close == std::string_view::npos) {
            throw DataError(fmt::format("{}: line {}: unterminated attribute name", table.name, line_no));
          }
          name = std::string(rest.substr(1, close - 1));
          type = trim(rest.substr(close + 1));
        } else {
          const auto ws = rest.find_first_of(" \t");
          if (ws == std::string_view::npos) {
            throw DataError(fmt::format("{}: line {}: attribute '{}' has no type", table.name, line_no, rest));
          }
          name = std::string(rest.substr(0, ws));
          type = trim(rest.substr(ws));
        }
        Column col{name, ColumnKind::numeric, {}};
        if (!type.empty() && type.front() == '{') {
          const auto close = type.rfind('}');
          if (close == std::string_view::npos) {
            throw DataError(fmt::format("{}: line {}: unterminated nominal set", table.name, line_no));
          }
          col.kind = ColumnKind::nominal;
          for (auto& v : split_record(type.substr(1, close - 1))) {
            if (!v.empty()) col.categories.push_back(std::move(v));
          }
        } else {
          const auto t = lower(type);
          if (t != "numeric" && t != "real" && t != "integer") {
            throw DataError(fmt::format("{}: line {}: unsupported attribute type '{}'", table.name, line_no, type));
          }
        }
        table.columns.push_back(std::move(col));
      } else if (starts_with_ci(line, "@data")) {
        if (table.columns.empty()) {
          throw DataError(fmt::format("{}: line {}: @data before any @attribute", table.name, line_no));
        }
        in_data = true;
      } else {
        throw DataError(fmt::format("{}: line {}: unknown directive '{}'", table.name, line_no, line));
      }
      continue;
    }
    if (line.front() == '{') {
      throw DataError(fmt::format("{}: line {}: sparse ARFF rows are not supported", table.name, line_no));
    }
    const auto fields = split_record(line);
    if (fields.size() != table.columns.size()) {
      throw DataError(fmt::format("{}: line {}: expected {} values, found {}", table.name, line_no,
                                  table.columns.size(), fields.size()));
    }
    std::vector<Cell> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto& f = fields[c];
      const auto& col = table.columns[c];
      if (f == "?") {
        row.emplace_back(std::monostate{});
      } else if (col.kind == ColumnKind::numeric) {
        const auto v = parse_number(f);
        if (!v) {
          throw DataError(fmt::format("{}: line {}: cannot parse '{}' as a number in column '{}'", table.name,
                                      line_no, f, col.name));
        }
        row.emplace_back(*v);
      } else {
        if (std::find(col.categories.begin(), col.categories.end(), f) == col.categories.end()) {
          throw DataError(fmt::format("{}: line {}: value '{}' is not declared for nominal column '{}'", table.name,
                                      line_no, f, col.name));
        }
        row.emplace_back(f);
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (!in_data) throw DataError(fmt::format("{}: missing @data section", table.name));
  return table;
}

RawTable parse_csv(std::string_view text, std::string name) {
  RawTable table;
  table.name = std::move(name);
  const auto lines = split_lines(text);
  std::size_t ln = 0;
  while (ln < lines.size() && trim(lines[ln]).empty()) ++ln;
  if (ln == lines.size()) throw DataError(fmt::format("{}: empty CSV file (header row required)", table.name));
  for (auto& h : split_record(trim(lines[ln]))) {
    if (h.empty()) throw DataError(fmt::format("{}: line {}: empty column name in header", table.name, ln + 1));
    table.columns.push_back(Column{h, ColumnKind::numeric, {}});
  }
  ++ln;

  std::vector<std::vector<std::string>> text_rows;
  for (; ln < lines.size(); ++ln) {
    const auto line = trim(lines[ln]);
    if (line.empty()) continue;
    auto fields = split_record(line);
    if (fields.size() != table.columns.size()) {
      throw DataError(fmt::format("{}: line {}: expected {} values, found {}", table.name, ln + 1,
                                  table.columns.size(), fields.size()));
    }
    text_rows.push_back(std::move(fields));
  }

  // A column is numeric when every present cell parses as a number.
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    std::set<std::string> values;
    bool numeric = true;
    for (const auto& r : text_rows) {
      if (is_missing_token(r[c])) continue;
      if (!parse_number(r[c])) numeric = false;
      values.insert(r[c]);
    }
    if (!numeric) {
      table.columns[c].kind = ColumnKind::nominal;
      table.columns[c].categories.assign(values.begin(), values.end());
    }
  }
  table.rows.reserve(text_rows.size());
  for (const auto& r : text_rows) {
    std::vector<Cell> row;
    row.reserve(r.size());
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (is_missing_token(r[c])) {
        row.emplace_back(std::monostate{});
      } else if (table.columns[c].kind == ColumnKind::numeric) {
        row.emplace_back(*parse_number(r[c]));
      } else {
        row.emplace_back(r[c]);
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

RawTable load_table(const std::filesystem::path& path, TableFormat format) {
  const auto text = read_file(path);
  const auto stem = path.stem().string();
  return format == TableFormat::arff ? parse_arff(text, stem) : parse_csv(text, stem);
}

Dataset resolve_target(const RawTable& raw, const TargetScheme& scheme) {
  Dataset out;
  out.name = raw.name;
  const auto n = raw.rows.size();
  std::vector<std::size_t> excluded;
  std::vector<double> target(n, kMissing);
  std::vector<bool> keep(n, true);

  if (const auto* change = std::get_if<ChangeColumn>(&scheme)) {
    const auto col = require_column(raw, change->column, "target");
    excluded.push_back(col);
    for (std::size_t i = 0; i < n; ++i) target[i] = cell_as_number(raw.rows[i][col], raw.columns[col]);
    out.target_kind = TargetKind::change;
  } else {
    const auto& spec = std::get<MiFromColumns>(scheme);
    const auto v = require_column(raw, spec.columns.volume, "Halstead volume");
    const auto g = require_column(raw, spec.columns.cyclomatic, "cyclomatic complexity");
    const auto l = require_column(raw, spec.columns.loc, "lines of code");
    excluded = {v, g, l};
    std::optional<std::size_t> c;
    if (spec.columns.comments) {
      c = require_column(raw, *spec.columns.comments, "comment fraction");
      excluded.push_back(*c);
    } else if (mi::needs_comments(spec.variant)) {
      throw DataError(fmt::format("MI variant '{}' needs a comment column; none configured for '{}'",
                                  mi::to_string(spec.variant), raw.name));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto& row = raw.rows[i];
      mi::Inputs in;
      in.volume = cell_as_number(row[v], raw.columns[v]);
      in.cyclomatic = cell_as_number(row[g], raw.columns[g]);
      in.loc = cell_as_number(row[l], raw.columns[l]);
      bool missing = std::isnan(in.volume) || std::isnan(in.cyclomatic) || std::isnan(in.loc);
      if (c) {
        const double cv = cell_as_number(row[*c], raw.columns[*c]);
        missing = missing || std::isnan(cv);
        in.comment_fraction = cv * spec.columns.comments_scale;
      }
      if (missing) continue;  // target stays NaN; preprocess logs the drop
      try {
        target[i] = mi::compute(in, spec.variant).value;
      } catch (const DomainError& e) {
        if (!spec.drop_invalid_rows) {
          throw DomainError(fmt::format("{}: row {}: {}", raw.name, i, e.what()));
        }
        keep[i] = false;
        out.provenance.push_back(fmt::format("DROP_ROW {} mi_domain", i));
      }
    }
    out.target_kind = TargetKind::mi;
  }

  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < raw.columns.size(); ++c) {
    if (std::find(excluded.begin(), excluded.end(), c) == excluded.end()) feature_cols.push_back(c);
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) rows.push_back(i);
  }
  out.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(feature_cols.size()));
  out.target.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = raw.rows[rows[r]];
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      const auto c = feature_cols[j];
      out.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = cell_as_number(row[c], raw.columns[c]);
    }
    out.target(static_cast<Eigen::Index>(r)) = target[rows[r]];
  }
  for (auto c : feature_cols) out.feature_names.push_back(raw.columns[c].name);
  out.row_ids = std::move(rows);
  return out;
}

Dataset preprocess(Dataset data, const PreprocessOptions& options) {
  const auto n = data.instances();
  const auto p = data.width();

  // Rows: a missing target is never usable; missing features follow the option.
  std::vector<std::size_t> keep_rows;
  bool has_missing_feature = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (std::isnan(data.target(ii))) {
      data.provenance.push_back(fmt::format("DROP_ROW {} missing_target", data.row_ids[i]));
      continue;
    }
    const bool row_missing = data.features.row(ii).array().isNaN().any();
    if (row_missing && options.drop_missing) {
      data.provenance.push_back(fmt::format("DROP_ROW {} missing", data.row_ids[i]));
      continue;
    }
    has_missing_feature = has_missing_feature || row_missing;
    keep_rows.push_back(i);
  }
  if (keep_rows.empty()) throw DataError(fmt::format("{}: preprocessing removed every row", data.name));
  if (has_missing_feature) {
    throw DataError(fmt::format("{}: missing feature values remain and drop_missing is disabled", data.name));
  }

  Matrix x = take_rows(data.features, keep_rows);
  // Constant columns carry no signal and cannot be min-max scaled.
  std::vector<std::size_t> keep_cols;
  for (std::size_t j = 0; j < p; ++j) {
    const auto col = x.col(static_cast<Eigen::Index>(j));
    const bool constant = col.maxCoeff() == col.minCoeff();
    if (constant && (options.drop_zero_variance || options.minmax_normalize)) {
      data.provenance.push_back(fmt::format("DROP_COL {} zero_variance", data.feature_names[j]));
      continue;
    }
    keep_cols.push_back(j);
  }
  if (keep_cols.empty()) throw DataError(fmt::format("{}: preprocessing removed every feature column", data.name));

  Dataset out;
  out.name = data.name;
  out.target_kind = data.target_kind;
  out.features = take_cols(x, keep_cols);
  out.target = take_rows(data.target, keep_rows);
  for (auto j : keep_cols) out.feature_names.push_back(data.feature_names[j]);
  for (auto i : keep_rows) out.row_ids.push_back(data.row_ids[i]);
  out.provenance = std::move(data.provenance);

  if (options.minmax_normalize) {
    for (Eigen::Index j = 0; j < out.features.cols(); ++j) {
      auto col = out.features.col(j);
      const double lo = col.minCoeff();
      const double span = col.maxCoeff() - lo;
      col = (col.array() - lo) / span;
    }
  }
  validate(out);
  return out;
}

void validate(const Dataset& data) {
  if (data.instances() < 2) {
    throw DataError(fmt::format("{}: at least 2 instances are required (got {})", data.name, data.instances()));
  }
  if (data.width() == 0) throw DataError(fmt::format("{}: no feature columns", data.name));
  if (static_cast<std::size_t>(data.target.size()) != data.instances() || data.feature_names.size() != data.width()) {
    throw DataError(fmt::format("{}: inconsistent dataset shape", data.name));
  }
  if (!data.features.allFinite() || !data.target.allFinite()) {
    throw DataError(fmt::format("{}: non-finite values present", data.name));
  }
}

Dataset subset_rows(const Dataset& data, std::span<const std::size_t> rows) {
  Dataset out;
  out.name = data.name;
  out.features = take_rows(data.features, rows);
  out.target = take_rows(data.target, rows);
  out.feature_names = data.feature_names;
  out.target_kind = data.target_kind;
  for (auto r : rows) out.row_ids.push_back(data.row_ids.empty() ? r : data.row_ids[r]);
  return out;
}

std::vector<std::size_t> FoldPlan::test_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int a : assignments) ++sizes[static_cast<std::size_t>(a)];
  return sizes;
}

FoldPlan kfold_split(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError(fmt::format("fold count must be at least 2 (got {})", k));
  if (static_cast<std::size_t>(k) > n) {
    throw ConfigError(fmt::format("fold count {} exceeds the number of instances {}", k, n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  FoldPlan plan;
  plan.k = k;
  plan.assignments.assign(n, 0);
  for (std::size_t pos = 0; pos < n; ++pos) plan.assignments[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
  return plan;
}

int default_fold_count(std::size_t n) noexcept {
  const int k = n >= 100 ? 10 : 5;
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(k), n));
}

}  // namespace smp::ingest
