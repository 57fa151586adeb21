#include "smp/cli/config.hpp"

#include "smp/error.hpp"
#include "smp/rng.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace smp::cli {

namespace fs = std::filesystem;

namespace {

Json scalar_to_json(const std::string& s) {
  if (s == "true" || s == "True" || s == "TRUE") return true;
  if (s == "false" || s == "False" || s == "FALSE") return false;
  if (s == "null" || s == "~" || s.empty()) return nullptr;
  {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  }
  {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  }
  {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  }
  return s;
}

Json node_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined: return nullptr;
    case YAML::NodeType::Scalar:
      // Quoted scalars stay strings.
      if (node.Tag() == "!") return node.Scalar();
      return scalar_to_json(node.Scalar());
    case YAML::NodeType::Sequence: {
      Json out = Json::array();
      for (const auto& item : node) out.push_back(node_to_json(item));
      return out;
    }
    case YAML::NodeType::Map: {
      Json out = Json::object();
      for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (out.contains(key)) throw ConfigError(fmt::format("config: duplicate key '{}'", key));
        out[key] = node_to_json(kv.second);
      }
      return out;
    }
  }
  return nullptr;
}

/// Reads keys out of one mapping and rejects anything left over.
class Section {
 public:
  Section(const Json& doc, std::string where) : doc_(doc), where_(std::move(where)) {
    if (!doc_.is_null() && !doc_.is_object()) throw ConfigError(fmt::format("config: {} must be a mapping", where_));
  }

  const Json* find(const std::string& key) {
    if (doc_.is_null()) return nullptr;
    used_.insert(key);
    const auto it = doc_.find(key);
    return it == doc_.end() || it->is_null() ? nullptr : &*it;
  }

  template <typename T>
  bool get(const std::string& key, T& out) {
    const Json* v = find(key);
    if (!v) return false;
    try {
      out = v->get<T>();
    } catch (const Json::exception&) {
      throw ConfigError(fmt::format("config: {}.{} has the wrong type", where_, key));
    }
    return true;
  }

  void finish() const {
    if (doc_.is_null()) return;
    for (const auto& [key, value] : doc_.items()) {
      if (!used_.count(key)) throw ConfigError(fmt::format("config: unknown key '{}' in {}", key, where_));
    }
  }

  [[nodiscard]] const std::string& where() const noexcept { return where_; }

 private:
  const Json& doc_;
  std::string where_;
  std::set<std::string> used_;
};

ingest::TargetScheme parse_target(const Json* node, const std::string& where) {
  if (!node) return ingest::ChangeColumn{};
  if (node->is_string()) {
    const auto s = node->get<std::string>();
    if (s == "change_column" || s == "change") return ingest::ChangeColumn{};
    if (s == "mi_from_columns" || s == "mi") return ingest::MiFromColumns{};
    throw ConfigError(fmt::format("config: {}.target '{}' is not change_column or mi_from_columns", where, s));
  }
  Section t(*node, where + ".target");
  std::string scheme = "change_column";
  t.get("scheme", scheme);
  if (scheme == "change_column" || scheme == "change") {
    ingest::ChangeColumn c;
    t.get("column", c.column);
    t.finish();
    return c;
  }
  if (scheme != "mi_from_columns" && scheme != "mi") {
    throw ConfigError(fmt::format("config: {}.target.scheme '{}' is not change_column or mi_from_columns", where, scheme));
  }
  ingest::MiFromColumns m;
  std::string variant(mi::to_string(m.variant));
  t.get("variant", variant);
  m.variant = mi::variant_from_string(variant);
  t.get("drop_invalid_rows", m.drop_invalid_rows);
  if (const Json* cols = t.find("columns")) {
    Section c(*cols, where + ".target.columns");
    c.get("volume", m.columns.volume);
    c.get("cyclomatic", m.columns.cyclomatic);
    c.get("loc", m.columns.loc);
    std::string comments;
    if (c.get("comments", comments)) m.columns.comments = comments;
    c.get("comments_scale", m.columns.comments_scale);
    c.finish();
  }
  t.finish();
  if (mi::needs_comments(m.variant) && !m.columns.comments) {
    throw ConfigError(fmt::format("config: {} uses MI variant {} which needs target.columns.comments", where,
                                  mi::to_string(m.variant)));
  }
  return m;
}

TechniqueEntry parse_technique(const Json& node, std::size_t index) {
  const std::string where = fmt::format("techniques[{}]", index);
  TechniqueEntry e;
  if (node.is_string()) {
    e.technique = models::technique_from_string(node.get<std::string>());
    return e;
  }
  Section s(node, where);
  std::string name;
  if (!s.get("name", name)) throw ConfigError(fmt::format("config: {} needs a name", where));
  e.technique = models::technique_from_string(name);
  if (const Json* p = s.find("params")) {
    if (!p->is_object()) throw ConfigError(fmt::format("config: {}.params must be a mapping", where));
    e.overrides = *p;
  }
  s.finish();
  return e;
}

CriterionEntry parse_criterion(const Json& node, std::size_t index) {
  const std::string where = fmt::format("topsis.criteria[{}]", index);
  CriterionEntry c;
  if (node.is_string()) {
    c.name = node.get<std::string>();
    c.direction = c.name == "r2" ? topsis::Direction::benefit : topsis::Direction::cost;
    return c;
  }
  Section s(node, where);
  if (!s.get("name", c.name)) throw ConfigError(fmt::format("config: {} needs a name", where));
  c.direction = c.name == "r2" ? topsis::Direction::benefit : topsis::Direction::cost;
  std::string dir;
  if (s.get("direction", dir)) c.direction = topsis::direction_from_string(dir);
  s.get("weight", c.weight);
  s.finish();
  return c;
}

Json target_json(const ingest::TargetScheme& scheme) {
  if (const auto* c = std::get_if<ingest::ChangeColumn>(&scheme)) {
    return Json{{"scheme", "change_column"}, {"column", c->column}};
  }
  const auto& m = std::get<ingest::MiFromColumns>(scheme);
  Json cols{{"volume", m.columns.volume},
            {"cyclomatic", m.columns.cyclomatic},
            {"loc", m.columns.loc},
            {"comments", m.columns.comments ? Json(*m.columns.comments) : Json(nullptr)},
            {"comments_scale", m.columns.comments_scale}};
  return Json{{"scheme", "mi_from_columns"},
              {"variant", mi::to_string(m.variant)},
              {"columns", cols},
              {"drop_invalid_rows", m.drop_invalid_rows}};
}

}  // namespace

std::vector<CriterionEntry> default_criteria() {
  return {{"mae", topsis::Direction::cost, 1.0}, {"rmse", topsis::Direction::cost, 1.0}, {"r2", topsis::Direction::benefit, 1.0}};
}

std::vector<models::Technique> default_techniques() {
  using models::Technique;
  return {Technique::swr, Technique::svr, Technique::nn, Technique::mars, Technique::garf, Technique::cart};
}

std::string_view to_string(Format f) noexcept {
  switch (f) {
    case Format::json: return "json";
    case Format::csv: return "csv";
    case Format::markdown: return "md";
  }
  return "?";
}

std::vector<Format> parse_formats(std::string_view list) {
  std::vector<Format> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto end = std::min(list.find(',', start), list.size());
    const auto item = list.substr(start, end - start);
    if (item == "json") {
      out.push_back(Format::json);
    } else if (item == "csv") {
      out.push_back(Format::csv);
    } else if (item == "md" || item == "markdown") {
      out.push_back(Format::markdown);
    } else if (!item.empty()) {
      throw ConfigError(fmt::format("unknown report format '{}' (expected json, csv or md)", item));
    }
    start = end + 1;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Json yaml_to_json(std::string_view yaml) {
  try {
    return node_to_json(YAML::Load(std::string(yaml)));
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("config: YAML error at line {}: {}", e.mark.line + 1, e.msg));
  }
}

RunConfig parse_config(std::string_view yaml, const fs::path& base_dir) {
  const Json doc = yaml_to_json(yaml);
  if (!doc.is_object()) throw ConfigError("config: top level must be a mapping");
  Section top(doc, "config");
  RunConfig cfg;

  int version = RunConfig::kVersion;
  top.get("version", version);
  if (version != RunConfig::kVersion) {
    throw ConfigError(fmt::format("config: version {} is not supported (expected {})", version, RunConfig::kVersion));
  }
  if (const Json* s = top.find("seed")) {
    if (!s->is_number_integer() || (s->is_number_integer() && !s->is_number_unsigned() && s->get<std::int64_t>() < 0)) {
      throw ConfigError("config: seed must be a non-negative integer");
    }
    cfg.seed = s->get<std::uint64_t>();
  }
  top.get("jobs", cfg.jobs);
  std::string output;
  if (top.get("output", output)) cfg.output = output;
  if (const Json* cv = top.find("cv")) {
    Section s(*cv, "cv");
    if (const Json* folds = s.find("folds")) {
      if (folds->is_string() && folds->get<std::string>() == "auto") {
        cfg.folds.reset();
      } else if (folds->is_number_integer()) {
        cfg.folds = folds->get<int>();
      } else {
        throw ConfigError("config: cv.folds must be an integer or 'auto'");
      }
    }
    s.finish();
  }
  if (const Json* pre = top.find("preprocess")) {
    Section s(*pre, "preprocess");
    s.get("drop_missing", cfg.preprocess.drop_missing);
    s.get("minmax_normalize", cfg.preprocess.minmax_normalize);
    s.get("drop_zero_variance", cfg.preprocess.drop_zero_variance);
    s.finish();
  }

  const Json* datasets = top.find("datasets");
  if (!datasets || !datasets->is_array()) throw ConfigError("config: datasets must be a list");
  std::set<std::string> names;
  for (std::size_t i = 0; i < datasets->size(); ++i) {
    const std::string where = fmt::format("datasets[{}]", i);
    Section s(datasets->at(i), where);
    DatasetEntry d;
    if (!s.get("path", d.path_text)) throw ConfigError(fmt::format("config: {} needs a path", where));
    d.path = fs::path(d.path_text).is_absolute() ? fs::path(d.path_text) : base_dir / d.path_text;
    d.name = fs::path(d.path_text).stem().string();
    s.get("name", d.name);
    std::string format;
    d.format = s.get("format", format) ? ingest::format_from_string(format) : ingest::format_from_path(d.path);
    d.target = parse_target(s.find("target"), where);
    s.finish();
    if (!names.insert(d.name).second) throw ConfigError(fmt::format("config: duplicate dataset name '{}'", d.name));
    if (!fs::is_regular_file(d.path)) {
      throw ConfigError(fmt::format("config: {} path '{}' does not exist", where, d.path.string()));
    }
    cfg.datasets.push_back(std::move(d));
  }

  if (const Json* techniques = top.find("techniques")) {
    if (!techniques->is_array()) throw ConfigError("config: techniques must be a list");
    for (std::size_t i = 0; i < techniques->size(); ++i) cfg.techniques.push_back(parse_technique(techniques->at(i), i));
  } else {
    for (auto t : default_techniques()) cfg.techniques.push_back({t, Json::object()});
  }

  cfg.criteria = default_criteria();
  if (const Json* t = top.find("topsis")) {
    Section s(*t, "topsis");
    if (const Json* criteria = s.find("criteria")) {
      if (!criteria->is_array()) throw ConfigError("config: topsis.criteria must be a list");
      cfg.criteria.clear();
      for (std::size_t i = 0; i < criteria->size(); ++i) cfg.criteria.push_back(parse_criterion(criteria->at(i), i));
    }
    s.finish();
  }
  if (const Json* f = top.find("formats")) {
    if (!f->is_array()) throw ConfigError("config: formats must be a list");
    std::string joined;
    for (const auto& item : *f) joined += item.get<std::string>() + ",";
    cfg.formats = parse_formats(joined);
  }
  top.finish();
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("config: cannot read '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

void validate(const RunConfig& cfg) {
  if (!cfg.seed) throw ConfigError("config: a seed is required (set `seed:` or pass --seed)");
  if (cfg.jobs < 1) throw ConfigError("config: jobs must be >= 1");
  if (cfg.folds && *cfg.folds < 2) throw ConfigError("config: cv.folds must be >= 2");
  if (cfg.datasets.empty()) throw ConfigError("config: no datasets listed");
  if (cfg.techniques.empty()) throw ConfigError("config: technique list is empty");
  std::set<models::Technique> seen;
  for (const auto& t : cfg.techniques) {
    if (!seen.insert(t.technique).second) {
      throw ConfigError(fmt::format("config: technique '{}' is listed twice", models::to_string(t.technique)));
    }
    (void)technique_spec(cfg, t);
  }
  if (cfg.criteria.empty()) throw ConfigError("config: topsis.criteria is empty");
  std::set<std::string> crit;
  for (const auto& c : cfg.criteria) {
    if (c.name != "mae" && c.name != "mae_rel" && c.name != "rmse" && c.name != "r2") {
      throw ConfigError(fmt::format("config: unknown criterion '{}' (expected mae, mae_rel, rmse or r2)", c.name));
    }
    if (!crit.insert(c.name).second) throw ConfigError(fmt::format("config: criterion '{}' is listed twice", c.name));
    if (!(c.weight > 0.0)) throw ConfigError(fmt::format("config: criterion '{}' needs a positive weight", c.name));
  }
}

models::RegressorSpec technique_spec(const RunConfig& cfg, const TechniqueEntry& entry) {
  const std::uint64_t run_seed = cfg.seed.value_or(0);
  const std::uint64_t seed = Rng(run_seed).derive(fmt::format("technique:{}", models::to_string(entry.technique))).next();
  return models::make_spec(entry.technique, entry.overrides, seed);
}

Json echo(const RunConfig& cfg) {
  Json datasets = Json::array();
  for (const auto& d : cfg.datasets) {
    datasets.push_back(
        {{"name", d.name}, {"path", d.path_text}, {"format", ingest::to_string(d.format)}, {"target", target_json(d.target)}});
  }
  Json techniques = Json::array();
  for (const auto& t : cfg.techniques) {
    const auto spec = technique_spec(cfg, t);
    techniques.push_back({{"name", models::to_string(t.technique)},
                          {"label", models::display_label(t.technique)},
                          {"params", models::params_to_json(spec)},
                          {"seed", spec.seed}});
  }
  Json criteria = Json::array();
  double total = 0.0;
  for (const auto& c : cfg.criteria) total += c.weight;
  for (const auto& c : cfg.criteria) {
    criteria.push_back({{"name", c.name}, {"direction", topsis::to_string(c.direction)}, {"weight", c.weight / total}});
  }
  Json formats = Json::array();
  for (auto f : cfg.formats) formats.push_back(to_string(f));
  return Json{{"version", RunConfig::kVersion},
              {"seed", cfg.seed.value_or(0)},
              {"cv", {{"folds", cfg.folds ? Json(*cfg.folds) : Json("auto")}}},
              {"preprocess",
               {{"drop_missing", cfg.preprocess.drop_missing},
                {"minmax_normalize", cfg.preprocess.minmax_normalize},
                {"drop_zero_variance", cfg.preprocess.drop_zero_variance}}},
              {"datasets", datasets},
              {"techniques", techniques},
              {"topsis", {{"criteria", criteria}}},
              {"formats", formats}};
}

}  // namespace smp::cli
