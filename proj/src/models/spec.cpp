#include "smp/models/spec.hpp"

#include "smp/error.hpp"

#include <fmt/format.h>

#include <set>
#include <string>

namespace smp::models {

namespace {

/// Pulls typed values out of an override object and rejects leftovers.
class Overrides {
 public:
  Overrides(const Json& doc, std::string_view who) : doc_(doc), who_(who) {
    if (!doc_.is_null() && !doc_.is_object()) {
      throw ConfigError(fmt::format("{}: hyperparameters must be a mapping", who_));
    }
  }

  template <typename T>
  void get(std::string_view key, T& out) {
    if (doc_.is_null()) return;
    const auto it = doc_.find(std::string(key));
    if (it == doc_.end()) return;
    used_.insert(std::string(key));
    try {
      out = it->template get<T>();
    } catch (const Json::exception&) {
      throw ConfigError(fmt::format("{}: hyperparameter '{}' has the wrong type", who_, key));
    }
  }

  void get_string(std::string_view key, std::string& out) { get(key, out); }

  [[nodiscard]] const Json* sub(std::string_view key) {
    if (doc_.is_null()) return nullptr;
    const auto it = doc_.find(std::string(key));
    if (it == doc_.end()) return nullptr;
    used_.insert(std::string(key));
    return &*it;
  }

  void finish() const {
    if (doc_.is_null()) return;
    for (const auto& [key, value] : doc_.items()) {
      if (!used_.count(key)) throw ConfigError(fmt::format("{}: unknown hyperparameter '{}'", who_, key));
    }
  }

 private:
  const Json& doc_;
  std::string_view who_;
  std::set<std::string> used_;
};

void read_range(const Json* node, std::string_view name, int& lo, int& hi) {
  if (!node) return;
  if (!node->is_array() || node->size() != 2) {
    throw ConfigError(fmt::format("garf: bounds.{} must be a [min, max] pair", name));
  }
  lo = node->at(0).get<int>();
  hi = node->at(1).get<int>();
}

TechniqueParams parse(Technique technique, const Json& doc) {
  const std::string who(to_string(technique));
  Overrides o(doc, who);
  switch (technique) {
    case Technique::swr: {
      SwrParams p;
      o.get("alpha_enter", p.alpha_enter);
      o.get("max_features", p.max_features);
      o.finish();
      return p;
    }
    case Technique::svr: {
      SvrParams p;
      o.get("C", p.c);
      o.get("c", p.c);
      o.get("epsilon", p.epsilon);
      std::string kernel(to_string(p.kernel));
      o.get_string("kernel", kernel);
      p.kernel = kernel_from_string(kernel);
      o.get("gamma", p.gamma);
      o.get("tol", p.tol);
      o.get("max_iter", p.max_iter);
      o.get("standardize_target", p.standardize_target);
      o.finish();
      return p;
    }
    case Technique::nn: {
      NnParams p;
      o.get("hidden_units", p.hidden_units);
      std::string act(to_string(p.activation));
      o.get_string("activation", act);
      p.activation = activation_from_string(act);
      o.get("learning_rate", p.learning_rate);
      o.get("momentum", p.momentum);
      o.get("epochs", p.epochs);
      o.get("batch", p.batch);
      o.finish();
      return p;
    }
    case Technique::mars: {
      MarsParams p;
      o.get("max_terms", p.max_terms);
      o.get("max_interaction", p.max_interaction);
      o.get("penalty", p.penalty);
      o.get("max_knots", p.max_knots);
      o.finish();
      return p;
    }
    case Technique::cart: {
      CartParams p;
      o.get("max_depth", p.max_depth);
      o.get("min_samples_leaf", p.min_samples_leaf);
      o.finish();
      return p;
    }
    case Technique::rf: {
      RfParams p;
      o.get("n_trees", p.n_trees);
      o.get("mtry", p.mtry);
      o.get("bootstrap", p.bootstrap);
      o.get("max_depth", p.max_depth);
      o.get("min_samples_leaf", p.min_samples_leaf);
      o.finish();
      return p;
    }
    case Technique::garf: {
      ga::GaConfig p;
      o.get("population_size", p.population_size);
      o.get("max_generations", p.max_generations);
      if (const Json* tb = o.sub("time_budget"); tb && !tb->is_null()) p.time_budget = tb->get<double>();
      o.get("crossover_rate", p.crossover_rate);
      o.get("mutation_rate", p.mutation_rate);
      o.get("elitism_count", p.elitism_count);
      o.get("tournament_size", p.tournament_size);
      o.get("cv_folds", p.cv_folds);
      if (const Json* b = o.sub("bounds")) {
        Overrides ob(*b, "garf.bounds");
        read_range(ob.sub("n_trees"), "n_trees", p.bounds.trees_min, p.bounds.trees_max);
        read_range(ob.sub("max_depth"), "max_depth", p.bounds.depth_min, p.bounds.depth_max);
        read_range(ob.sub("min_samples_leaf"), "min_samples_leaf", p.bounds.leaf_min, p.bounds.leaf_max);
        ob.finish();
      }
      o.finish();
      return p;
    }
  }
  throw ConfigError("unsupported technique");
}

}  // namespace

RegressorSpec default_spec(Technique technique, std::uint64_t seed) { return make_spec(technique, Json(), seed); }

RegressorSpec make_spec(Technique technique, const Json& overrides, std::uint64_t seed) {
  RegressorSpec spec{technique, parse(technique, overrides), seed};
  if (auto* g = std::get_if<ga::GaConfig>(&spec.params)) g->seed = seed;
  validate(spec);
  return spec;
}

Json params_to_json(const RegressorSpec& spec) {
  return std::visit(
      [](const auto& p) -> Json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CartParams>) {
          return cart_to_json(p);
        } else if constexpr (std::is_same_v<T, ga::GaConfig>) {
          return ga::to_json(p);
        } else {
          return to_json(p);
        }
      },
      spec.params);
}

void validate(const RegressorSpec& spec) {
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CartParams>) {
          if (spec.technique != Technique::cart) throw ConfigError("spec: tree parameters given for a non-cart technique");
          validate_cart(p);
        } else if constexpr (std::is_same_v<T, RfParams>) {
          if (spec.technique != Technique::rf) throw ConfigError("spec: forest parameters given for a non-rf technique");
          validate(p, 0);
        } else if constexpr (std::is_same_v<T, ga::GaConfig>) {
          if (spec.technique != Technique::garf) throw ConfigError("spec: GA parameters given for a non-garf technique");
          ga::validate(p);
        } else {
          validate(p);
        }
      },
      spec.params);
}

TrainedModel fit(const RegressorSpec& spec, const Matrix& x, const Vector& y, const Exec& exec) {
  switch (spec.technique) {
    case Technique::swr: return fit_swr(x, y, std::get<SwrParams>(spec.params));
    case Technique::svr: return fit_svr(x, y, std::get<SvrParams>(spec.params));
    case Technique::nn: return fit_nn(x, y, std::get<NnParams>(spec.params), spec.seed);
    case Technique::mars: return fit_mars(x, y, std::get<MarsParams>(spec.params));
    case Technique::cart: return fit_cart(x, y, std::get<CartParams>(spec.params));
    case Technique::rf: return fit_rf(x, y, std::get<RfParams>(spec.params), spec.seed, exec);
    case Technique::garf: {
      auto cfg = std::get<ga::GaConfig>(spec.params);
      cfg.seed = spec.seed;
      return ga::run_garf(x, y, cfg, exec).model;
    }
  }
  throw ConfigError("unsupported technique");
}

}  // namespace smp::models
