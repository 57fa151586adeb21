#include "smp/models/model.hpp"

#include "smp/error.hpp"
#include "smp/ga.hpp"
#include "smp/models/forest.hpp"
#include "smp/models/mars.hpp"
#include "smp/models/nn.hpp"
#include "smp/models/svr.hpp"
#include "smp/models/swr.hpp"
#include "smp/models/tree.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>

namespace smp::models {

namespace {

struct TechniqueName {
  Technique technique;
  std::string_view key;
  std::string_view label;
};

constexpr std::array<TechniqueName, 7> kNames{{
    {Technique::swr, "swr", "SWR"},
    {Technique::svr, "svr", "SVM"},
    {Technique::nn, "nn", "NN"},
    {Technique::mars, "mars", "MARS"},
    {Technique::cart, "cart", "CART"},
    {Technique::rf, "rf", "RF"},
    {Technique::garf, "garf", "GARF"},
}};

}  // namespace

std::string_view to_string(Technique t) noexcept {
  for (const auto& n : kNames) {
    if (n.technique == t) return n.key;
  }
  return "?";
}

std::string_view display_label(Technique t) noexcept {
  for (const auto& n : kNames) {
    if (n.technique == t) return n.label;
  }
  return "?";
}

Technique technique_from_string(std::string_view name) {
  for (const auto& n : kNames) {
    if (n.key == name) return n.technique;
  }
  if (name == "svm") return Technique::svr;
  throw ConfigError(fmt::format("unknown technique '{}' (expected swr, svr, nn, mars, cart, rf or garf)", name));
}

TrainedModel::TrainedModel(std::shared_ptr<const Predictor> predictor, TrainingInfo info, Json hyperparameters)
    : predictor_(std::move(predictor)), info_(std::move(info)), hyperparameters_(std::move(hyperparameters)) {
  if (!predictor_) throw ModelError("trained model without a predictor");
}

Vector TrainedModel::predict(const Matrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != info_.feature_count) {
    throw ModelError(fmt::format("{}: expected {} feature columns, got {}", to_string(technique()),
                                 info_.feature_count, x.cols()));
  }
  return predictor_->predict(x);
}

Json TrainedModel::to_json() const {
  return Json{{"schema_version", kSchemaVersion},
              {"technique", to_string(technique())},
              {"hyperparameters", hyperparameters_},
              {"feature_count", info_.feature_count},
              {"target_range", {info_.target_min, info_.target_max}},
              {"converged", info_.converged},
              {"parameters", predictor_->parameters()}};
}

TrainedModel TrainedModel::from_json(const Json& doc) {
  const int version = doc.at("schema_version").get<int>();
  if (version != kSchemaVersion) {
    throw ModelError(fmt::format("model document schema_version {} is not supported (expected {})", version,
                                 kSchemaVersion));
  }
  const auto technique = technique_from_string(doc.at("technique").get<std::string>());
  const auto& params = doc.at("parameters");
  std::shared_ptr<const Predictor> predictor;
  switch (technique) {
    case Technique::swr: predictor = SwrModel::load(params); break;
    case Technique::svr: predictor = SvrModel::load(params); break;
    case Technique::nn: predictor = NnModel::load(params); break;
    case Technique::mars: predictor = MarsModel::load(params); break;
    case Technique::cart: predictor = CartModel::load(params); break;
    case Technique::rf: predictor = ForestModel::load(params); break;
    case Technique::garf: predictor = ga::GarfModel::load(params); break;
  }
  TrainingInfo info;
  info.feature_count = doc.at("feature_count").get<std::size_t>();
  info.target_min = doc.at("target_range").at(0).get<double>();
  info.target_max = doc.at("target_range").at(1).get<double>();
  info.converged = doc.value("converged", true);
  return TrainedModel(std::move(predictor), std::move(info), doc.at("hyperparameters"));
}

TrainingInfo make_info(const Matrix& x, const Vector& y) {
  TrainingInfo info;
  info.feature_count = static_cast<std::size_t>(x.cols());
  info.target_min = y.minCoeff();
  info.target_max = y.maxCoeff();
  return info;
}

void check_training_data(const Matrix& x, const Vector& y, std::string_view who) {
  if (x.rows() == 0) throw ModelError(fmt::format("{}: no training instances", who));
  if (x.cols() == 0) throw ModelError(fmt::format("{}: no feature columns", who));
  if (x.rows() != y.size()) {
    throw ModelError(fmt::format("{}: {} feature rows but {} targets", who, x.rows(), y.size()));
  }
  if (!x.allFinite()) throw ModelError(fmt::format("{}: feature matrix contains non-finite values", who));
  if (!y.allFinite()) throw ModelError(fmt::format("{}: target contains non-finite values", who));
}

}  // namespace smp::models
