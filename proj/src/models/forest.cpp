#include "smp/models/forest.hpp"

#include "smp/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <numeric>

namespace smp::models {

namespace {

RegressionTree grow_one(const Matrix& x, const Vector& y, const RfParams& params, std::uint64_t seed,
                        std::size_t t) {
  const auto n = static_cast<std::size_t>(x.rows());
  Rng rng = Rng(seed).derive("tree", t);
  std::vector<std::size_t> rows(n);
  if (params.bootstrap) {
    for (auto& r : rows) r = rng.below(n);
    std::sort(rows.begin(), rows.end());
  } else {
    std::iota(rows.begin(), rows.end(), std::size_t{0});
  }
  TreeParams tp;
  tp.max_depth = params.max_depth;
  tp.min_samples_leaf = params.min_samples_leaf;
  tp.mtry = resolved_mtry(params, static_cast<std::size_t>(x.cols()));
  return RegressionTree::grow(x, y, rows, tp, rng);
}

}  // namespace

Vector ForestModel::predict(const Matrix& x) const {
  Vector out = Vector::Zero(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double sum = 0.0;
    for (const auto& tree : trees_) sum += tree.predict_row(x, i);
    out(i) = sum / static_cast<double>(trees_.size());
  }
  return out;
}

Json ForestModel::parameters() const {
  Json trees = Json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return Json{{"trees", trees}};
}

std::shared_ptr<const Predictor> ForestModel::load(const Json& params) {
  std::vector<RegressionTree> trees;
  for (const auto& t : params.at("trees")) trees.push_back(RegressionTree::from_json(t));
  if (trees.empty()) throw ModelError("rf: serialized forest has no trees");
  return std::make_shared<ForestModel>(std::move(trees));
}

void validate(const RfParams& p, std::size_t feature_count) {
  if (p.n_trees < 1) throw ConfigError("rf: n_trees must be >= 1");
  if (p.mtry < 0) throw ConfigError("rf: mtry must be >= 0 (0 = p/3)");
  if (feature_count > 0 && static_cast<std::size_t>(p.mtry) > feature_count) {
    throw ConfigError(fmt::format("rf: mtry={} exceeds the feature count {}", p.mtry, feature_count));
  }
  if (p.max_depth < 0) throw ConfigError("rf: max_depth must be >= 0 (0 = unlimited)");
  if (p.min_samples_leaf < 1) throw ConfigError("rf: min_samples_leaf must be >= 1");
}

Json to_json(const RfParams& p) {
  return Json{{"n_trees", p.n_trees},
              {"mtry", p.mtry},
              {"bootstrap", p.bootstrap},
              {"max_depth", p.max_depth},
              {"min_samples_leaf", p.min_samples_leaf}};
}

int resolved_mtry(const RfParams& p, std::size_t feature_count) noexcept {
  if (p.mtry > 0) return p.mtry;
  return std::max(1, static_cast<int>(feature_count / 3));
}

std::vector<RegressionTree> grow_forest_serial(const Matrix& x, const Vector& y, const RfParams& params,
                                               std::uint64_t seed) {
  std::vector<RegressionTree> trees;
  trees.reserve(static_cast<std::size_t>(params.n_trees));
  for (std::size_t t = 0; t < static_cast<std::size_t>(params.n_trees); ++t) {
    trees.push_back(grow_one(x, y, params, seed, t));
  }
  return trees;
}

std::vector<RegressionTree> grow_forest(const Matrix& x, const Vector& y, const RfParams& params,
                                        std::uint64_t seed, const Exec& exec) {
  if (exec.serial()) return grow_forest_serial(x, y, params, seed);
  std::vector<RegressionTree> trees(static_cast<std::size_t>(params.n_trees));
  parallel_for(trees.size(), exec, [&](std::size_t t) { trees[t] = grow_one(x, y, params, seed, t); });
  return trees;
}

TrainedModel fit_rf(const Matrix& x, const Vector& y, const RfParams& params, std::uint64_t seed,
                    const Exec& exec) {
  validate(params, static_cast<std::size_t>(x.cols()));
  check_training_data(x, y, "rf");
  const auto start = std::chrono::steady_clock::now();
  auto info = make_info(x, y);
  auto trees = grow_forest(x, y, params, seed, exec);
  info.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return TrainedModel(std::make_shared<ForestModel>(std::move(trees)), std::move(info), to_json(params));
}

}  // namespace smp::models
