#include "smp/models/tree.hpp"

#include "smp/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <utility>

namespace smp::models {

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = -std::numeric_limits<double>::infinity();
};

struct Pending {
  int node;
  std::vector<std::size_t> rows;
  int depth;
};

class Grower {
 public:
  Grower(const Matrix& x, const Vector& y, const TreeParams& params, Rng& rng)
      : x_(x), y_(y), params_(params), rng_(rng), p_(static_cast<std::size_t>(x.cols())) {
    all_features_.resize(p_);
    std::iota(all_features_.begin(), all_features_.end(), std::size_t{0});
  }

  std::vector<RegressionTree::Node> run(std::span<const std::size_t> rows) {
    std::vector<RegressionTree::Node> nodes(1);
    std::vector<Pending> stack;
    stack.push_back({0, std::vector<std::size_t>(rows.begin(), rows.end()), 0});
    while (!stack.empty()) {
      Pending item = std::move(stack.back());
      stack.pop_back();
      auto& node = nodes[static_cast<std::size_t>(item.node)];
      node.samples = item.rows.size();
      double sum = 0.0;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (auto r : item.rows) {
        const double v = y_(static_cast<Eigen::Index>(r));
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      node.value = sum / static_cast<double>(item.rows.size());

      const auto min_leaf = static_cast<std::size_t>(std::max(1, params_.min_samples_leaf));
      const bool depth_ok = params_.max_depth <= 0 || item.depth < params_.max_depth;
      if (!depth_ok || item.rows.size() < 2 * min_leaf || lo == hi) continue;

      const Split split = best_split(item.rows, sum, min_leaf);
      if (split.feature < 0) continue;

      std::vector<std::size_t> left;
      std::vector<std::size_t> right;
      for (auto r : item.rows) {
        (x_(static_cast<Eigen::Index>(r), split.feature) <= split.threshold ? left : right).push_back(r);
      }
      const int left_id = static_cast<int>(nodes.size());
      const int right_id = left_id + 1;
      nodes.resize(nodes.size() + 2);
      auto& parent = nodes[static_cast<std::size_t>(item.node)];
      parent.feature = split.feature;
      parent.threshold = split.threshold;
      parent.left = left_id;
      parent.right = right_id;
      stack.push_back({right_id, std::move(right), item.depth + 1});
      stack.push_back({left_id, std::move(left), item.depth + 1});
    }
    return nodes;
  }

 private:
  Split best_split(const std::vector<std::size_t>& rows, double total, std::size_t min_leaf) {
    const std::size_t n = rows.size();
    const auto mtry = static_cast<std::size_t>(params_.mtry);
    const std::vector<std::size_t> features =
        (mtry == 0 || mtry >= p_) ? all_features_ : rng_.sample_indices(p_, mtry);

    Split best;
    const double parent_score = total * total / static_cast<double>(n);
    pairs_.resize(n);
    for (auto f : features) {
      const auto fi = static_cast<Eigen::Index>(f);
      for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(rows[i]);
        pairs_[i] = {x_(r, fi), y_(r)};
      }
      std::stable_sort(pairs_.begin(), pairs_.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      double left_sum = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        left_sum += pairs_[i - 1].second;
        if (!(pairs_[i - 1].first < pairs_[i].first)) continue;
        if (i < min_leaf || n - i < min_leaf) continue;
        const double right_sum = total - left_sum;
        const double score = left_sum * left_sum / static_cast<double>(i) +
                             right_sum * right_sum / static_cast<double>(n - i);
        if (score > best.score) {
          best.score = score;
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (pairs_[i - 1].first + pairs_[i].first);
        }
      }
    }
    if (best.feature >= 0 && !(best.score > parent_score)) best.feature = -1;
    return best;
  }

  const Matrix& x_;
  const Vector& y_;
  const TreeParams& params_;
  Rng& rng_;
  std::size_t p_;
  std::vector<std::size_t> all_features_;
  std::vector<std::pair<double, double>> pairs_;
};

}  // namespace

RegressionTree RegressionTree::grow(const Matrix& x, const Vector& y, std::span<const std::size_t> rows,
                                    const TreeParams& params, Rng& rng) {
  if (rows.empty()) throw ModelError("tree: cannot grow on an empty sample");
  RegressionTree tree;
  tree.nodes_ = Grower(x, y, params, rng).run(rows);
  return tree;
}

double RegressionTree::predict_row(const Matrix& x, Eigen::Index row) const {
  std::size_t at = 0;
  while (nodes_[at].feature >= 0) {
    const auto& n = nodes_[at];
    at = static_cast<std::size_t>(x(row, n.feature) <= n.threshold ? n.left : n.right);
  }
  return nodes_[at].value;
}

std::size_t RegressionTree::depth() const {
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    const auto [at, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const auto& n = nodes_[at];
    if (n.feature >= 0) {
      stack.emplace_back(static_cast<std::size_t>(n.left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(n.right), d + 1);
    }
  }
  return deepest;
}

Json RegressionTree::to_json() const {
  Json feature = Json::array(), threshold = Json::array(), left = Json::array(), right = Json::array(),
       value = Json::array(), samples = Json::array();
  for (const auto& n : nodes_) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
    samples.push_back(n.samples);
  }
  return Json{{"feature", feature}, {"threshold", threshold}, {"left", left},
              {"right", right},     {"value", value},         {"samples", samples}};
}

RegressionTree RegressionTree::from_json(const Json& doc) {
  RegressionTree tree;
  const auto& feature = doc.at("feature");
  tree.nodes_.resize(feature.size());
  for (std::size_t i = 0; i < feature.size(); ++i) {
    auto& n = tree.nodes_[i];
    n.feature = feature[i].get<int>();
    n.threshold = doc.at("threshold")[i].get<double>();
    n.left = doc.at("left")[i].get<int>();
    n.right = doc.at("right")[i].get<int>();
    n.value = doc.at("value")[i].get<double>();
    n.samples = doc.at("samples")[i].get<std::size_t>();
  }
  if (tree.nodes_.empty()) throw ModelError("tree: serialized tree has no nodes");
  return tree;
}

Vector CartModel::predict(const Matrix& x) const {
  Vector out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = tree_.predict_row(x, i);
  return out;
}

std::shared_ptr<const Predictor> CartModel::load(const Json& params) {
  return std::make_shared<CartModel>(RegressionTree::from_json(params));
}

void validate_cart(const CartParams& p) {
  if (p.max_depth < 0) throw ConfigError("cart: max_depth must be >= 0 (0 = unlimited)");
  if (p.min_samples_leaf < 1) throw ConfigError("cart: min_samples_leaf must be >= 1");
  if (p.mtry < 0) throw ConfigError("cart: mtry must be >= 0");
}

Json cart_to_json(const CartParams& p) {
  return Json{{"max_depth", p.max_depth}, {"min_samples_leaf", p.min_samples_leaf}};
}

TrainedModel fit_cart(const Matrix& x, const Vector& y, const CartParams& params) {
  validate_cart(params);
  check_training_data(x, y, "cart");
  if (x.rows() < 2 * params.min_samples_leaf) {
    throw ModelError(fmt::format("cart: {} instances cannot satisfy min_samples_leaf={}", x.rows(),
                                 params.min_samples_leaf));
  }
  const auto start = std::chrono::steady_clock::now();
  auto info = make_info(x, y);
  std::vector<std::size_t> rows(static_cast<std::size_t>(x.rows()));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  CartParams full = params;
  full.mtry = 0;
  Rng unused(0);
  auto tree = RegressionTree::grow(x, y, rows, full, unused);
  info.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return TrainedModel(std::make_shared<CartModel>(std::move(tree)), std::move(info), cart_to_json(params));
}

}  // namespace smp::models
