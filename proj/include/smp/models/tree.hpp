#pragma once

#include "smp/models/model.hpp"
#include "smp/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace smp::models {

struct TreeParams {
  int max_depth = 0;         // 0 = unlimited
  int min_samples_leaf = 1;
  int mtry = 0;              // features tried per split; 0 = all
};

/// Binary regression tree grown by exhaustive variance-reduction search over
/// midpoints between consecutive distinct feature values. Equal-gain splits
/// go to the lowest feature index, then the lowest threshold.
class RegressionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;       // mean of the node's training targets
    std::size_t samples = 0;
  };

  /// Grows on `rows` of (x, y). `rng` is only consulted when mtry < p.
  static RegressionTree grow(const Matrix& x, const Vector& y, std::span<const std::size_t> rows,
                             const TreeParams& params, Rng& rng);

  [[nodiscard]] double predict_row(const Matrix& x, Eigen::Index row) const;
  [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] std::size_t depth() const;

  [[nodiscard]] Json to_json() const;
  static RegressionTree from_json(const Json& doc);

 private:
  std::vector<Node> nodes_;
};

using CartParams = TreeParams;

class CartModel final : public Predictor {
 public:
  explicit CartModel(RegressionTree tree) : tree_(std::move(tree)) {}

  [[nodiscard]] Technique technique() const noexcept override { return Technique::cart; }
  [[nodiscard]] Vector predict(const Matrix& x) const override;
  [[nodiscard]] Json parameters() const override { return tree_.to_json(); }
  static std::shared_ptr<const Predictor> load(const Json& params);

  [[nodiscard]] const RegressionTree& tree() const noexcept { return tree_; }

 private:
  RegressionTree tree_;
};

void validate_cart(const CartParams& p);
Json cart_to_json(const CartParams& p);

TrainedModel fit_cart(const Matrix& x, const Vector& y, const CartParams& params);

}  // namespace smp::models
