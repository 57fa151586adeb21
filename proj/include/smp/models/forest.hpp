#pragma once

#include "smp/models/tree.hpp"
#include "smp/parallel.hpp"

#include <cstdint>
#include <vector>

namespace smp::models {

struct RfParams {
  int n_trees = 100;
  int mtry = 0;  // 0 = max(1, p / 3)
  bool bootstrap = true;
  int max_depth = 0;
  int min_samples_leaf = 1;
};

/// Bagged regression trees; prediction is the mean over trees.
class ForestModel final : public Predictor {
 public:
  explicit ForestModel(std::vector<RegressionTree> trees) : trees_(std::move(trees)) {}

  [[nodiscard]] Technique technique() const noexcept override { return Technique::rf; }
  [[nodiscard]] Vector predict(const Matrix& x) const override;
  [[nodiscard]] Json parameters() const override;
  static std::shared_ptr<const Predictor> load(const Json& params);

  [[nodiscard]] const std::vector<RegressionTree>& trees() const noexcept { return trees_; }

 private:
  std::vector<RegressionTree> trees_;
};

void validate(const RfParams& p, std::size_t feature_count);
Json to_json(const RfParams& p);
int resolved_mtry(const RfParams& p, std::size_t feature_count) noexcept;

/// Tree t draws from Rng(seed).derive("tree", t); trees are grown in
/// parallel when exec allows, with results identical to the serial loop.
TrainedModel fit_rf(const Matrix& x, const Vector& y, const RfParams& params, std::uint64_t seed,
                    const Exec& exec = {});

/// The serial reference: grows the same trees one after another.
std::vector<RegressionTree> grow_forest_serial(const Matrix& x, const Vector& y, const RfParams& params,
                                               std::uint64_t seed);
std::vector<RegressionTree> grow_forest(const Matrix& x, const Vector& y, const RfParams& params,
                                        std::uint64_t seed, const Exec& exec);

}  // namespace smp::models
