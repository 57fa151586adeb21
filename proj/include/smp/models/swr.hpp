#pragma once

#include "smp/models/model.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace smp::models {

struct SwrParams {
  double alpha_enter = 0.05;  // entry threshold on the partial F-test p-value
  int max_features = 0;       // 0 = no limit
};

/// Forward stepwise linear regression.
class SwrModel final : public Predictor {
 public:
  SwrModel(std::vector<std::size_t> selected, double intercept, Vector slopes, std::vector<double> rss_path);

  [[nodiscard]] Technique technique() const noexcept override { return Technique::swr; }
  [[nodiscard]] Vector predict(const Matrix& x) const override;
  [[nodiscard]] Json parameters() const override;
  static std::shared_ptr<const Predictor> load(const Json& params);

  [[nodiscard]] const std::vector<std::size_t>& selected() const noexcept { return selected_; }
  [[nodiscard]] double intercept() const noexcept { return intercept_; }
  [[nodiscard]] const Vector& slopes() const noexcept { return slopes_; }
  /// Residual sum of squares after each accepted step, intercept-only first.
  [[nodiscard]] const std::vector<double>& rss_path() const noexcept { return rss_path_; }

 private:
  std::vector<std::size_t> selected_;
  double intercept_;
  Vector slopes_;
  std::vector<double> rss_path_;
};

void validate(const SwrParams& p);
Json to_json(const SwrParams& p);

TrainedModel fit_swr(const Matrix& x, const Vector& y, const SwrParams& params);

}  // namespace smp::models
