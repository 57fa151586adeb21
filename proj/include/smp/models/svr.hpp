#pragma once

#include "smp/models/model.hpp"

#include <string_view>

namespace smp::models {

enum class Kernel { linear, rbf };

struct SvrParams {
  double c = 1.0;
  double epsilon = 0.1;
  Kernel kernel = Kernel::rbf;
  double gamma = 0.0;  // rbf width; 0 = 1 / feature count
  double tol = 1e-3;   // KKT violation tolerance
  long max_iter = 1000000;
  /// Fit on (y - mean) / sd and map predictions back. epsilon is then in
  /// standard-deviation units.
  bool standardize_target = true;
};

std::string_view to_string(Kernel k) noexcept;
Kernel kernel_from_string(std::string_view name);

/// epsilon-insensitive support vector regression.
class SvrModel final : public Predictor {
 public:
  SvrModel(Kernel kernel, double gamma, Matrix support, Vector coef, double bias, double y_shift, double y_scale);

  [[nodiscard]] Technique technique() const noexcept override { return Technique::svr; }
  [[nodiscard]] Vector predict(const Matrix& x) const override;
  [[nodiscard]] Json parameters() const override;
  static std::shared_ptr<const Predictor> load(const Json& params);

  /// alpha_i - alpha_i* for each support vector.
  [[nodiscard]] const Vector& dual_coefficients() const noexcept { return coef_; }
  [[nodiscard]] double bias() const noexcept { return bias_; }
  [[nodiscard]] Eigen::Index support_count() const noexcept { return support_.rows(); }

 private:
  Kernel kernel_;
  double gamma_;
  Matrix support_;
  Vector coef_;
  double bias_;
  double y_shift_;
  double y_scale_;
};

void validate(const SvrParams& p);
Json to_json(const SvrParams& p);

/// Pairwise (SMO) decomposition with second-order working-set selection.
/// Hitting max_iter keeps the last iterate and clears info().converged.
TrainedModel fit_svr(const Matrix& x, const Vector& y, const SvrParams& params);

}  // namespace smp::models
