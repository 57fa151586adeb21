#pragma once

#include "smp/models/model.hpp"

#include <vector>

namespace smp::models {

struct MarsParams {
  int max_terms = 21;        // basis functions including the intercept
  int max_interaction = 1;   // hinge factors per term
  double penalty = 3.0;      // GCV cost per knot
  int max_knots = 20;        // candidate knots per (term, feature); 0 = every distinct value
};

/// One factor of a basis term: max(0, x_f - t) when sign = +1, max(0, t - x_f) when sign = -1.
struct Hinge {
  int feature = 0;
  double knot = 0.0;
  int sign = 1;

  [[nodiscard]] double operator()(double x) const noexcept {
    const double v = sign > 0 ? x - knot : knot - x;
    return v > 0.0 ? v : 0.0;
  }
};

/// Product of hinges; the empty product is the intercept.
using BasisTerm = std::vector<Hinge>;

class MarsModel final : public Predictor {
 public:
  MarsModel(std::vector<BasisTerm> terms, Vector coefficients);

  [[nodiscard]] Technique technique() const noexcept override { return Technique::mars; }
  [[nodiscard]] Vector predict(const Matrix& x) const override;
  [[nodiscard]] Json parameters() const override;
  static std::shared_ptr<const Predictor> load(const Json& params);

  [[nodiscard]] const std::vector<BasisTerm>& terms() const noexcept { return terms_; }
  [[nodiscard]] const Vector& coefficients() const noexcept { return coef_; }

 private:
  std::vector<BasisTerm> terms_;
  Vector coef_;
};

/// Evaluates the basis on x, one column per term.
Matrix basis_matrix(const std::vector<BasisTerm>& terms, const Matrix& x);

/// GCV = (RSS / n) / (1 - C / n)^2 with C = M + penalty * (M - 1) / 2 for M
/// terms; infinite when C >= n.
double gcv(double rss, Eigen::Index n, std::size_t terms, double penalty) noexcept;

struct MarsTrace {
  std::vector<double> forward_rss;  // after each forward step, intercept-only first
  std::vector<double> backward_gcv;  // best subset GCV at each size, full model first
  double selected_gcv = 0.0;
  std::vector<std::string> dropped;  // candidate columns rejected as collinear
};

void validate(const MarsParams& p);
Json to_json(const MarsParams& p);

/// Forward pass adds mirrored hinge pairs by greatest RSS reduction; backward
/// pass deletes terms one at a time and keeps the subset with the lowest GCV.
TrainedModel fit_mars(const Matrix& x, const Vector& y, const MarsParams& params, MarsTrace* trace = nullptr);

}  // namespace smp::models
