#pragma once

#include "smp/linalg.hpp"

namespace smp::models {

struct LeastSquaresFit {
  Vector coefficients;  // intercept first when fitted with one
  double rss = 0.0;
  bool ridge_fallback = false;
};

/// Ordinary least squares on the given design matrix (no implicit intercept).
/// Rank-deficient designs fall back to ridge with lambda = 1e-8.
LeastSquaresFit least_squares(const Matrix& design, const Vector& y);

/// Prepends a column of ones.
Matrix with_intercept(const Matrix& x);

}  // namespace smp::models
