#include "smp/models/linear.hpp"

namespace smp::models {

LeastSquaresFit least_squares(const Matrix& design, const Vector& y) {
  LeastSquaresFit fit;
  if (design.cols() == 0) {
    fit.coefficients = Vector(0);
    fit.rss = y.squaredNorm();
    return fit;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  if (qr.rank() == design.cols()) {
    fit.coefficients = qr.solve(y);
  } else {
    constexpr double kLambda = 1e-8;
    const Matrix gram = design.transpose() * design + kLambda * Matrix::Identity(design.cols(), design.cols());
    fit.coefficients = gram.ldlt().solve(design.transpose() * y);
    fit.ridge_fallback = true;
  }
  fit.rss = (y - design * fit.coefficients).squaredNorm();
  return fit;
}

Matrix with_intercept(const Matrix& x) {
  Matrix out(x.rows(), x.cols() + 1);
  out.col(0).setOnes();
  out.rightCols(x.cols()) = x;
  return out;
}

}  // namespace smp::models
