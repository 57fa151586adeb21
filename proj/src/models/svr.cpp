#include "smp/models/svr.hpp"

#include "smp/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

namespace smp::models {

namespace {

constexpr double kTau = 1e-12;

/// Row-major copy of the training inputs with a bounded cache of kernel rows.
class KernelRows {
 public:
  KernelRows(const Matrix& x, Kernel kernel, double gamma)
      : n_(static_cast<std::size_t>(x.rows())), p_(static_cast<std::size_t>(x.cols())), kernel_(kernel),
        gamma_(gamma), data_(n_ * p_), sq_(n_, 0.0), rows_(n_) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < p_; ++j) {
        const double v = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        data_[i * p_ + j] = v;
        sq_[i] += v * v;
      }
    }
    constexpr std::size_t kBudgetBytes = std::size_t{256} << 20;
    capacity_ = std::max<std::size_t>(2, kBudgetBytes / std::max<std::size_t>(1, n_ * sizeof(double)));
  }

  double eval(std::size_t a, std::size_t b) const {
    const double* xa = &data_[a * p_];
    const double* xb = &data_[b * p_];
    double dot = 0.0;
    for (std::size_t j = 0; j < p_; ++j) dot += xa[j] * xb[j];
    if (kernel_ == Kernel::linear) return dot;
    return std::exp(-gamma_ * std::max(0.0, sq_[a] + sq_[b] - 2.0 * dot));
  }

  const std::vector<double>& row(std::size_t i) {
    if (rows_[i].empty()) {
      if (order_.size() >= capacity_) {
        rows_[order_.front()].clear();
        rows_[order_.front()].shrink_to_fit();
        order_.pop_front();
      }
      rows_[i].resize(n_);
      for (std::size_t j = 0; j < n_; ++j) rows_[i][j] = eval(i, j);
      order_.push_back(i);
    }
    return rows_[i];
  }

 private:
  std::size_t n_;
  std::size_t p_;
  Kernel kernel_;
  double gamma_;
  std::vector<double> data_;
  std::vector<double> sq_;
  std::vector<std::vector<double>> rows_;
  std::deque<std::size_t> order_;
  std::size_t capacity_;
};

struct DualSolution {
  std::vector<double> coef;  // alpha - alpha*
  double bias = 0.0;
  bool converged = true;
  long iterations = 0;
};

/// Dual of epsilon-SVR over 2n variables beta = [alpha; alpha*]:
///   min 1/2 beta' Q beta + p' beta,  s' beta = 0,  0 <= beta <= C
/// with s = [+1; -1], Q_ij = s_i s_j K, p = [eps - y; eps + y].
DualSolution solve_dual(const Matrix& x, const Vector& y, const SvrParams& params, double gamma) {
  const auto n = static_cast<std::size_t>(x.rows());
  const std::size_t l = 2 * n;
  const double c = params.c;
  KernelRows kernel(x, params.kernel, gamma);

  std::vector<double> alpha(l, 0.0);
  std::vector<double> grad(l);
  std::vector<signed char> sign(l);
  std::vector<double> diag(l);
  for (std::size_t i = 0; i < n; ++i) {
    const double yi = y(static_cast<Eigen::Index>(i));
    sign[i] = 1;
    sign[i + n] = -1;
    grad[i] = params.epsilon - yi;
    grad[i + n] = params.epsilon + yi;
    diag[i] = diag[i + n] = kernel.eval(i, i);
  }
  auto base = [n](std::size_t t) { return t < n ? t : t - n; };

  DualSolution sol;
  long iter = 0;
  for (; iter < params.max_iter; ++iter) {
    // Maximal violating index by first-order information.
    double gmax = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t pick_i = -1;
    for (std::size_t t = 0; t < l; ++t) {
      if (sign[t] == 1) {
        if (alpha[t] < c && -grad[t] >= gmax) {
          gmax = -grad[t];
          pick_i = static_cast<std::ptrdiff_t>(t);
        }
      } else if (alpha[t] > 0 && grad[t] >= gmax) {
        gmax = grad[t];
        pick_i = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (pick_i < 0) break;
    const auto i = static_cast<std::size_t>(pick_i);
    const auto& ki = kernel.row(base(i));

    // Partner by second-order gain.
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    std::ptrdiff_t pick_j = -1;
    for (std::size_t t = 0; t < l; ++t) {
      const double q_it = static_cast<double>(sign[i] * sign[t]) * ki[base(t)];
      if (sign[t] == 1) {
        if (alpha[t] > 0) {
          const double diff = gmax + grad[t];
          gmax2 = std::max(gmax2, grad[t]);
          if (diff > 0) {
            double quad = diag[i] + diag[t] - 2.0 * static_cast<double>(sign[i]) * q_it;
            if (quad <= 0) quad = kTau;
            const double obj = -(diff * diff) / quad;
            if (obj <= best_obj) {
              best_obj = obj;
              pick_j = static_cast<std::ptrdiff_t>(t);
            }
          }
        }
      } else if (alpha[t] < c) {
        const double diff = gmax - grad[t];
        gmax2 = std::max(gmax2, -grad[t]);
        if (diff > 0) {
          double quad = diag[i] + diag[t] + 2.0 * static_cast<double>(sign[i]) * q_it;
          if (quad <= 0) quad = kTau;
          const double obj = -(diff * diff) / quad;
          if (obj <= best_obj) {
            best_obj = obj;
            pick_j = static_cast<std::ptrdiff_t>(t);
          }
        }
      }
    }
    if (gmax + gmax2 < params.tol || pick_j < 0) break;
    const auto j = static_cast<std::size_t>(pick_j);
    const auto& kj = kernel.row(base(j));
    const double q_ij = static_cast<double>(sign[i] * sign[j]) * ki[base(j)];

    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    double ai = old_ai;
    double aj = old_aj;
    if (sign[i] != sign[j]) {
      double quad = diag[i] + diag[j] + 2.0 * q_ij;
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0) {
        if (aj < 0) { aj = 0; ai = diff; }
      } else if (ai < 0) {
        ai = 0;
        aj = -diff;
      }
      if (diff > 0) {
        if (ai > c) { ai = c; aj = c - diff; }
      } else if (aj > c) {
        aj = c;
        ai = c + diff;
      }
    } else {
      double quad = diag[i] + diag[j] - 2.0 * q_ij;
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c) {
        if (ai > c) { ai = c; aj = sum - c; }
      } else if (aj < 0) {
        aj = 0;
        ai = sum;
      }
      if (sum > c) {
        if (aj > c) { aj = c; ai = sum - c; }
      } else if (ai < 0) {
        ai = 0;
        aj = sum;
      }
    }
    alpha[i] = ai;
    alpha[j] = aj;
    const double dai = ai - old_ai;
    const double daj = aj - old_aj;
    for (std::size_t t = 0; t < l; ++t) {
      const double q_it = static_cast<double>(sign[i] * sign[t]) * ki[base(t)];
      const double q_jt = static_cast<double>(sign[j] * sign[t]) * kj[base(t)];
      grad[t] += q_it * dai + q_jt * daj;
    }
  }
  sol.iterations = iter;
  sol.converged = iter < params.max_iter;

  // Offset from free variables, else the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -ub;
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < l; ++t) {
    const double yg = static_cast<double>(sign[t]) * grad[t];
    if (alpha[t] >= c) {
      if (sign[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (sign[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);
  sol.bias = -rho;
  sol.coef.resize(n);
  for (std::size_t i = 0; i < n; ++i) sol.coef[i] = alpha[i] - alpha[i + n];
  return sol;
}

}  // namespace

std::string_view to_string(Kernel k) noexcept { return k == Kernel::linear ? "linear" : "rbf"; }

Kernel kernel_from_string(std::string_view name) {
  if (name == "linear") return Kernel::linear;
  if (name == "rbf") return Kernel::rbf;
  throw ConfigError(fmt::format("svr: unknown kernel '{}' (expected linear or rbf)", name));
}

SvrModel::SvrModel(Kernel kernel, double gamma, Matrix support, Vector coef, double bias, double y_shift,
                   double y_scale)
    : kernel_(kernel), gamma_(gamma), support_(std::move(support)), coef_(std::move(coef)), bias_(bias),
      y_shift_(y_shift), y_scale_(y_scale) {}

Vector SvrModel::predict(const Matrix& x) const {
  Vector out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double f = bias_;
    for (Eigen::Index s = 0; s < support_.rows(); ++s) {
      double k;
      if (kernel_ == Kernel::linear) {
        k = x.row(i).dot(support_.row(s));
      } else {
        k = std::exp(-gamma_ * (x.row(i) - support_.row(s)).squaredNorm());
      }
      f += coef_(s) * k;
    }
    out(i) = y_shift_ + y_scale_ * f;
  }
  return out;
}

Json SvrModel::parameters() const {
  Json support = Json::array();
  for (Eigen::Index s = 0; s < support_.rows(); ++s) {
    support.push_back(to_std(support_.row(s).transpose()));
  }
  return Json{{"kernel", to_string(kernel_)}, {"gamma", gamma_},     {"support", support}, {"coef", to_std(coef_)},
              {"bias", bias_},                {"y_shift", y_shift_}, {"y_scale", y_scale_}};
}

std::shared_ptr<const Predictor> SvrModel::load(const Json& params) {
  const auto& rows = params.at("support");
  const auto coef = params.at("coef").get<std::vector<double>>();
  const Eigen::Index width = rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size());
  Matrix support(static_cast<Eigen::Index>(rows.size()), width);
  for (std::size_t s = 0; s < rows.size(); ++s) {
    const auto r = rows[s].get<std::vector<double>>();
    for (std::size_t j = 0; j < r.size(); ++j) support(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)) = r[j];
  }
  return std::make_shared<SvrModel>(kernel_from_string(params.at("kernel").get<std::string>()),
                                    params.at("gamma").get<double>(), std::move(support), from_std(coef),
                                    params.at("bias").get<double>(), params.at("y_shift").get<double>(),
                                    params.at("y_scale").get<double>());
}

void validate(const SvrParams& p) {
  if (!(p.c > 0.0)) throw ConfigError(fmt::format("svr: C must be positive (got {})", p.c));
  if (!(p.epsilon >= 0.0)) throw ConfigError(fmt::format("svr: epsilon must be non-negative (got {})", p.epsilon));
  if (!(p.gamma >= 0.0)) throw ConfigError("svr: gamma must be non-negative (0 = 1/p)");
  if (!(p.tol > 0.0)) throw ConfigError("svr: tol must be positive");
  if (p.max_iter < 1) throw ConfigError("svr: max_iter must be >= 1");
}

Json to_json(const SvrParams& p) {
  return Json{{"C", p.c},
              {"epsilon", p.epsilon},
              {"kernel", to_string(p.kernel)},
              {"gamma", p.gamma},
              {"tol", p.tol},
              {"max_iter", p.max_iter},
              {"standardize_target", p.standardize_target}};
}

TrainedModel fit_svr(const Matrix& x, const Vector& y, const SvrParams& params) {
  validate(params);
  check_training_data(x, y, "svr");
  const auto start = std::chrono::steady_clock::now();
  auto info = make_info(x, y);
  const double gamma = params.gamma > 0.0 ? params.gamma : 1.0 / static_cast<double>(std::max<Eigen::Index>(1, x.cols()));

  double shift = 0.0;
  double scale = 1.0;
  if (params.standardize_target) {
    shift = y.mean();
    const double sd = std::sqrt((y.array() - shift).square().mean());
    scale = sd > 0.0 ? sd : 1.0;
  }
  const Vector target = (y.array() - shift) / scale;
  const auto sol = solve_dual(x, target, params, gamma);

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < sol.coef.size(); ++i) {
    if (sol.coef[i] != 0.0) kept.push_back(i);
  }
  Matrix support = take_rows(x, kept);
  Vector coef(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t s = 0; s < kept.size(); ++s) coef(static_cast<Eigen::Index>(s)) = sol.coef[kept[s]];

  info.converged = sol.converged;
  if (!sol.converged) {
    info.notes.push_back(fmt::format("svr: stopped at max_iter={} before reaching tol={}", params.max_iter, params.tol));
  }
  info.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Json hp = to_json(params);
  hp["gamma_resolved"] = gamma;
  return TrainedModel(std::make_shared<SvrModel>(params.kernel, gamma, std::move(support), std::move(coef), sol.bias,
                                                 shift, scale),
                      std::move(info), std::move(hp));
}

}  // namespace smp::models
