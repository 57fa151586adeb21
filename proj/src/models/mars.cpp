#include "smp/models/mars.hpp"

#include "smp/error.hpp"
#include "smp/models/linear.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

namespace smp::models {

namespace {

constexpr double kCollinear = 1e-9;

Vector term_column(const BasisTerm& term, const Matrix& x) {
  Vector col = Vector::Ones(x.rows());
  for (const auto& h : term) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) col(i) *= h(x(i, h.feature));
  }
  return col;
}

std::vector<double> candidate_knots(const Matrix& x, int feature, const Vector& parent, int max_knots) {
  std::vector<double> values;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (parent(i) > 0.0) values.push_back(x(i, feature));
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (max_knots <= 0 || values.size() <= static_cast<std::size_t>(max_knots)) return values;
  std::vector<double> picked;
  const auto k = static_cast<std::size_t>(max_knots);
  const double step = static_cast<double>(values.size() - 1) / static_cast<double>(k - 1);
  for (std::size_t i = 0; i < k; ++i) {
    const auto at = static_cast<std::size_t>(std::llround(static_cast<double>(i) * step));
    if (picked.empty() || picked.back() != values[at]) picked.push_back(values[at]);
  }
  return picked;
}

/// Growing orthonormal basis of the span of the accepted columns.
class Orthonormal {
 public:
  Orthonormal(Eigen::Index n, Eigen::Index capacity) : q_(n, capacity) {}

  [[nodiscard]] Eigen::Index size() const noexcept { return k_; }

  /// Component of v orthogonal to the current basis (two Gram-Schmidt passes).
  [[nodiscard]] Vector residual(const Vector& v) const {
    if (k_ == 0) return v;
    const auto q = q_.leftCols(k_);
    Vector r = v - q * (q.transpose() * v);
    return r - q * (q.transpose() * r);
  }

  /// Appends v if it is not in the span; returns the unit vector added.
  std::optional<Vector> add(const Vector& v) {
    const Vector r = residual(v);
    const double norm2 = r.squaredNorm();
    if (!(norm2 > kCollinear * std::max(v.squaredNorm(), std::numeric_limits<double>::min())) || k_ == q_.cols()) {
      return std::nullopt;
    }
    q_.col(k_) = r / std::sqrt(norm2);
    return q_.col(k_++);
  }

 private:
  Matrix q_;
  Eigen::Index k_ = 0;
};

struct Candidate {
  double reduction = 0.0;
  std::size_t parent = 0;
  int feature = -1;
  double knot = 0.0;
};

double pair_reduction(const Vector& r, const Vector& a, const Vector& b, double a_raw, double b_raw) {
  const double na = a.squaredNorm();
  const double nb = b.squaredNorm();
  const bool use_a = na > kCollinear * a_raw;
  const bool use_b = nb > kCollinear * b_raw;
  const double ra = use_a ? r.dot(a) : 0.0;
  const double rb = use_b ? r.dot(b) : 0.0;
  if (use_a && use_b) {
    const double ab = a.dot(b);
    const double det = na * nb - ab * ab;
    if (det > kCollinear * na * nb) return (nb * ra * ra - 2.0 * ab * ra * rb + na * rb * rb) / det;
    return std::max(ra * ra / na, rb * rb / nb);
  }
  if (use_a) return ra * ra / na;
  if (use_b) return rb * rb / nb;
  return 0.0;
}

Json hinge_json(const Hinge& h) { return Json{{"feature", h.feature}, {"knot", h.knot}, {"sign", h.sign}}; }

}  // namespace

MarsModel::MarsModel(std::vector<BasisTerm> terms, Vector coefficients)
    : terms_(std::move(terms)), coef_(std::move(coefficients)) {}

Matrix basis_matrix(const std::vector<BasisTerm>& terms, const Matrix& x) {
  Matrix out(x.rows(), static_cast<Eigen::Index>(terms.size()));
  for (std::size_t j = 0; j < terms.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = term_column(terms[j], x);
  return out;
}

Vector MarsModel::predict(const Matrix& x) const { return basis_matrix(terms_, x) * coef_; }

Json MarsModel::parameters() const {
  Json terms = Json::array();
  for (const auto& t : terms_) {
    Json factors = Json::array();
    for (const auto& h : t) factors.push_back(hinge_json(h));
    terms.push_back(factors);
  }
  return Json{{"terms", terms}, {"coefficients", to_std(coef_)}};
}

std::shared_ptr<const Predictor> MarsModel::load(const Json& params) {
  std::vector<BasisTerm> terms;
  for (const auto& t : params.at("terms")) {
    BasisTerm term;
    for (const auto& h : t) {
      term.push_back({h.at("feature").get<int>(), h.at("knot").get<double>(), h.at("sign").get<int>()});
    }
    terms.push_back(std::move(term));
  }
  const auto coef = params.at("coefficients").get<std::vector<double>>();
  if (coef.size() != terms.size()) throw ModelError("mars: serialized term/coefficient count mismatch");
  return std::make_shared<MarsModel>(std::move(terms), from_std(coef));
}

double gcv(double rss, Eigen::Index n, std::size_t terms, double penalty) noexcept {
  const double m = static_cast<double>(terms);
  const double c = m + penalty * (m - 1.0) / 2.0;
  const double nn = static_cast<double>(n);
  if (c >= nn) return std::numeric_limits<double>::infinity();
  const double d = 1.0 - c / nn;
  return (rss / nn) / (d * d);
}

void validate(const MarsParams& p) {
  if (p.max_terms < 1) throw ConfigError("mars: max_terms must be >= 1");
  if (p.max_interaction < 1) throw ConfigError("mars: max_interaction must be >= 1");
  if (!(p.penalty >= 0.0)) throw ConfigError("mars: penalty must be non-negative");
  if (p.max_knots < 0 || p.max_knots == 1) throw ConfigError("mars: max_knots must be 0 or >= 2");
}

Json to_json(const MarsParams& p) {
  return Json{{"max_terms", p.max_terms},
              {"max_interaction", p.max_interaction},
              {"penalty", p.penalty},
              {"max_knots", p.max_knots}};
}

TrainedModel fit_mars(const Matrix& x, const Vector& y, const MarsParams& params, MarsTrace* trace) {
  validate(params);
  check_training_data(x, y, "mars");
  const auto start = std::chrono::steady_clock::now();
  auto info = make_info(x, y);
  const Eigen::Index n = x.rows();
  const int p = static_cast<int>(x.cols());
  MarsTrace local;

  std::vector<BasisTerm> terms{BasisTerm{}};
  std::vector<Vector> columns{Vector::Ones(n)};
  Orthonormal basis(n, std::min<Eigen::Index>(n, params.max_terms));
  Vector r = y;
  if (auto q = basis.add(columns[0])) r -= q->dot(r) * *q;
  const double tss = r.squaredNorm();
  local.forward_rss.push_back(tss);

  while (terms.size() + 2 <= static_cast<std::size_t>(params.max_terms)) {
    Candidate best;
    for (std::size_t pi = 0; pi < terms.size(); ++pi) {
      const auto& parent = terms[pi];
      if (parent.size() >= static_cast<std::size_t>(params.max_interaction)) continue;
      const Vector& pcol = columns[pi];
      for (int f = 0; f < p; ++f) {
        if (std::any_of(parent.begin(), parent.end(), [f](const Hinge& h) { return h.feature == f; })) continue;
        for (double t : candidate_knots(x, f, pcol, params.max_knots)) {
          Vector a(n);
          Vector b(n);
          for (Eigen::Index i = 0; i < n; ++i) {
            const double v = x(i, f) - t;
            a(i) = pcol(i) * (v > 0.0 ? v : 0.0);
            b(i) = pcol(i) * (v < 0.0 ? -v : 0.0);
          }
          const double red = pair_reduction(r, basis.residual(a), basis.residual(b), a.squaredNorm(), b.squaredNorm());
          if (red > best.reduction) best = {red, pi, f, t};
        }
      }
    }
    if (best.feature < 0 || !(best.reduction > 1e-12 * tss)) break;

    bool added = false;
    for (int sign : {1, -1}) {
      BasisTerm term = terms[best.parent];
      term.push_back({best.feature, best.knot, sign});
      Vector col = term_column(term, x);
      if (auto q = basis.add(col)) {
        r -= q->dot(r) * *q;
        terms.push_back(std::move(term));
        columns.push_back(std::move(col));
        added = true;
      } else {
        local.dropped.push_back(fmt::format("x{} {} {:.6g}", best.feature, sign > 0 ? "+" : "-", best.knot));
      }
    }
    if (!added) break;
    local.forward_rss.push_back(r.squaredNorm());
  }

  // Backward deletion: at each size drop the term whose removal raises RSS least.
  const Matrix full = basis_matrix(terms, x);
  std::vector<std::size_t> current(terms.size());
  for (std::size_t j = 0; j < current.size(); ++j) current[j] = j;
  std::vector<std::size_t> chosen = current;
  double best_gcv = gcv(least_squares(full, y).rss, n, current.size(), params.penalty);
  local.backward_gcv.push_back(best_gcv);
  while (current.size() > 1) {
    double best_rss = std::numeric_limits<double>::infinity();
    std::size_t drop = 0;
    for (std::size_t k = 1; k < current.size(); ++k) {
      auto trial = current;
      trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(k));
      const double rss = least_squares(take_cols(full, trial), y).rss;
      if (rss < best_rss) {
        best_rss = rss;
        drop = k;
      }
    }
    current.erase(current.begin() + static_cast<std::ptrdiff_t>(drop));
    const double g = gcv(best_rss, n, current.size(), params.penalty);
    local.backward_gcv.push_back(g);
    if (g < best_gcv || (std::isinf(best_gcv) && std::isinf(g))) {
      best_gcv = g;
      chosen = current;
    }
  }
  local.selected_gcv = best_gcv;

  std::vector<BasisTerm> kept;
  for (auto j : chosen) kept.push_back(terms[j]);
  const auto fit = least_squares(take_cols(full, chosen), y);
  if (fit.ridge_fallback) info.notes.push_back("mars: rank-deficient final basis, ridge fallback applied");
  for (const auto& d : local.dropped) info.notes.push_back("mars: dropped collinear hinge " + d);
  if (trace) *trace = local;
  info.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return TrainedModel(std::make_shared<MarsModel>(std::move(kept), fit.coefficients), std::move(info),
                      to_json(params));
}

}  // namespace smp::models
