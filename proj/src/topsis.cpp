#include "smp/topsis.hpp"

#include "smp/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace smp::topsis {

std::string_view to_string(Direction d) noexcept { return d == Direction::benefit ? "benefit" : "cost"; }

Direction direction_from_string(std::string_view name) {
  if (name == "benefit" || name == "max") return Direction::benefit;
  if (name == "cost" || name == "min") return Direction::cost;
  throw ConfigError(fmt::format("unknown criterion direction '{}' (expected benefit or cost)", name));
}

DecisionMatrix::DecisionMatrix(std::vector<std::string> alternatives, std::vector<Criterion> criteria, Matrix values)
    : alternatives_(std::move(alternatives)), criteria_(std::move(criteria)), values_(std::move(values)) {
  if (alternatives_.empty()) throw DataError("topsis: no alternatives");
  if (criteria_.empty()) throw DataError("topsis: no criteria");
  if (values_.rows() != static_cast<Eigen::Index>(alternatives_.size()) ||
      values_.cols() != static_cast<Eigen::Index>(criteria_.size())) {
    throw DataError(fmt::format("topsis: values are {}x{} but there are {} alternatives and {} criteria", values_.rows(),
                                values_.cols(), alternatives_.size(), criteria_.size()));
  }
  if (std::set<std::string>(alternatives_.begin(), alternatives_.end()).size() != alternatives_.size()) {
    throw DataError("topsis: alternative labels must be unique");
  }
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      if (!std::isfinite(values_(i, j))) {
        throw DataError(fmt::format("topsis: value for {} on {} is not finite", alternatives_[static_cast<std::size_t>(i)],
                                    criteria_[static_cast<std::size_t>(j)].name));
      }
    }
  }
}

std::vector<Direction> DecisionMatrix::directions() const {
  std::vector<Direction> out;
  for (const auto& c : criteria_) out.push_back(c.direction);
  return out;
}

WeightVector::WeightVector(std::vector<double> raw) {
  if (raw.empty()) throw ConfigError("topsis: weight vector is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!(raw[i] > 0.0) || !std::isfinite(raw[i])) {
      throw ConfigError(fmt::format("topsis: weight {} must be positive and finite (got {})", i, raw[i]));
    }
    sum += raw[i];
  }
  w_ = from_std(raw) / sum;
}

WeightVector WeightVector::uniform(std::size_t n) { return WeightVector(std::vector<double>(n, 1.0)); }

Matrix normalize(const DecisionMatrix& m) {
  const Matrix& x = m.values();
  Matrix r(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double norm = x.col(j).norm();
    if (!(norm > 0.0)) {
      throw DataError(fmt::format("topsis: criterion '{}' is zero for every alternative",
                                  m.criteria()[static_cast<std::size_t>(j)].name));
    }
    r.col(j) = x.col(j) / norm;
  }
  return r;
}

Matrix weight(const Matrix& r, const WeightVector& w) {
  if (r.cols() != w.size()) {
    throw ConfigError(fmt::format("topsis: {} criteria but {} weights", r.cols(), w.size()));
  }
  return r * w.values().asDiagonal();
}

IdealPoints ideal_points(const Matrix& v, const std::vector<Direction>& directions) {
  IdealPoints p{Vector(v.cols()), Vector(v.cols())};
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    const double hi = v.col(j).maxCoeff();
    const double lo = v.col(j).minCoeff();
    const bool benefit = directions[static_cast<std::size_t>(j)] == Direction::benefit;
    p.best(j) = benefit ? hi : lo;
    p.worst(j) = benefit ? lo : hi;
  }
  return p;
}

Separations separations(const Matrix& v, const IdealPoints& ideal) {
  Separations s{Vector(v.rows()), Vector(v.rows())};
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    s.to_best(i) = (v.row(i).transpose() - ideal.best).norm();
    s.to_worst(i) = (v.row(i).transpose() - ideal.worst).norm();
  }
  return s;
}

RankingResult rank(const DecisionMatrix& m, const WeightVector& w, bool allow_single) {
  const auto n = m.alternatives().size();
  if (n < 2 && !allow_single) throw DataError("topsis: at least two alternatives are required");
  RankingResult out;
  out.alternatives = m.alternatives();
  out.criteria = m.criteria();
  out.weights = w.values();
  out.normalized = normalize(m);
  out.weighted = weight(out.normalized, w);
  out.ideal = ideal_points(out.weighted, m.directions());
  out.distance = separations(out.weighted, out.ideal);
  out.closeness = Vector(static_cast<Eigen::Index>(n));

  if (n == 1) {
    out.trivial = true;
    out.closeness(0) = 1.0;
    out.rank = {1};
    out.order = {0};
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double total = out.distance.to_best(k) + out.distance.to_worst(k);
    if (!(total > 0.0)) {
      throw DataError("topsis: alternatives are indistinguishable (identical on every criterion)");
    }
    out.closeness(k) = out.distance.to_worst(k) / total;
  }

  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) {
    const double ca = out.closeness(static_cast<Eigen::Index>(a));
    const double cb = out.closeness(static_cast<Eigen::Index>(b));
    if (ca != cb) return ca > cb;
    return out.alternatives[a] < out.alternatives[b];
  });
  out.rank.assign(n, 0);
  for (std::size_t pos = 0; pos < n; ++pos) {
    out.rank[out.order[pos]] = static_cast<int>(pos + 1);
    if (pos > 0 && out.closeness(static_cast<Eigen::Index>(out.order[pos])) ==
                       out.closeness(static_cast<Eigen::Index>(out.order[pos - 1]))) {
      out.tie = true;
    }
  }
  return out;
}

nlohmann::json RankingResult::to_json() const {
  nlohmann::json crit = nlohmann::json::array();
  for (std::size_t j = 0; j < criteria.size(); ++j) {
    crit.push_back({{"name", criteria[j].name},
                    {"direction", to_string(criteria[j].direction)},
                    {"weight", weights(static_cast<Eigen::Index>(j))},
                    {"ideal", ideal.best(static_cast<Eigen::Index>(j))},
                    {"anti_ideal", ideal.worst(static_cast<Eigen::Index>(j))}});
  }
  nlohmann::json alts = nlohmann::json::array();
  for (std::size_t i = 0; i < alternatives.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    alts.push_back({{"label", alternatives[i]},
                    {"normalized", to_std(normalized.row(k).transpose())},
                    {"weighted", to_std(weighted.row(k).transpose())},
                    {"d_plus", distance.to_best(k)},
                    {"d_minus", distance.to_worst(k)},
                    {"closeness", closeness(k)},
                    {"rank", rank[i]}});
  }
  nlohmann::json ordered = nlohmann::json::array();
  for (auto i : order) ordered.push_back(alternatives[i]);
  return {{"criteria", crit}, {"alternatives", alts}, {"order", ordered}, {"tie", tie}, {"trivial", trivial}};
}

std::string to_markdown(const RankingResult& r) {
  std::string out = "| Rank | Alternative | D+ | D- | Closeness |\n|---:|---|---:|---:|---:|\n";
  for (auto i : r.order) {
    const auto k = static_cast<Eigen::Index>(i);
    out += fmt::format("| {} | {} | {:.5f} | {:.5f} | {:.5f} |\n", r.rank[i], r.alternatives[i], r.distance.to_best(k),
                       r.distance.to_worst(k), r.closeness(k));
  }
  return out;
}

}  // namespace smp::topsis
