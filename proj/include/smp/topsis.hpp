#pragma once

#include "smp/linalg.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace smp::topsis {

enum class Direction { benefit, cost };

std::string_view to_string(Direction d) noexcept;
Direction direction_from_string(std::string_view name);

struct Criterion {
  std::string name;
  Direction direction = Direction::benefit;
};

/// Alternatives (rows) scored on criteria (columns).
class DecisionMatrix {
 public:
  /// Throws DataError unless values are finite, sized alternatives x criteria,
  /// labels are unique, and there is at least one alternative and criterion.
  DecisionMatrix(std::vector<std::string> alternatives, std::vector<Criterion> criteria, Matrix values);

  [[nodiscard]] const std::vector<std::string>& alternatives() const noexcept { return alternatives_; }
  [[nodiscard]] const std::vector<Criterion>& criteria() const noexcept { return criteria_; }
  [[nodiscard]] const Matrix& values() const noexcept { return values_; }
  [[nodiscard]] std::vector<Direction> directions() const;

 private:
  std::vector<std::string> alternatives_;
  std::vector<Criterion> criteria_;
  Matrix values_;
};

/// Strictly positive weights, normalized to sum to one at construction.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> raw);
  static WeightVector uniform(std::size_t n);

  [[nodiscard]] const Vector& values() const noexcept { return w_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return w_.size(); }

 private:
  Vector w_;
};

/// r_ij = x_ij / ||column j||; throws DataError naming a zero-norm criterion.
Matrix normalize(const DecisionMatrix& m);
Matrix weight(const Matrix& r, const WeightVector& w);

struct IdealPoints {
  Vector best;   // S+
  Vector worst;  // S-
};

IdealPoints ideal_points(const Matrix& v, const std::vector<Direction>& directions);

struct Separations {
  Vector to_best;   // D+
  Vector to_worst;  // D-
};

Separations separations(const Matrix& v, const IdealPoints& ideal);

struct RankingResult {
  std::vector<std::string> alternatives;
  std::vector<Criterion> criteria;
  Vector weights;
  Matrix normalized;  // r
  Matrix weighted;    // v
  IdealPoints ideal;
  Separations distance;
  Vector closeness;                // R+ per alternative, input order
  std::vector<int> rank;           // 1 = best, input order
  std::vector<std::size_t> order;  // alternative indices from rank 1 down
  bool tie = false;                // some closeness values were exactly equal
  bool trivial = false;            // a single alternative was ranked

  [[nodiscard]] nlohmann::json to_json() const;
};

/// Full pipeline. Alternatives are ordered by descending closeness; exact
/// ties fall back to label order and set `tie`. Throws DataError when every
/// alternative is identical (D+ + D- = 0). With `allow_single`, one
/// alternative yields the trivial ranking instead of an error.
RankingResult rank(const DecisionMatrix& m, const WeightVector& w, bool allow_single = false);

/// Table with one row per alternative in rank order.
std::string to_markdown(const RankingResult& r);

}  // namespace smp::topsis
