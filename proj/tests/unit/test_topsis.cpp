#include "smp/error.hpp"
#include "smp/rng.hpp"
#include "smp/topsis.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

using namespace smp;
using namespace smp::topsis;

namespace {

DecisionMatrix two_by_two() {
  Matrix v(2, 2);
  v << 0.9, 2.0, 0.6, 1.0;
  return DecisionMatrix({"A", "B"}, {{"quality", Direction::benefit}, {"cost", Direction::cost}}, v);
}

struct Random {
  DecisionMatrix m;
  std::vector<double> w;
};

Random random_problem(Rng& rng) {
  const auto alts = 2 + rng.below(9);
  const auto crits = 1 + rng.below(6);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < alts; ++i) labels.push_back("alt" + std::to_string(i));
  std::vector<Criterion> criteria;
  std::vector<double> w;
  for (std::size_t j = 0; j < crits; ++j) {
    criteria.push_back({"c" + std::to_string(j), rng.bernoulli(0.5) ? Direction::benefit : Direction::cost});
    w.push_back(rng.uniform(0.1, 5.0));
  }
  Matrix v(static_cast<Eigen::Index>(alts), static_cast<Eigen::Index>(crits));
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) v(i, j) = rng.uniform(0.01, 100.0);
  }
  return {DecisionMatrix(labels, criteria, v), w};
}

oracle::Mat to_rows(const Matrix& m) {
  oracle::Mat out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = to_std(m.row(i).transpose());
  return out;
}

}  // namespace

TEST_CASE("worked 2x2 fixture") {
  const auto r = rank(two_by_two(), WeightVector::uniform(2));
  CHECK(std::abs(r.closeness(0) - 0.38278) < 1e-5);
  CHECK(std::abs(r.closeness(1) - 0.61722) < 1e-5);
  CHECK(std::abs(r.distance.to_best(0) - 0.22361) < 1e-5);
  CHECK(std::abs(r.distance.to_worst(0) - 0.13868) < 1e-5);
  CHECK(r.rank == std::vector<int>{2, 1});
  CHECK(r.order == std::vector<std::size_t>{1, 0});
  CHECK_FALSE(r.tie);
}

TEST_CASE("step functions: unit column norms and ideal points") {
  const auto m = two_by_two();
  const auto r = normalize(m);
  for (Eigen::Index j = 0; j < r.cols(); ++j) CHECK(r.col(j).norm() == doctest::Approx(1.0));
  const auto v = weight(r, WeightVector({1.0, 3.0}));
  CHECK(v.col(1).norm() == doctest::Approx(0.75));
  const auto ideal = ideal_points(v, m.directions());
  CHECK(ideal.best(0) == v.col(0).maxCoeff());
  CHECK(ideal.best(1) == v.col(1).minCoeff());
  CHECK(ideal.worst(1) == v.col(1).maxCoeff());
}

TEST_CASE("rank agrees with the step-by-step oracle") {
  Rng rng(77);
  for (int t = 0; t < 200; ++t) {
    const auto p = random_problem(rng);
    const auto got = rank(p.m, WeightVector(p.w));
    std::vector<bool> benefit;
    for (const auto& c : p.m.criteria()) benefit.push_back(c.direction == Direction::benefit);
    const auto want = oracle::topsis(to_rows(p.m.values()), p.w, benefit, p.m.alternatives());
    for (std::size_t i = 0; i < want.closeness.size(); ++i) {
      CHECK(std::abs(got.closeness(static_cast<Eigen::Index>(i)) - want.closeness[i]) <= 1e-9);
      CHECK(std::abs(got.distance.to_best(static_cast<Eigen::Index>(i)) - want.d_best[i]) <= 1e-9);
    }
    CHECK(got.rank == want.rank);
  }
}

TEST_CASE("closeness stays in [0, 1] and ranks form a permutation") {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto p = random_problem(rng);
    const auto r = rank(p.m, WeightVector(p.w));
    CHECK(r.closeness.minCoeff() >= 0.0);
    CHECK(r.closeness.maxCoeff() <= 1.0);
    std::vector<int> sorted = r.rank;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == static_cast<int>(i) + 1);
  }
}

TEST_CASE("column scaling leaves closeness unchanged") {
  Rng rng(12);
  for (int t = 0; t < 100; ++t) {
    const auto p = random_problem(rng);
    const auto base = rank(p.m, WeightVector(p.w));
    Matrix scaled = p.m.values();
    const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(scaled.cols())));
    scaled.col(j) *= 100.0;
    const auto r = rank(DecisionMatrix(p.m.alternatives(), p.m.criteria(), scaled), WeightVector(p.w));
    CHECK((r.closeness - base.closeness).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("dominant and dominated alternatives get closeness one and zero") {
  Matrix v(3, 2);
  v << 10, 1, 5, 5, 1, 9;
  const auto r = rank(DecisionMatrix({"best", "mid", "worst"}, {{"b", Direction::benefit}, {"c", Direction::cost}}, v),
                      WeightVector::uniform(2));
  CHECK(r.closeness(0) == 1.0);
  CHECK(r.closeness(2) == 0.0);
}

TEST_CASE("ties fall back to label order and set the flag") {
  Matrix v(3, 1);
  v << 2, 5, 2;
  const auto r = rank(DecisionMatrix({"zeta", "mid", "alpha"}, {{"x", Direction::benefit}}, v),
                      WeightVector::uniform(1));
  CHECK(r.tie);
  CHECK(r.rank == std::vector<int>{3, 1, 2});
}

TEST_CASE("error and degenerate cases") {
  Matrix same(2, 2);
  same << 1, 2, 1, 2;
  CHECK_THROWS_AS(rank(DecisionMatrix({"a", "b"}, {{"x", Direction::benefit}, {"y", Direction::cost}}, same),
                       WeightVector::uniform(2)),
                  DataError);
  Matrix zero(2, 2);
  zero << 1, 0, 2, 0;
  try {
    (void)normalize(DecisionMatrix({"a", "b"}, {{"x", Direction::benefit}, {"rmse", Direction::cost}}, zero));
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("rmse") != std::string::npos);
  }
  Matrix one(1, 1);
  one << 4;
  const DecisionMatrix single({"only"}, {{"x", Direction::cost}}, one);
  CHECK_THROWS_AS(rank(single, WeightVector::uniform(1)), DataError);
  const auto trivial = rank(single, WeightVector::uniform(1), true);
  CHECK(trivial.trivial);
  CHECK(trivial.rank == std::vector<int>{1});
  CHECK_THROWS_AS(WeightVector({1.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(DecisionMatrix({"a", "a"}, {{"x", Direction::cost}}, Matrix::Ones(2, 1)), DataError);
  Matrix bad(2, 1);
  bad << 1, std::nan("");
  CHECK_THROWS_AS(DecisionMatrix({"a", "b"}, {{"x", Direction::cost}}, bad), DataError);
  CHECK_THROWS_AS(rank(two_by_two(), WeightVector::uniform(3)), ConfigError);
  CHECK(direction_from_string("max") == Direction::benefit);
  CHECK_THROWS(direction_from_string("sideways"));
}

TEST_CASE("json and markdown output list alternatives in rank order") {
  const auto r = rank(two_by_two(), WeightVector::uniform(2));
  const auto j = r.to_json();
  CHECK(j.at("order").at(0) == "B");
  const auto md = to_markdown(r);
  CHECK(md.find("| 1 | B |") != std::string::npos);
}
