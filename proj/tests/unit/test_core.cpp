#include "smp/error.hpp"
#include "smp/parallel.hpp"
#include "smp/rng.hpp"

#include <doctest.h>

#include <atomic>
#include <numeric>
#include <set>
#include <stdexcept>

using smp::Exec;
using smp::Rng;

TEST_CASE("rng streams are reproducible and derive ignores draw position") {
  Rng a(7), b(7);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  Rng fresh(7);
  CHECK(a.derive("x", 3).next() == fresh.derive("x", 3).next());
  CHECK(fresh.derive("x", 3).next() != fresh.derive("x", 4).next());
  CHECK(fresh.derive("x").next() != fresh.derive("y").next());
}

TEST_CASE("rng uniform, below and uniform_int stay in range") {
  Rng r(11);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(7) < 7u);
    const int k = r.uniform_int(-3, 3);
    CHECK(k >= -3);
    CHECK(k <= 3);
  }
}

TEST_CASE("rng below is close to uniform") {
  Rng r(3);
  std::vector<int> counts(5, 0);
  const int draws = 50000;
  for (int i = 0; i < draws; ++i) ++counts[r.below(5)];
  for (int c : counts) CHECK(std::abs(c - draws / 5) < 500);
}

TEST_CASE("rng normal has unit moments") {
  Rng r(5);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("rng shuffle permutes and sample_indices is sorted and distinct") {
  Rng r(9);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  r.shuffle(std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
  const auto s = r.sample_indices(20, 7);
  CHECK(s.size() == 7);
  CHECK(std::is_sorted(s.begin(), s.end()));
  CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 7);
  CHECK(r.sample_indices(3, 10).size() == 3);
}

TEST_CASE("parallel_for visits every index once for any worker count") {
  for (int jobs : {1, 2, 4}) {
    std::vector<int> hits(100, 0);
    smp::parallel_for(hits.size(), Exec{jobs}, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
  }
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
  for (int jobs : {1, 3}) {
    try {
      smp::parallel_for(20, Exec{jobs}, [](std::size_t i) {
        if (i == 4 || i == 13) throw smp::DataError("fail " + std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const smp::DataError& e) {
      CHECK(std::string(e.what()) == "fail 4");
    }
  }
}
