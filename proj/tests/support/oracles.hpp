#pragma once

// Independent reference implementations used as test oracles. They work on
// plain std::vector with straightforward loops and share no code with the
// library kernels they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major: m[i][j]

inline double mae(const Vec& a, const Vec& p) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(static_cast<long double>(a[i]) - p[i]);
  return static_cast<double>(s / a.size());
}

inline double rmse(const Vec& a, const Vec& p) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double d = static_cast<long double>(a[i]) - p[i];
    s += d * d;
  }
  return static_cast<double>(std::sqrt(s / a.size()));
}

inline double r_squared(const Vec& a, const Vec& p) {
  long double mean = 0;
  for (double v : a) mean += v;
  mean /= a.size();
  long double rss = 0, tss = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    rss += (a[i] - static_cast<long double>(p[i])) * (a[i] - static_cast<long double>(p[i]));
    tss += (a[i] - mean) * (a[i] - mean);
  }
  return static_cast<double>(1.0L - rss / tss);
}

struct TopsisOut {
  Vec closeness;
  Vec d_best;
  Vec d_worst;
  std::vector<int> rank;  // 1 = best; ties broken by label order, given as `labels`
};

/// Vector normalization, weighting, ideal/anti-ideal, Euclidean separations,
/// relative closeness, then ranks by descending closeness.
inline TopsisOut topsis(const Mat& x, const Vec& raw_weights, const std::vector<bool>& benefit,
                        const std::vector<std::string>& labels) {
  const std::size_t m = x.size();
  const std::size_t n = x[0].size();
  double wsum = 0;
  for (double w : raw_weights) wsum += w;
  Mat v(m, Vec(n));
  for (std::size_t j = 0; j < n; ++j) {
    double sq = 0;
    for (std::size_t i = 0; i < m; ++i) sq += x[i][j] * x[i][j];
    const double norm = std::sqrt(sq);
    for (std::size_t i = 0; i < m; ++i) v[i][j] = raw_weights[j] / wsum * (x[i][j] / norm);
  }
  Vec best(n), worst(n);
  for (std::size_t j = 0; j < n; ++j) {
    double hi = -std::numeric_limits<double>::infinity(), lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      hi = std::max(hi, v[i][j]);
      lo = std::min(lo, v[i][j]);
    }
    best[j] = benefit[j] ? hi : lo;
    worst[j] = benefit[j] ? lo : hi;
  }
  TopsisOut out;
  for (std::size_t i = 0; i < m; ++i) {
    double dp = 0, dm = 0;
    for (std::size_t j = 0; j < n; ++j) {
      dp += (v[i][j] - best[j]) * (v[i][j] - best[j]);
      dm += (v[i][j] - worst[j]) * (v[i][j] - worst[j]);
    }
    out.d_best.push_back(std::sqrt(dp));
    out.d_worst.push_back(std::sqrt(dm));
    out.closeness.push_back(std::sqrt(dm) / (std::sqrt(dp) + std::sqrt(dm)));
  }
  out.rank.assign(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    int better = 0;
    for (std::size_t k = 0; k < m; ++k) {
      if (k == i) continue;
      if (out.closeness[k] > out.closeness[i] || (out.closeness[k] == out.closeness[i] && labels[k] < labels[i])) {
        ++better;
      }
    }
    out.rank[i] = better + 1;
  }
  return out;
}

inline double mi_coleman(double v, double g, double l) {
  return 171.0 - 5.2 * std::log(v) - 0.23 * g - 16.2 * std::log(l);
}

inline double mi_visual_studio(double v, double g, double l) {
  return std::max(0.0, mi_coleman(v, g, l) * 100.0 / 171.0);
}

}  // namespace oracle
