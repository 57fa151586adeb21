#pragma once

// Deterministic synthetic data for tests and benchmarks.

#include "smp/linalg.hpp"
#include "smp/rng.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

namespace synth {

struct Problem {
  smp::Matrix x;
  smp::Vector y;
};

/// Friedman #1 on the first five columns; the remaining `noise` columns are
/// independent uniform draws that carry no signal.
inline Problem friedman(std::size_t n, std::size_t noise, std::uint64_t seed, double sigma = 1.0) {
  smp::Rng rng(seed);
  const auto p = static_cast<Eigen::Index>(5 + noise);
  Problem out{smp::Matrix(static_cast<Eigen::Index>(n), p), smp::Vector(static_cast<Eigen::Index>(n))};
  for (Eigen::Index i = 0; i < out.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < p; ++j) out.x(i, j) = rng.uniform();
    const auto r = out.x.row(i);
    out.y(i) = 10.0 * std::sin(std::numbers::pi * r(0) * r(1)) + 20.0 * (r(2) - 0.5) * (r(2) - 0.5) + 10.0 * r(3) +
               5.0 * r(4) + sigma * rng.normal();
  }
  return out;
}

/// y = a . x + b + noise with uniform inputs.
inline Problem linear(std::size_t n, std::size_t p, std::uint64_t seed, double sigma = 0.1) {
  smp::Rng rng(seed);
  Problem out{smp::Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p)),
              smp::Vector(static_cast<Eigen::Index>(n))};
  for (Eigen::Index i = 0; i < out.x.rows(); ++i) {
    double s = 1.0;
    for (Eigen::Index j = 0; j < out.x.cols(); ++j) {
      out.x(i, j) = rng.uniform();
      s += static_cast<double>(j + 1) * out.x(i, j);
    }
    out.y(i) = s + sigma * rng.normal();
  }
  return out;
}

/// Writes an ARFF file with the 22-attribute KC1 layout (21 method-level
/// metrics plus the boolean defect label) and `rows` synthetic instances.
/// Every 100th row has a zero Halstead volume, which the MI target rejects.
inline void write_kc1_schema(const std::filesystem::path& path, std::size_t rows, std::uint64_t seed) {
  static const char* names[] = {"loc",      "v(g)",    "ev(g)",   "iv(g)",     "n",       "v",
                                "l",        "d",       "i",       "e",         "b",       "t",
                                "lOCode",   "lOComment", "lOBlank", "locCodeAndComment", "uniq_Op", "uniq_Opnd",
                                "total_Op", "total_Opnd", "branchCount"};
  std::ofstream out(path, std::ios::binary);
  out << "% KC1-layout stand-in with synthetic values\n@relation kc1\n\n";
  for (const char* n : names) out << "@attribute " << (std::string(n).find('(') != std::string::npos ? "'" + std::string(n) + "'" : std::string(n)) << " numeric\n";
  out << "@attribute defects {false,true}\n\n@data\n";
  smp::Rng rng(seed);
  for (std::size_t r = 0; r < rows; ++r) {
    const double loc = 1 + static_cast<double>(rng.below(300));
    const double g = 1 + std::floor(loc / (5 + rng.uniform() * 20));
    const double eta1 = 3 + static_cast<double>(rng.below(25));
    const double eta2 = 2 + std::floor(loc * (0.2 + 0.6 * rng.uniform()));
    const double n1 = std::floor(loc * (2 + 2 * rng.uniform()));
    const double n2 = std::floor(n1 * (0.6 + 0.3 * rng.uniform()));
    const double n = n1 + n2;
    const double v = r % 100 == 99 ? 0.0 : n * std::log2(eta1 + eta2);
    const double d = eta1 / 2 * n2 / eta2;
    const double cmt = std::floor(loc * 0.2 * rng.uniform());
    const double blank = std::floor(loc * 0.15 * rng.uniform());
    const double values[] = {loc, g, 1 + std::floor(g / 3), 1 + std::floor(g / 2), n, v, d > 0 ? 1 / d : 0, d,
                             d > 0 ? v / d : 0, d * v, v / 3000, d * v / 18, loc - cmt, cmt, blank, 0, eta1, eta2,
                             n1, n2, 2 * g - 1};
    for (double val : values) out << val << ",";
    out << (rng.bernoulli(0.15) ? "true" : "false") << "\n";
  }
}

}  // namespace synth
