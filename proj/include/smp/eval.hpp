#pragma once

#include "smp/ingest.hpp"
#include "smp/models/spec.hpp"
#include "smp/parallel.hpp"

#include <optional>
#include <string>
#include <vector>

namespace smp::eval {

enum class MaeMode { standard, relative };

/// standard: mean |a - p|. relative: mean |a - p| / |a|, undefined at a = 0.
double mae(const Vector& actual, const Vector& predicted, MaeMode mode = MaeMode::standard);
double rmse(const Vector& actual, const Vector& predicted);
/// 1 - RSS / TSS; throws DomainError when the actual values are constant.
double r_squared(const Vector& actual, const Vector& predicted);

struct MetricTriple {
  double mae = 0.0;
  std::optional<double> mae_rel;  // absent when some actual value is zero
  double rmse = 0.0;
  std::optional<double> r2;       // absent when the fold's actual values are constant
};

/// All metrics that are defined for the pair.
MetricTriple score(const Vector& actual, const Vector& predicted);

struct FoldRecord {
  int fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  MetricTriple metrics;
  double seconds = 0.0;
};

struct BenchRow {
  std::string dataset;
  models::Technique technique = models::Technique::rf;
  std::vector<FoldRecord> folds;
  /// Arithmetic means over the folds where each metric is defined.
  MetricTriple mean;
  double seconds = 0.0;
  std::vector<std::string> notes;
};

/// Fits on k-1 folds and scores the held-out fold, for every fold. Fold f
/// trains with seed Rng(spec.seed).derive("fold", f). Folds run in parallel
/// under `exec` and are gathered in fold order.
BenchRow cross_validate(const models::RegressorSpec& spec, const ingest::Dataset& data, const ingest::FoldPlan& plan,
                        const Exec& exec = {});

/// Reference implementation of cross_validate: plain fold loop.
BenchRow cross_validate_serial(const models::RegressorSpec& spec, const ingest::Dataset& data,
                               const ingest::FoldPlan& plan);

/// Header `dataset,technique,fold,mae,mae_rel,rmse,r2,seconds`; one line per
/// fold followed by a `mean` line. Undefined metrics are left empty.
std::string to_csv(const std::vector<BenchRow>& rows);

}  // namespace smp::eval
