#include "smp/eval.hpp"

#include "smp/error.hpp"
#include "smp/rng.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>

namespace smp::eval {

namespace {

void check_pair(const Vector& actual, const Vector& predicted, Eigen::Index min_size, std::string_view who) {
  if (actual.size() != predicted.size()) {
    throw DataError(fmt::format("{}: {} actual values but {} predictions", who, actual.size(), predicted.size()));
  }
  if (actual.size() < min_size) {
    throw DataError(fmt::format("{}: needs at least {} pairs (got {})", who, min_size, actual.size()));
  }
}

std::string format_optional(const std::optional<double>& v) {
  return v ? fmt::format("{:.17g}", *v) : std::string();
}

FoldRecord run_fold(const models::RegressorSpec& spec, const ingest::Dataset& data, const ingest::FoldPlan& plan,
                    int fold, const Exec& inner) {
  const auto start = std::chrono::steady_clock::now();
  const auto train = plan.train_indices(fold);
  const auto test = plan.test_indices(fold);
  const Vector y_train = take_rows(data.target, train);
  if (y_train.size() == 0 || y_train.maxCoeff() == y_train.minCoeff()) {
    throw DataError(fmt::format("{} on {}: training fold {} has a constant target", models::to_string(spec.technique),
                                data.name, fold));
  }
  models::RegressorSpec fold_spec = spec;
  fold_spec.seed = Rng(spec.seed).derive("fold", static_cast<std::uint64_t>(fold)).next();
  FoldRecord rec;
  rec.fold = fold;
  rec.train_size = train.size();
  rec.test_size = test.size();
  try {
    const auto model = models::fit(fold_spec, take_rows(data.features, train), y_train, inner);
    rec.metrics = score(take_rows(data.target, test), model.predict(take_rows(data.features, test)));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ModelError(fmt::format("{} on {} fold {}: {}", models::to_string(spec.technique), data.name, fold, e.what()));
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

BenchRow aggregate(const models::RegressorSpec& spec, const ingest::Dataset& data, std::vector<FoldRecord> folds,
                   double seconds) {
  BenchRow row;
  row.dataset = data.name;
  row.technique = spec.technique;
  row.folds = std::move(folds);
  row.seconds = seconds;
  double mae_sum = 0.0, rmse_sum = 0.0, rel_sum = 0.0, r2_sum = 0.0;
  std::size_t rel_n = 0, r2_n = 0;
  for (const auto& f : row.folds) {
    mae_sum += f.metrics.mae;
    rmse_sum += f.metrics.rmse;
    if (f.metrics.mae_rel) {
      rel_sum += *f.metrics.mae_rel;
      ++rel_n;
    }
    if (f.metrics.r2) {
      r2_sum += *f.metrics.r2;
      ++r2_n;
    }
  }
  const auto k = static_cast<double>(row.folds.size());
  row.mean.mae = mae_sum / k;
  row.mean.rmse = rmse_sum / k;
  if (rel_n > 0) row.mean.mae_rel = rel_sum / static_cast<double>(rel_n);
  if (r2_n > 0) row.mean.r2 = r2_sum / static_cast<double>(r2_n);
  if (rel_n < row.folds.size()) {
    row.notes.push_back(fmt::format("mae_rel undefined on {} of {} folds (zero actual values)", row.folds.size() - rel_n,
                                    row.folds.size()));
  }
  if (r2_n < row.folds.size()) {
    row.notes.push_back(
        fmt::format("r2 undefined on {} of {} folds (constant test target)", row.folds.size() - r2_n, row.folds.size()));
  }
  return row;
}

}  // namespace

double mae(const Vector& actual, const Vector& predicted, MaeMode mode) {
  check_pair(actual, predicted, 1, "mae");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < actual.size(); ++i) {
    const double err = std::abs(actual(i) - predicted(i));
    if (mode == MaeMode::relative) {
      if (actual(i) == 0.0) throw DomainError(fmt::format("relative mae: actual value at index {} is zero", i));
      sum += err / std::abs(actual(i));
    } else {
      sum += err;
    }
  }
  return sum / static_cast<double>(actual.size());
}

double rmse(const Vector& actual, const Vector& predicted) {
  check_pair(actual, predicted, 1, "rmse");
  return std::sqrt((actual - predicted).squaredNorm() / static_cast<double>(actual.size()));
}

double r_squared(const Vector& actual, const Vector& predicted) {
  check_pair(actual, predicted, 2, "r_squared");
  const double mean = actual.mean();
  const double tss = (actual.array() - mean).square().sum();
  if (!(tss > 0.0)) throw DomainError("r_squared: actual values have zero variance");
  return 1.0 - (actual - predicted).squaredNorm() / tss;
}

MetricTriple score(const Vector& actual, const Vector& predicted) {
  MetricTriple m;
  m.mae = mae(actual, predicted);
  m.rmse = rmse(actual, predicted);
  if ((actual.array() != 0.0).all()) m.mae_rel = mae(actual, predicted, MaeMode::relative);
  if (actual.size() >= 2 && actual.maxCoeff() > actual.minCoeff()) m.r2 = r_squared(actual, predicted);
  return m;
}

BenchRow cross_validate_serial(const models::RegressorSpec& spec, const ingest::Dataset& data,
                               const ingest::FoldPlan& plan) {
  if (plan.assignments.size() != data.instances()) {
    throw DataError(fmt::format("fold plan covers {} instances but {} has {}", plan.assignments.size(), data.name,
                                data.instances()));
  }
  const auto start = std::chrono::steady_clock::now();
  std::vector<FoldRecord> folds;
  for (int f = 0; f < plan.k; ++f) folds.push_back(run_fold(spec, data, plan, f, Exec::sequential()));
  return aggregate(spec, data, std::move(folds),
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

BenchRow cross_validate(const models::RegressorSpec& spec, const ingest::Dataset& data, const ingest::FoldPlan& plan,
                        const Exec& exec) {
  if (exec.serial()) return cross_validate_serial(spec, data, plan);
  if (plan.assignments.size() != data.instances()) {
    throw DataError(fmt::format("fold plan covers {} instances but {} has {}", plan.assignments.size(), data.name,
                                data.instances()));
  }
  const auto start = std::chrono::steady_clock::now();
  std::vector<FoldRecord> folds(static_cast<std::size_t>(plan.k));
  parallel_for(folds.size(), exec, [&](std::size_t f) {
    folds[f] = run_fold(spec, data, plan, static_cast<int>(f), Exec::sequential());
  });
  return aggregate(spec, data, std::move(folds),
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

std::string to_csv(const std::vector<BenchRow>& rows) {
  std::string out = "dataset,technique,fold,mae,mae_rel,rmse,r2,seconds\n";
  for (const auto& row : rows) {
    const auto tech = models::to_string(row.technique);
    for (const auto& f : row.folds) {
      out += fmt::format("{},{},{},{:.17g},{},{:.17g},{},{:.6f}\n", row.dataset, tech, f.fold, f.metrics.mae,
                         format_optional(f.metrics.mae_rel), f.metrics.rmse, format_optional(f.metrics.r2), f.seconds);
    }
    out += fmt::format("{},{},mean,{:.17g},{},{:.17g},{},{:.6f}\n", row.dataset, tech, row.mean.mae,
                       format_optional(row.mean.mae_rel), row.mean.rmse, format_optional(row.mean.r2), row.seconds);
  }
  return out;
}

}  // namespace smp::eval
