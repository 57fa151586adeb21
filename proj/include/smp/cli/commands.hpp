#pragma once

#include "smp/cli/report.hpp"

#include <iosfwd>

namespace smp::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kPartialFailure = 2, kInternalError = 3 };

/// ingest -> resolve target -> preprocess -> cross-validate every technique
/// -> TOPSIS per dataset. Failures are collected instead of aborting the run.
BenchmarkReport run_benchmark(const RunConfig& cfg, std::ostream* log = nullptr);

/// Loads, resolves and preprocesses one configured dataset.
ingest::Dataset load_dataset(const DatasetEntry& entry, const ingest::PreprocessOptions& options);

/// Command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smp::cli
