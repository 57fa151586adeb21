#pragma once

#include "smp/ga.hpp"
#include "smp/models/forest.hpp"
#include "smp/models/mars.hpp"
#include "smp/models/nn.hpp"
#include "smp/models/svr.hpp"
#include "smp/models/swr.hpp"
#include "smp/models/tree.hpp"
#include "smp/parallel.hpp"

#include <cstdint>
#include <variant>

namespace smp::models {

using TechniqueParams = std::variant<SwrParams, SvrParams, NnParams, MarsParams, CartParams, RfParams, ga::GaConfig>;

/// Declarative model configuration: technique, its hyperparameters, seed.
struct RegressorSpec {
  Technique technique = Technique::rf;
  TechniqueParams params = RfParams{};
  std::uint64_t seed = 0;
};

RegressorSpec default_spec(Technique technique, std::uint64_t seed = 0);

/// Defaults overlaid with `overrides`; unknown keys and out-of-range values
/// raise ConfigError.
RegressorSpec make_spec(Technique technique, const Json& overrides, std::uint64_t seed);

/// Fully resolved hyperparameters, including the defaults that were filled in.
Json params_to_json(const RegressorSpec& spec);

void validate(const RegressorSpec& spec);

/// Fits the technique named by `spec`. `exec` bounds the workers used by
/// the techniques that parallelize internally (rf, garf).
TrainedModel fit(const RegressorSpec& spec, const Matrix& x, const Vector& y, const Exec& exec = {});

}  // namespace smp::models
