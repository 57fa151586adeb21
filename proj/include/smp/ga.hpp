#pragma once

#include "smp/models/forest.hpp"
#include "smp/parallel.hpp"
#include "smp/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace smp::ga {

using models::Json;

struct GeneBounds {
  int trees_min = 10;
  int trees_max = 200;
  int depth_min = 2;
  int depth_max = 20;
  int leaf_min = 1;
  int leaf_max = 10;
};

/// Feature mask plus the four random-forest genes.
struct Chromosome {
  std::vector<std::uint8_t> mask;
  int n_trees = 100;
  int max_depth = 10;
  int min_samples_leaf = 1;
  double mtry_fraction = 1.0;  // in (0, 1]

  [[nodiscard]] std::vector<std::size_t> selected() const;
  [[nodiscard]] std::size_t selected_count() const noexcept;
  /// mtry = max(1, ceil(mtry_fraction * selected_count)).
  [[nodiscard]] models::RfParams rf_params() const;
  [[nodiscard]] bool valid(std::size_t p, const GeneBounds& bounds) const noexcept;
  [[nodiscard]] std::string key() const;
  [[nodiscard]] Json to_json() const;

  friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

struct GaConfig {
  int population_size = 20;
  int max_generations = 30;  // includes the initial generation
  std::optional<double> time_budget;  // seconds; makes runs non-deterministic
  double crossover_rate = 0.8;
  double mutation_rate = 0.05;
  int elitism_count = 2;
  int tournament_size = 3;
  int cv_folds = 3;
  std::uint64_t seed = 1;
  GeneBounds bounds;
};

void validate(const GaConfig& cfg);
Json to_json(const GaConfig& cfg);

struct GenerationRecord {
  int generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;  // over finite fitness values
  Chromosome best;
};

struct GaHistory {
  std::vector<GenerationRecord> generations;
  Chromosome best;
  double best_fitness = 0.0;
  std::size_t evaluations = 0;        // distinct chromosomes scored
  std::size_t degenerate_evaluations = 0;
  bool stopped_by_time = false;

  /// Header `generation,best_fitness,mean_fitness`.
  [[nodiscard]] std::string to_csv() const;
};

std::vector<Chromosome> init_population(std::size_t p, const GaConfig& cfg);

/// Mean cross-validated RMSE of a forest on the masked columns. Folds and
/// forest seeds derive from cfg.seed only, so the value is a pure function of
/// the chromosome. A training fold with constant target yields +infinity.
double fitness(const Chromosome& ch, const Matrix& x, const Vector& y, const GaConfig& cfg);

/// Indices of the `count` lowest fitnesses; ties go to the lower index.
std::vector<std::size_t> elites(const std::vector<double>& fitnesses, std::size_t count);

/// One tournament: tournament_size distinct entrants, lowest fitness wins,
/// ties go to the lower index.
std::size_t tournament(const std::vector<double>& fitnesses, const GaConfig& cfg, Rng& rng);

/// Parents for the non-elite slots of the next generation.
std::vector<std::size_t> select(const std::vector<double>& fitnesses, const GaConfig& cfg, Rng& rng);

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, const GaConfig& cfg, Rng& rng);

Chromosome mutate(Chromosome ch, const GaConfig& cfg, Rng& rng);

/// Forest restricted to a column subset of the original feature matrix.
class GarfModel final : public models::Predictor {
 public:
  GarfModel(std::vector<std::size_t> features, std::shared_ptr<const models::ForestModel> forest);

  [[nodiscard]] models::Technique technique() const noexcept override { return models::Technique::garf; }
  [[nodiscard]] Vector predict(const Matrix& x) const override;
  [[nodiscard]] Json parameters() const override;
  static std::shared_ptr<const models::Predictor> load(const Json& params);

  [[nodiscard]] const std::vector<std::size_t>& features() const noexcept { return features_; }

 private:
  std::vector<std::size_t> features_;
  std::shared_ptr<const models::ForestModel> forest_;
};

struct GarfResult {
  models::TrainedModel model;
  GaHistory history;
};

/// Evaluate, select, cross over and mutate until max_generations or the time
/// budget; the forest for the best chromosome ever seen is refit on all rows.
/// Fitness evaluations within a generation run in parallel under `exec`.
GarfResult run_garf(const Matrix& x, const Vector& y, const GaConfig& cfg, const Exec& exec = {});

}  // namespace smp::ga
