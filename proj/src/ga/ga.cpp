#include "smp/ga.hpp"

#include "smp/error.hpp"
#include "smp/eval.hpp"
#include "smp/ingest.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace smp::ga {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void draw_genes(Chromosome& ch, const GeneBounds& b, Rng& rng, double rate, bool force) {
  if (force || rng.bernoulli(rate)) ch.n_trees = rng.uniform_int(b.trees_min, b.trees_max);
  if (force || rng.bernoulli(rate)) ch.max_depth = rng.uniform_int(b.depth_min, b.depth_max);
  if (force || rng.bernoulli(rate)) ch.min_samples_leaf = rng.uniform_int(b.leaf_min, b.leaf_max);
  if (force || rng.bernoulli(rate)) ch.mtry_fraction = 1.0 - rng.uniform();
}

/// Sets one bit copied from `donor` when the mask is empty.
void repair(Chromosome& ch, const Chromosome& donor, Rng& rng) {
  if (ch.selected_count() > 0) return;
  auto bits = donor.selected();
  if (bits.empty()) {
    bits.resize(ch.mask.size());
    std::iota(bits.begin(), bits.end(), std::size_t{0});
  }
  ch.mask[bits[rng.below(bits.size())]] = 1;
}

}  // namespace

std::vector<std::size_t> Chromosome::selected() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < mask.size(); ++j) {
    if (mask[j]) out.push_back(j);
  }
  return out;
}

std::size_t Chromosome::selected_count() const noexcept {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

models::RfParams Chromosome::rf_params() const {
  models::RfParams rf;
  rf.n_trees = n_trees;
  rf.max_depth = max_depth;
  rf.min_samples_leaf = min_samples_leaf;
  rf.bootstrap = true;
  const auto k = static_cast<double>(selected_count());
  rf.mtry = std::max(1, static_cast<int>(std::ceil(mtry_fraction * k - 1e-12)));
  rf.mtry = std::min(rf.mtry, std::max(1, static_cast<int>(k)));
  return rf;
}

bool Chromosome::valid(std::size_t p, const GeneBounds& b) const noexcept {
  return mask.size() == p && selected_count() >= 1 &&
         std::all_of(mask.begin(), mask.end(), [](std::uint8_t v) { return v <= 1; }) &&
         n_trees >= b.trees_min && n_trees <= b.trees_max && max_depth >= b.depth_min && max_depth <= b.depth_max &&
         min_samples_leaf >= b.leaf_min && min_samples_leaf <= b.leaf_max && mtry_fraction > 0.0 &&
         mtry_fraction <= 1.0;
}

std::string Chromosome::key() const {
  std::string bits;
  for (auto v : mask) bits.push_back(v ? '1' : '0');
  return fmt::format("{}|{}|{}|{}|{:a}", bits, n_trees, max_depth, min_samples_leaf, mtry_fraction);
}

Json Chromosome::to_json() const {
  return Json{{"features", selected()},
              {"n_trees", n_trees},
              {"max_depth", max_depth},
              {"min_samples_leaf", min_samples_leaf},
              {"mtry_fraction", mtry_fraction}};
}

void validate(const GaConfig& cfg) {
  if (cfg.population_size < 2) throw ConfigError("ga: population_size must be >= 2");
  if (cfg.max_generations < 1) throw ConfigError("ga: max_generations must be >= 1");
  if (cfg.time_budget && !(*cfg.time_budget > 0.0)) throw ConfigError("ga: time_budget must be positive");
  if (!(cfg.crossover_rate >= 0.0 && cfg.crossover_rate <= 1.0)) throw ConfigError("ga: crossover_rate must lie in [0, 1]");
  if (!(cfg.mutation_rate >= 0.0 && cfg.mutation_rate <= 1.0)) throw ConfigError("ga: mutation_rate must lie in [0, 1]");
  if (cfg.elitism_count < 1 || cfg.elitism_count >= cfg.population_size) {
    throw ConfigError(fmt::format("ga: elitism_count must lie in [1, population_size) (got {})", cfg.elitism_count));
  }
  if (cfg.tournament_size < 1 || cfg.tournament_size > cfg.population_size) {
    throw ConfigError("ga: tournament_size must lie in [1, population_size]");
  }
  if (cfg.cv_folds < 2) throw ConfigError("ga: cv_folds must be >= 2");
  const auto& b = cfg.bounds;
  if (b.trees_min < 1 || b.trees_min > b.trees_max || b.depth_min < 1 || b.depth_min > b.depth_max ||
      b.leaf_min < 1 || b.leaf_min > b.leaf_max) {
    throw ConfigError("ga: gene bounds must be positive with min <= max");
  }
}

Json to_json(const GaConfig& cfg) {
  Json out{{"population_size", cfg.population_size},
           {"max_generations", cfg.max_generations},
           {"time_budget", cfg.time_budget ? Json(*cfg.time_budget) : Json(nullptr)},
           {"crossover_rate", cfg.crossover_rate},
           {"mutation_rate", cfg.mutation_rate},
           {"elitism_count", cfg.elitism_count},
           {"tournament_size", cfg.tournament_size},
           {"cv_folds", cfg.cv_folds}};
  out["bounds"] = Json{{"n_trees", {cfg.bounds.trees_min, cfg.bounds.trees_max}},
                       {"max_depth", {cfg.bounds.depth_min, cfg.bounds.depth_max}},
                       {"min_samples_leaf", {cfg.bounds.leaf_min, cfg.bounds.leaf_max}}};
  return out;
}

std::string GaHistory::to_csv() const {
  std::string out = "generation,best_fitness,mean_fitness\n";
  for (const auto& g : generations) out += fmt::format("{},{:.17g},{:.17g}\n", g.generation, g.best_fitness, g.mean_fitness);
  return out;
}

std::vector<Chromosome> init_population(std::size_t p, const GaConfig& cfg) {
  validate(cfg);
  if (p == 0) throw DataError("ga: dataset has no feature columns");
  Rng rng = Rng(cfg.seed).derive("init");
  std::vector<Chromosome> population(static_cast<std::size_t>(cfg.population_size));
  for (auto& ch : population) {
    ch.mask.assign(p, 0);
    do {
      for (auto& bit : ch.mask) bit = rng.bernoulli(0.5) ? 1 : 0;
    } while (ch.selected_count() == 0);
    draw_genes(ch, cfg.bounds, rng, 1.0, true);
  }
  return population;
}

double fitness(const Chromosome& ch, const Matrix& x, const Vector& y, const GaConfig& cfg) {
  const auto p = static_cast<std::size_t>(x.cols());
  if (!ch.valid(p, cfg.bounds)) throw ConfigError("ga: chromosome is not valid for this dataset width");
  const auto n = static_cast<std::size_t>(x.rows());
  if (n < static_cast<std::size_t>(cfg.cv_folds)) {
    throw DataError(fmt::format("ga: {} instances cannot fill {} folds", n, cfg.cv_folds));
  }
  const Rng root(cfg.seed);
  const auto plan = ingest::kfold_split(n, cfg.cv_folds, root.derive("fitness-folds").next());
  const std::uint64_t forest_seed = root.derive("fitness-forest").next();
  const Matrix masked = take_cols(x, ch.selected());
  const auto rf = ch.rf_params();
  double total = 0.0;
  for (int f = 0; f < plan.k; ++f) {
    const auto train = plan.train_indices(f);
    const auto test = plan.test_indices(f);
    const Vector y_train = take_rows(y, train);
    if (y_train.maxCoeff() == y_train.minCoeff()) return kInf;
    const auto model = models::fit_rf(take_rows(masked, train), y_train, rf, forest_seed);
    total += eval::rmse(take_rows(y, test), model.predict(take_rows(masked, test)));
  }
  return total / static_cast<double>(plan.k);
}

std::vector<std::size_t> elites(const std::vector<double>& fitnesses, std::size_t count) {
  std::vector<std::size_t> order(fitnesses.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitnesses[a] < fitnesses[b]; });
  order.resize(std::min(count, order.size()));
  return order;
}

std::size_t tournament(const std::vector<double>& fitnesses, const GaConfig& cfg, Rng& rng) {
  const auto entrants = rng.sample_indices(fitnesses.size(), static_cast<std::size_t>(cfg.tournament_size));
  std::size_t winner = entrants.front();
  for (auto i : entrants) {
    if (fitnesses[i] < fitnesses[winner]) winner = i;
  }
  return winner;
}

std::vector<std::size_t> select(const std::vector<double>& fitnesses, const GaConfig& cfg, Rng& rng) {
  const auto slots = static_cast<std::size_t>(cfg.population_size - cfg.elitism_count);
  std::vector<std::size_t> parents(slots);
  for (auto& p : parents) p = tournament(fitnesses, cfg, rng);
  return parents;
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, const GaConfig& cfg, Rng& rng) {
  Chromosome ca = a;
  Chromosome cb = b;
  if (!rng.bernoulli(cfg.crossover_rate)) return {ca, cb};
  const std::size_t p = a.mask.size();
  if (p >= 2) {
    const std::size_t cut = 1 + rng.below(p - 1);
    for (std::size_t j = cut; j < p; ++j) std::swap(ca.mask[j], cb.mask[j]);
  }
  if (rng.bernoulli(0.5)) std::swap(ca.n_trees, cb.n_trees);
  if (rng.bernoulli(0.5)) std::swap(ca.max_depth, cb.max_depth);
  if (rng.bernoulli(0.5)) std::swap(ca.min_samples_leaf, cb.min_samples_leaf);
  if (rng.bernoulli(0.5)) std::swap(ca.mtry_fraction, cb.mtry_fraction);
  repair(ca, a, rng);
  repair(cb, b, rng);
  return {ca, cb};
}

Chromosome mutate(Chromosome ch, const GaConfig& cfg, Rng& rng) {
  const Chromosome before = ch;
  for (auto& bit : ch.mask) {
    if (rng.bernoulli(cfg.mutation_rate)) bit ^= 1;
  }
  draw_genes(ch, cfg.bounds, rng, cfg.mutation_rate, false);
  repair(ch, before, rng);
  return ch;
}

GarfModel::GarfModel(std::vector<std::size_t> features, std::shared_ptr<const models::ForestModel> forest)
    : features_(std::move(features)), forest_(std::move(forest)) {}

Vector GarfModel::predict(const Matrix& x) const { return forest_->predict(take_cols(x, features_)); }

Json GarfModel::parameters() const { return Json{{"features", features_}, {"forest", forest_->parameters()}}; }

std::shared_ptr<const models::Predictor> GarfModel::load(const Json& params) {
  auto forest = std::dynamic_pointer_cast<const models::ForestModel>(models::ForestModel::load(params.at("forest")));
  return std::make_shared<GarfModel>(params.at("features").get<std::vector<std::size_t>>(), std::move(forest));
}

GarfResult run_garf(const Matrix& x, const Vector& y, const GaConfig& cfg, const Exec& exec) {
  validate(cfg);
  models::check_training_data(x, y, "garf");
  const auto start = std::chrono::steady_clock::now();
  const auto p = static_cast<std::size_t>(x.cols());
  const Rng root(cfg.seed);

  GaHistory history;
  history.best_fitness = kInf;
  std::map<std::string, double> memo;
  auto population = init_population(p, cfg);

  for (int gen = 0; gen < cfg.max_generations; ++gen) {
    // Score each distinct unseen chromosome once, in parallel.
    std::vector<const Chromosome*> pending;
    std::map<std::string, std::size_t> queued;
    for (const auto& ch : population) {
      const auto key = ch.key();
      if (!memo.count(key) && !queued.count(key)) {
        queued.emplace(key, pending.size());
        pending.push_back(&ch);
      }
    }
    std::vector<double> scores(pending.size());
    parallel_for(pending.size(), exec, [&](std::size_t i) { scores[i] = fitness(*pending[i], x, y, cfg); });
    for (std::size_t i = 0; i < pending.size(); ++i) {
      memo.emplace(pending[i]->key(), scores[i]);
      if (std::isinf(scores[i])) ++history.degenerate_evaluations;
    }
    history.evaluations += pending.size();

    std::vector<double> fit(population.size());
    for (std::size_t i = 0; i < population.size(); ++i) fit[i] = memo.at(population[i].key());

    const std::size_t best = elites(fit, 1).front();
    double sum = 0.0;
    std::size_t finite = 0;
    for (double f : fit) {
      if (std::isfinite(f)) {
        sum += f;
        ++finite;
      }
    }
    history.generations.push_back(
        {gen, fit[best], finite > 0 ? sum / static_cast<double>(finite) : kInf, population[best]});
    if (fit[best] < history.best_fitness || history.generations.size() == 1) {
      history.best_fitness = fit[best];
      history.best = population[best];
    }

    if (gen + 1 == cfg.max_generations) break;
    if (cfg.time_budget &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >= *cfg.time_budget) {
      history.stopped_by_time = true;
      break;
    }

    Rng rng = root.derive("generation", static_cast<std::uint64_t>(gen));
    std::vector<Chromosome> next;
    next.reserve(population.size());
    for (auto i : elites(fit, static_cast<std::size_t>(cfg.elitism_count))) next.push_back(population[i]);
    const auto parents = select(fit, cfg, rng);
    for (std::size_t i = 0; next.size() < population.size(); i += 2) {
      const auto& a = population[parents[i % parents.size()]];
      const auto& b = population[parents[(i + 1) % parents.size()]];
      auto [ca, cb] = crossover(a, b, cfg, rng);
      next.push_back(mutate(std::move(ca), cfg, rng));
      if (next.size() < population.size()) next.push_back(mutate(std::move(cb), cfg, rng));
    }
    population = std::move(next);
  }

  if (std::isinf(history.best_fitness)) {
    throw DataError("garf: every fitness evaluation hit a constant-target training fold");
  }
  const auto features = history.best.selected();
  const Matrix masked = take_cols(x, features);
  const auto rf = history.best.rf_params();
  models::validate(rf, features.size());
  auto forest = std::make_shared<const models::ForestModel>(
      models::grow_forest(masked, y, rf, root.derive("final-forest").next(), exec));
  auto info = models::make_info(x, y);
  info.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (history.stopped_by_time) info.notes.push_back("garf: stopped by time budget; result is not reproducible");
  if (history.degenerate_evaluations > 0) {
    info.notes.push_back(fmt::format("garf: {} fitness evaluations hit a constant-target fold", history.degenerate_evaluations));
  }
  Json hp = to_json(cfg);
  hp["seed"] = cfg.seed;
  hp["best"] = history.best.to_json();
  hp["best_fitness"] = history.best_fitness;
  return GarfResult{models::TrainedModel(std::make_shared<GarfModel>(features, std::move(forest)), std::move(info),
                                         std::move(hp)),
                    std::move(history)};
}

}  // namespace smp::ga
