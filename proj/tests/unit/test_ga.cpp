#include "smp/error.hpp"
#include "smp/ga.hpp"

#include "../support/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace smp;
using namespace smp::ga;

namespace {

GaConfig small_config(std::uint64_t seed) {
  GaConfig cfg;
  cfg.population_size = 8;
  cfg.max_generations = 4;
  cfg.seed = seed;
  cfg.bounds = {5, 20, 2, 8, 1, 4};
  return cfg;
}

Chromosome with_mask(std::size_t p, std::initializer_list<std::size_t> on) {
  Chromosome ch;
  ch.mask.assign(p, 0);
  for (auto i : on) ch.mask[i] = 1;
  ch.n_trees = 10;
  ch.max_depth = 5;
  ch.min_samples_leaf = 1;
  ch.mtry_fraction = 1.0;
  return ch;
}

/// y is a step in column 0; the other columns are noise.
synth::Problem step_problem(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  synth::Problem out{Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p)),
                     Vector(static_cast<Eigen::Index>(n))};
  for (Eigen::Index i = 0; i < out.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.x.cols(); ++j) out.x(i, j) = rng.uniform();
    out.y(i) = out.x(i, 0) > 0.5 ? 10.0 : 0.0;
  }
  return out;
}

double sd(const Vector& y) { return std::sqrt((y.array() - y.mean()).square().mean()); }

}  // namespace

TEST_CASE("initial population is valid, non-empty and seed-deterministic") {
  const auto cfg = small_config(1);
  const auto pop = init_population(10, cfg);
  CHECK(pop.size() == 8);
  for (const auto& ch : pop) {
    CHECK(ch.valid(10, cfg.bounds));
    CHECK(ch.selected_count() >= 1);
  }
  CHECK(init_population(10, cfg) == pop);
  CHECK(init_population(10, small_config(2)) != pop);
  auto bad = cfg;
  bad.population_size = 1;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.elitism_count = 8;
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("chromosome decoding") {
  auto ch = with_mask(6, {1, 3, 4});
  ch.mtry_fraction = 0.5;
  CHECK(ch.selected() == std::vector<std::size_t>{1, 3, 4});
  CHECK(ch.rf_params().mtry == 2);
  ch.mtry_fraction = 0.01;
  CHECK(ch.rf_params().mtry == 1);
  CHECK(ch.key() != with_mask(6, {1, 3}).key());
  CHECK_FALSE(with_mask(6, {}).valid(6, GeneBounds{}));
}

TEST_CASE("fitness: informative feature near zero, deterministic, beats pure noise") {
  const auto prob = step_problem(120, 4, 3);
  const auto cfg = small_config(5);
  const double good = fitness(with_mask(4, {0}), prob.x, prob.y, cfg);
  CHECK(good <= 0.05 * sd(prob.y));
  CHECK(fitness(with_mask(4, {0}), prob.x, prob.y, cfg) == good);

  int informative_wins = 0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto p = step_problem(80, 4, 40 + s);
    const auto c = small_config(s);
    informative_wins += fitness(with_mask(4, {1, 2, 3}), p.x, p.y, c) >= fitness(with_mask(4, {0}), p.x, p.y, c);
  }
  CHECK(informative_wins >= 27);

  const double flat = fitness(with_mask(4, {0}), prob.x, Vector::Constant(120, 2.0), cfg);
  CHECK(std::isinf(flat));
}

TEST_CASE("selection: elites, full tournament and tie handling") {
  const std::vector<double> f{3.0, 1.0, 2.0, 1.0, 5.0};
  CHECK(elites(f, 2) == std::vector<std::size_t>{1, 3});
  auto cfg = small_config(1);
  cfg.population_size = 5;
  cfg.elitism_count = 1;
  cfg.tournament_size = 5;
  Rng rng(3);
  for (int i = 0; i < 20; ++i) CHECK(tournament(f, cfg, rng) == 1);
  cfg.tournament_size = 2;
  Rng a(9), b(9);
  CHECK(select(f, cfg, a) == select(f, cfg, b));
  CHECK(select(f, cfg, a).size() == 4);
  const std::vector<double> equal(5, 1.0);
  Rng c(4);
  for (int i = 0; i < 50; ++i) {
    const auto w = tournament(equal, cfg, c);
    CHECK(w < 4);  // the lowest index among two distinct entrants is never the last one
  }
}

TEST_CASE("crossover: clones at rate zero, equal parents, repaired masks") {
  auto cfg = small_config(1);
  const auto a = with_mask(6, {0, 1, 2});
  auto b = with_mask(6, {3, 4, 5});
  b.n_trees = 7;
  cfg.crossover_rate = 0.0;
  Rng rng(2);
  auto [c1, c2] = crossover(a, b, cfg, rng);
  CHECK(c1 == a);
  CHECK(c2 == b);
  cfg.crossover_rate = 1.0;
  auto [e1, e2] = crossover(a, a, cfg, rng);
  CHECK(e1 == a);
  CHECK(e2 == a);
  for (int t = 0; t < 200; ++t) {
    auto [d1, d2] = crossover(a, b, cfg, rng);
    CHECK(d1.selected_count() >= 1);
    CHECK(d2.selected_count() >= 1);
    CHECK(d1.valid(6, cfg.bounds));
    CHECK(d2.valid(6, cfg.bounds));
  }
}

TEST_CASE("mutation: identity at rate zero, full flip at rate one, invariants kept") {
  auto cfg = small_config(1);
  const auto ch = with_mask(6, {0, 2});
  Rng rng(5);
  cfg.mutation_rate = 0.0;
  CHECK(mutate(ch, cfg, rng) == ch);
  cfg.mutation_rate = 1.0;
  const auto flipped = mutate(ch, cfg, rng);
  CHECK(flipped.mask == std::vector<std::uint8_t>{0, 1, 0, 1, 1, 1});
  const auto all = with_mask(3, {0, 1, 2});
  CHECK(mutate(all, cfg, rng).selected_count() == 1);
  cfg.mutation_rate = 0.3;
  for (int t = 0; t < 500; ++t) CHECK(mutate(ch, cfg, rng).valid(6, cfg.bounds));
}

TEST_CASE("run_garf: single generation, monotone best, serial equals parallel") {
  const auto prob = synth::friedman(80, 3, 6);
  auto one = small_config(3);
  one.max_generations = 1;
  const auto r1 = run_garf(prob.x, prob.y, one);
  CHECK(r1.history.generations.size() == 1);
  CHECK(r1.history.best_fitness == r1.history.generations[0].best_fitness);

  const auto cfg = small_config(4);
  const auto serial = run_garf(prob.x, prob.y, cfg, Exec{1});
  const auto parallel = run_garf(prob.x, prob.y, cfg, Exec{4});
  REQUIRE(serial.history.generations.size() == 4);
  for (std::size_t g = 1; g < serial.history.generations.size(); ++g) {
    CHECK(serial.history.generations[g].best_fitness <= serial.history.generations[g - 1].best_fitness);
  }
  CHECK(serial.history.best == parallel.history.best);
  CHECK(serial.history.to_csv() == parallel.history.to_csv());
  CHECK(serial.model.predict(prob.x) == parallel.model.predict(prob.x));
  CHECK(serial.history.to_csv().rfind("generation,best_fitness,mean_fitness\n", 0) == 0);
  const auto* garf = serial.model.as<GarfModel>();
  REQUIRE(garf);
  CHECK(garf->features() == serial.history.best.selected());
  const auto reloaded = models::TrainedModel::from_json(serial.model.to_json());
  CHECK(reloaded.predict(prob.x) == serial.model.predict(prob.x));
}
