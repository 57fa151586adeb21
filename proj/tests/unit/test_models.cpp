#include "smp/error.hpp"
#include "smp/eval.hpp"
#include "smp/models/linear.hpp"
#include "smp/models/spec.hpp"

#include "../support/synthetic.hpp"

#include <doctest.h>

#include <cmath>

using namespace smp;
using namespace smp::models;

namespace {

Matrix column(std::initializer_list<double> v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

double train_rmse(const TrainedModel& m, const Matrix& x, const Vector& y) { return eval::rmse(y, m.predict(x)); }

/// Tree walk: every leaf holds the mean of the training targets routed to it.
void check_leaf_means(const RegressionTree& tree, const Matrix& x, const Vector& y) {
  const auto& nodes = tree.nodes();
  std::vector<double> sum(nodes.size(), 0.0);
  std::vector<std::size_t> count(nodes.size(), 0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    int n = 0;
    while (nodes[static_cast<std::size_t>(n)].feature >= 0) {
      const auto& node = nodes[static_cast<std::size_t>(n)];
      n = x(i, node.feature) <= node.threshold ? node.left : node.right;
    }
    sum[static_cast<std::size_t>(n)] += y(i);
    ++count[static_cast<std::size_t>(n)];
  }
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k].feature >= 0) continue;
    REQUIRE(count[k] == nodes[k].samples);
    CHECK(nodes[k].value == doctest::Approx(sum[k] / static_cast<double>(count[k])).epsilon(1e-12));
  }
}

}  // namespace

TEST_CASE("technique names round trip") {
  for (auto t : {Technique::swr, Technique::svr, Technique::nn, Technique::mars, Technique::cart, Technique::rf,
                 Technique::garf}) {
    CHECK(technique_from_string(to_string(t)) == t);
  }
  CHECK(technique_from_string("svm") == Technique::svr);
  CHECK(display_label(Technique::svr) == "SVM");
  CHECK_THROWS_AS(technique_from_string("xgboost"), ConfigError);
}

TEST_CASE("least squares matches the closed form and falls back to ridge") {
  const Matrix x = with_intercept(column({1, 2, 3, 4}));
  const auto fit = least_squares(x, vec({3, 5, 7, 9}));
  CHECK(fit.coefficients(0) == doctest::Approx(1.0));
  CHECK(fit.coefficients(1) == doctest::Approx(2.0));
  CHECK(fit.rss < 1e-20);
  Matrix dup(4, 2);
  dup << 1, 1, 2, 2, 3, 3, 4, 4;
  CHECK(least_squares(with_intercept(dup), vec({1, 2, 3, 4})).ridge_fallback);
}

TEST_CASE("swr: exact line, constant target and monotone rss path") {
  const auto m = fit_swr(column({1, 2, 3, 4}), vec({3, 6, 9, 12}), {});
  const auto* swr = m.as<SwrModel>();
  REQUIRE(swr);
  CHECK(swr->selected() == std::vector<std::size_t>{0});
  CHECK(std::abs(swr->intercept()) < 1e-9);
  CHECK(swr->slopes()(0) == doctest::Approx(3.0));
  const auto flat = fit_swr(column({1, 2, 3, 4}), Vector::Constant(4, 2.5), {});
  CHECK(flat.as<SwrModel>()->selected().empty());
  CHECK(flat.predict(column({10}))(0) == doctest::Approx(2.5));

  const auto prob = synth::linear(80, 6, 3, 0.5);
  const auto big_model = fit_swr(prob.x, prob.y, {});
  const auto* big = big_model.as<SwrModel>();
  const auto& path = big->rss_path();
  for (std::size_t i = 1; i < path.size(); ++i) CHECK(path[i] <= path[i - 1]);
  for (auto j : big->selected()) CHECK(j < 6u);
}

TEST_CASE("swr rejects pure-noise features most of the time") {
  int empty = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(1000 + s);
    Matrix x(200, 5);
    Vector y(200);
    for (Eigen::Index i = 0; i < 200; ++i) {
      for (Eigen::Index j = 0; j < 5; ++j) x(i, j) = rng.normal();
      y(i) = rng.normal();
    }
    SwrParams p;
    p.alpha_enter = 0.01;
    empty += fit_swr(x, y, p).as<SwrModel>()->selected().empty();
  }
  CHECK(empty >= 45);
}

TEST_CASE("cart: four-point fixture, constant target and pure leaves") {
  const auto m = fit_cart(column({0, 1, 2, 3}), vec({0, 0, 10, 10}), {});
  const auto& tree = m.as<CartModel>()->tree();
  CHECK(tree.nodes()[0].feature == 0);
  CHECK(tree.nodes()[0].threshold == 1.5);
  CHECK(m.predict(column({0.5}))(0) == 0.0);
  CHECK(m.predict(column({2.5}))(0) == 10.0);

  const auto flat = fit_cart(column({0, 1, 2}), Vector::Constant(3, 4.0), {});
  CHECK(flat.as<CartModel>()->tree().nodes().size() == 1);
  CHECK(flat.predict(column({7}))(0) == 4.0);

  const auto prob = synth::friedman(60, 2, 4);
  const auto full = fit_cart(prob.x, prob.y, {});
  CHECK(train_rmse(full, prob.x, prob.y) == 0.0);
  check_leaf_means(full.as<CartModel>()->tree(), prob.x, prob.y);
  CartParams shallow;
  shallow.max_depth = 3;
  shallow.min_samples_leaf = 4;
  const auto s = fit_cart(prob.x, prob.y, shallow);
  CHECK(s.as<CartModel>()->tree().depth() <= 3);
  check_leaf_means(s.as<CartModel>()->tree(), prob.x, prob.y);
  for (const auto& node : s.as<CartModel>()->tree().nodes()) CHECK(node.samples >= 4u);
}

TEST_CASE("rf with one full tree and no bootstrap equals cart") {
  Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    const auto n = static_cast<Eigen::Index>(5 + rng.below(30));
    const auto p = static_cast<Eigen::Index>(1 + rng.below(4));
    Matrix x(n, p);
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) x(i, j) = static_cast<double>(rng.below(6));
      y(i) = rng.normal();
    }
    RfParams rf;
    rf.n_trees = 1;
    rf.bootstrap = false;
    rf.mtry = static_cast<int>(p);
    const auto a = fit_rf(x, y, rf, rng.next());
    const auto b = fit_cart(x, y, {});
    CHECK(a.predict(x) == b.predict(x));
  }
}

TEST_CASE("rf is deterministic and parallel growth matches the serial loop") {
  const auto prob = synth::friedman(120, 5, 9);
  RfParams rf;
  rf.n_trees = 30;
  const auto a = fit_rf(prob.x, prob.y, rf, 5, Exec{1});
  const auto b = fit_rf(prob.x, prob.y, rf, 5, Exec{4});
  CHECK(a.predict(prob.x) == b.predict(prob.x));
  const auto serial = grow_forest_serial(prob.x, prob.y, rf, 5);
  CHECK(ForestModel(serial).predict(prob.x) == a.predict(prob.x));
  CHECK(fit_rf(prob.x, prob.y, rf, 6).predict(prob.x) != a.predict(prob.x));
  CHECK_THROWS_AS(validate(RfParams{0}, 3), ConfigError);
  RfParams wide;
  wide.mtry = 9;
  CHECK_THROWS_AS(validate(wide, 3), ConfigError);
}

TEST_CASE("rf beats a single cart on held-out friedman data in most seeds") {
  int wins = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto train = synth::friedman(200, 5, 100 + s);
    const auto test = synth::friedman(200, 5, 500 + s);
    RfParams rf;
    rf.n_trees = 50;
    const double forest = eval::rmse(test.y, fit_rf(train.x, train.y, rf, s).predict(test.x));
    const double tree = eval::rmse(test.y, fit_cart(train.x, train.y, {}).predict(test.x));
    wins += forest <= tree;
  }
  CHECK(wins >= 14);
}

TEST_CASE("svr: constant target, translation and a linear fit") {
  const auto prob = synth::linear(40, 2, 21);
  const auto flat = fit_svr(prob.x, Vector::Constant(40, 3.0), {});
  CHECK((flat.predict(prob.x).array() - 3.0).abs().maxCoeff() < 1e-9);
  CHECK(flat.as<SvrModel>()->dual_coefficients().size() == 0);

  SvrParams raw;
  raw.standardize_target = false;
  const auto a = fit_svr(prob.x, prob.y, raw);
  const auto b = fit_svr(prob.x, (prob.y.array() + 10.0).matrix(), raw);
  CHECK(((b.predict(prob.x) - a.predict(prob.x)).array() - 10.0).abs().maxCoeff() < 1e-6);

  Rng rng(4);
  Matrix x(60, 1), xt(30, 1);
  for (Eigen::Index i = 0; i < 60; ++i) x(i, 0) = rng.uniform(-1, 1);
  for (Eigen::Index i = 0; i < 30; ++i) xt(i, 0) = rng.uniform(-1, 1);
  SvrParams lin;
  lin.kernel = Kernel::linear;
  lin.epsilon = 0.01;
  lin.c = 1000;
  lin.standardize_target = false;
  const auto line = fit_svr(x, 2.0 * x.col(0), lin);
  CHECK(line.info().converged);
  CHECK(eval::rmse(2.0 * xt.col(0), line.predict(xt)) <= 0.02);
  CHECK_THROWS_AS(kernel_from_string("poly"), ConfigError);
  SvrParams bad;
  bad.c = 0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("svr flags non-convergence at max_iter") {
  const auto prob = synth::friedman(80, 0, 2);
  SvrParams p;
  p.max_iter = 3;
  const auto m = fit_svr(prob.x, prob.y, p);
  CHECK_FALSE(m.info().converged);
  CHECK(m.predict(prob.x).allFinite());
}

TEST_CASE("nn analytic gradient agrees with central differences") {
  Rng rng(8);
  for (auto act : {Activation::tanh, Activation::sigmoid, Activation::relu}) {
    for (int t = 0; t < 10; ++t) {
      const MlpShape shape{static_cast<int>(1 + rng.below(4)), static_cast<int>(1 + rng.below(6)), act};
      Vector theta(shape.size());
      for (Eigen::Index k = 0; k < theta.size(); ++k) theta(k) = rng.uniform(-1, 1);
      Matrix x(12, shape.inputs);
      Vector y(12);
      for (Eigen::Index i = 0; i < 12; ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform();
        y(i) = rng.normal();
      }
      const auto [loss, grad] = mlp_loss_gradient(shape, theta, x, y);
      CHECK(std::isfinite(loss));
      for (Eigen::Index k = 0; k < theta.size(); ++k) {
        const double h = 1e-6;
        Vector up = theta, down = theta;
        up(k) += h;
        down(k) -= h;
        const double fd = (mlp_loss_gradient(shape, up, x, y).first - mlp_loss_gradient(shape, down, x, y).first) /
                          (2 * h);
        CHECK(std::abs(fd - grad(k)) <= 1e-4 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("nn: deterministic, learns a constant, and reports divergence") {
  const auto prob = synth::linear(50, 3, 2);
  NnTrace ta, tb;
  const auto a = fit_nn(prob.x, prob.y, {}, 9, &ta);
  const auto b = fit_nn(prob.x, prob.y, {}, 9, &tb);
  CHECK(a.as<NnModel>()->weights() == b.as<NnModel>()->weights());
  CHECK(ta.loss == tb.loss);
  CHECK(ta.loss.back() < ta.loss.front());

  const auto flat = fit_nn(prob.x, Vector::Constant(50, 7.0), {}, 1);
  CHECK((flat.predict(prob.x).array() - 7.0).abs().maxCoeff() <= 0.01 * 8.0);

  NnParams wild;
  wild.learning_rate = 1e6;
  wild.activation = Activation::relu;
  try {
    (void)fit_nn(prob.x, prob.y, wild, 1);
    FAIL("expected divergence");
  } catch (const ModelError& e) {
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("mars recovers a single hinge and keeps only the intercept for a constant") {
  Matrix x(9, 1);
  Vector y(9);
  for (Eigen::Index i = 0; i < 9; ++i) {
    x(i, 0) = 0.5 * static_cast<double>(i);
    y(i) = std::max(0.0, x(i, 0) - 2.0);
  }
  MarsTrace trace;
  const auto m = fit_mars(x, y, {}, &trace);
  CHECK(train_rmse(m, x, y) <= 1e-6);
  for (std::size_t i = 1; i < trace.forward_rss.size(); ++i) CHECK(trace.forward_rss[i] <= trace.forward_rss[i - 1] + 1e-12);

  const auto flat = fit_mars(x, Vector::Constant(9, 1.5), {});
  CHECK(flat.as<MarsModel>()->terms().size() == 1);
  CHECK(flat.as<MarsModel>()->terms()[0].empty());
  CHECK(flat.predict(x)(3) == doctest::Approx(1.5));
}

TEST_CASE("mars gcv and interactions") {
  CHECK(gcv(10.0, 100, 1, 3.0) == doctest::Approx(0.1 / (0.99 * 0.99)));
  CHECK(std::isinf(gcv(1.0, 5, 5, 3.0)));
  const auto prob = synth::friedman(150, 0, 12, 0.1);
  MarsParams p;
  p.max_interaction = 2;
  const auto m = fit_mars(prob.x, prob.y, p);
  std::size_t max_degree = 0;
  for (const auto& t : m.as<MarsModel>()->terms()) max_degree = std::max(max_degree, t.size());
  CHECK(max_degree <= 2);
  CHECK(train_rmse(m, prob.x, prob.y) < prob.y.array().pow(2).mean());
}

TEST_CASE("every technique predicts one finite value per row and checks the width") {
  const auto prob = synth::friedman(60, 1, 3);
  for (auto t : {Technique::swr, Technique::svr, Technique::nn, Technique::mars, Technique::cart, Technique::rf}) {
    CAPTURE(to_string(t));
    const auto m = fit(default_spec(t, 4), prob.x, prob.y);
    const auto p = m.predict(prob.x);
    CHECK(p.size() == 60);
    CHECK(p.allFinite());
    CHECK(m.info().feature_count == 6u);
    try {
      (void)m.predict(prob.x.leftCols(3));
      FAIL("expected ModelError");
    } catch (const ModelError& e) {
      CHECK(std::string(e.what()).find('6') != std::string::npos);
      CHECK(std::string(e.what()).find('3') != std::string::npos);
    }
    const auto reloaded = TrainedModel::from_json(m.to_json());
    CHECK(reloaded.predict(prob.x) == p);
    CHECK(fit(default_spec(t, 4), prob.x, prob.y).predict(prob.x) == p);
  }
}

TEST_CASE("spec overrides are validated") {
  const auto spec = make_spec(Technique::svr, Json{{"C", 10}, {"kernel", "linear"}}, 1);
  CHECK(std::get<SvrParams>(spec.params).c == 10);
  CHECK_THROWS_AS(make_spec(Technique::svr, Json{{"gama", 1}}, 1), ConfigError);
  CHECK_THROWS_AS(make_spec(Technique::nn, Json{{"hidden_units", 0}}, 1), ConfigError);
  CHECK_THROWS_AS(make_spec(Technique::mars, Json{{"max_terms", "many"}}, 1), ConfigError);
  const auto garf = make_spec(Technique::garf, Json{{"bounds", {{"n_trees", {5, 20}}}}}, 77);
  CHECK(std::get<ga::GaConfig>(garf.params).bounds.trees_max == 20);
  CHECK(std::get<ga::GaConfig>(garf.params).seed == 77);
  CHECK_THROWS_AS(make_spec(Technique::garf, Json{{"bounds", {{"n_trees", {30, 20}}}}}, 1), ConfigError);
  Matrix x = Matrix::Ones(3, 1);
  x(1, 0) = std::nan("");
  CHECK_THROWS_AS(check_training_data(x, Vector::Ones(3), "test"), ModelError);
  CHECK_THROWS_AS(check_training_data(Matrix::Ones(3, 1), Vector::Ones(2), "test"), ModelError);
}
