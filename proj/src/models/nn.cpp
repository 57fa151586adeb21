#include "smp/models/nn.hpp"

#include "smp/error.hpp"
#include "smp/rng.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <numeric>

namespace smp::models {

namespace {

double activate(Activation a, double z) noexcept {
  switch (a) {
    case Activation::tanh: return std::tanh(z);
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case Activation::relu: return z > 0.0 ? z : 0.0;
  }
  return z;
}

/// Derivative expressed through the activation value h = f(z).
double activate_grad(Activation a, double h) noexcept {
  switch (a) {
    case Activation::tanh: return 1.0 - h * h;
    case Activation::sigmoid: return h * (1.0 - h);
    case Activation::relu: return h > 0.0 ? 1.0 : 0.0;
  }
  return 1.0;
}

struct Views {
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w1;
  Eigen::Map<const Vector> b1;
  Eigen::Map<const Vector> w2;
  double b2;
};

Views views(const MlpShape& s, const Vector& theta) {
  const Eigen::Index h = s.hidden;
  const Eigen::Index p = s.inputs;
  const double* d = theta.data();
  return Views{{d, h, p}, {d + h * p, h}, {d + h * p + h, h}, d[h * p + 2 * h]};
}

void check_shape(const MlpShape& s, const Vector& theta, const Matrix& x) {
  if (theta.size() != s.size()) {
    throw ModelError(fmt::format("nn: expected {} parameters, got {}", s.size(), theta.size()));
  }
  if (x.cols() != s.inputs) {
    throw ModelError(fmt::format("nn: expected {} input columns, got {}", s.inputs, x.cols()));
  }
}

}  // namespace

std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    case Activation::relu: return "relu";
  }
  return "?";
}

Activation activation_from_string(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "relu") return Activation::relu;
  throw ConfigError(fmt::format("nn: unknown activation '{}' (expected tanh, sigmoid or relu)", name));
}

Vector mlp_forward(const MlpShape& shape, const Vector& theta, const Matrix& x) {
  check_shape(shape, theta, x);
  const auto v = views(shape, theta);
  Matrix hidden = (x * v.w1.transpose()).rowwise() + v.b1.transpose();
  hidden = hidden.unaryExpr([a = shape.activation](double z) { return activate(a, z); });
  return (hidden * v.w2).array() + v.b2;
}

std::pair<double, Vector> mlp_loss_gradient(const MlpShape& shape, const Vector& theta, const Matrix& x,
                                            const Vector& y) {
  check_shape(shape, theta, x);
  const auto v = views(shape, theta);
  const Eigen::Index n = x.rows();
  const Eigen::Index h = shape.hidden;
  const Eigen::Index p = shape.inputs;

  Matrix hidden = (x * v.w1.transpose()).rowwise() + v.b1.transpose();
  hidden = hidden.unaryExpr([a = shape.activation](double z) { return activate(a, z); });
  const Vector residual = ((hidden * v.w2).array() + v.b2).matrix() - y;
  const double loss = residual.squaredNorm() / static_cast<double>(n);

  // d loss / d output = 2 r / n
  const Vector dout = residual * (2.0 / static_cast<double>(n));
  Vector grad(theta.size());
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> g_w1(grad.data(), h, p);
  Eigen::Map<Vector> g_b1(grad.data() + h * p, h);
  Eigen::Map<Vector> g_w2(grad.data() + h * p + h, h);

  g_w2 = hidden.transpose() * dout;
  grad(h * p + 2 * h) = dout.sum();
  const Matrix dz = ((dout * v.w2.transpose()).array() *
                     hidden.unaryExpr([a = shape.activation](double hv) { return activate_grad(a, hv); }).array())
                        .matrix();
  g_w1 = dz.transpose() * x;
  g_b1 = dz.colwise().sum().transpose();
  return {loss, grad};
}

NnModel::NnModel(MlpShape shape, Vector theta, Vector x_min, Vector x_range, double y_shift, double y_scale)
    : shape_(shape), theta_(std::move(theta)), x_min_(std::move(x_min)), x_range_(std::move(x_range)),
      y_shift_(y_shift), y_scale_(y_scale) {}

Vector NnModel::predict(const Matrix& x) const {
  const Matrix scaled = (x.rowwise() - x_min_.transpose()).array().rowwise() / x_range_.transpose().array();
  return (mlp_forward(shape_, theta_, scaled).array() * y_scale_ + y_shift_).matrix();
}

Json NnModel::parameters() const {
  return Json{{"inputs", shape_.inputs},     {"hidden", shape_.hidden},   {"activation", to_string(shape_.activation)},
              {"weights", to_std(theta_)},   {"x_min", to_std(x_min_)},   {"x_range", to_std(x_range_)},
              {"y_shift", y_shift_},         {"y_scale", y_scale_}};
}

std::shared_ptr<const Predictor> NnModel::load(const Json& params) {
  MlpShape shape{params.at("inputs").get<int>(), params.at("hidden").get<int>(),
                 activation_from_string(params.at("activation").get<std::string>())};
  const auto w = params.at("weights").get<std::vector<double>>();
  const auto lo = params.at("x_min").get<std::vector<double>>();
  const auto range = params.at("x_range").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(w.size()) != shape.size()) throw ModelError("nn: serialized weight count mismatch");
  return std::make_shared<NnModel>(shape, from_std(w), from_std(lo), from_std(range), params.at("y_shift").get<double>(),
                                   params.at("y_scale").get<double>());
}

void validate(const NnParams& p) {
  if (p.hidden_units < 1) throw ConfigError("nn: hidden_units must be >= 1");
  if (!(p.learning_rate > 0.0)) throw ConfigError("nn: learning_rate must be positive");
  if (!(p.momentum >= 0.0 && p.momentum < 1.0)) throw ConfigError("nn: momentum must lie in [0, 1)");
  if (p.epochs < 1) throw ConfigError("nn: epochs must be >= 1");
  if (p.batch < 1) throw ConfigError("nn: batch must be >= 1");
}

Json to_json(const NnParams& p) {
  return Json{{"hidden_units", p.hidden_units}, {"activation", to_string(p.activation)},
              {"learning_rate", p.learning_rate}, {"momentum", p.momentum},
              {"epochs", p.epochs},             {"batch", p.batch}};
}

TrainedModel fit_nn(const Matrix& x, const Vector& y, const NnParams& params, std::uint64_t seed, NnTrace* trace) {
  validate(params);
  check_training_data(x, y, "nn");
  const auto start = std::chrono::steady_clock::now();
  auto info = make_info(x, y);
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();

  const Vector x_min = x.colwise().minCoeff().transpose();
  Vector x_range = x.colwise().maxCoeff().transpose() - x_min;
  for (auto& r : x_range) {
    if (!(r > 0.0)) r = 1.0;
  }
  const Matrix xs = (x.rowwise() - x_min.transpose()).array().rowwise() / x_range.transpose().array();
  const double shift = y.mean();
  const double sd = std::sqrt((y.array() - shift).square().mean());
  const double scale = sd > 0.0 ? sd : 1.0;
  const Vector ys = (y.array() - shift) / scale;

  const MlpShape shape{static_cast<int>(p), params.hidden_units, params.activation};
  const Rng root(seed);
  Vector theta(shape.size());
  {
    Rng init = root.derive("init");
    const Eigen::Index h = shape.hidden;
    const double r1 = 1.0 / std::sqrt(static_cast<double>(std::max<Eigen::Index>(1, p)));
    const double r2 = 1.0 / std::sqrt(static_cast<double>(h));
    for (Eigen::Index i = 0; i < h * p + h; ++i) theta(i) = init.uniform(-r1, r1);
    for (Eigen::Index i = h * p + h; i < shape.size(); ++i) theta(i) = init.uniform(-r2, r2);
  }

  Vector velocity = Vector::Zero(theta.size());
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  const auto batch = static_cast<std::size_t>(params.batch);
  NnTrace local;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle = root.derive("epoch", static_cast<std::uint64_t>(epoch));
    shuffle.shuffle(std::span<std::size_t>(order));
    for (std::size_t lo = 0; lo < order.size(); lo += batch) {
      const std::span<const std::size_t> rows(order.data() + lo, std::min(batch, order.size() - lo));
      const auto [loss, grad] = mlp_loss_gradient(shape, theta, take_rows(xs, rows), take_rows(ys, rows));
      (void)loss;
      velocity = params.momentum * velocity - params.learning_rate * grad;
      theta += velocity;
    }
    const double loss = (mlp_forward(shape, theta, xs) - ys).squaredNorm() / static_cast<double>(n);
    if (!std::isfinite(loss)) {
      throw ModelError(fmt::format("nn: training diverged at epoch {} (loss is not finite)", epoch + 1));
    }
    local.loss.push_back(loss);
  }
  if (trace) *trace = local;
  info.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Json hp = to_json(params);
  hp["seed"] = seed;
  return TrainedModel(std::make_shared<NnModel>(shape, std::move(theta), x_min, x_range, shift, scale), std::move(info),
                      std::move(hp));
}

}  // namespace smp::models
