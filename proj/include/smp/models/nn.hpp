#pragma once

#include "smp/models/model.hpp"

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace smp::models {

enum class Activation { tanh, sigmoid, relu };

std::string_view to_string(Activation a) noexcept;
Activation activation_from_string(std::string_view name);

struct NnParams {
  int hidden_units = 8;
  Activation activation = Activation::tanh;
  double learning_rate = 0.05;
  double momentum = 0.0;
  int epochs = 200;
  int batch = 16;
};

/// One hidden layer, linear output. Parameters are kept flat in the order
/// W1 (hidden x p, row-major), b1, w2, b2.
struct MlpShape {
  int inputs = 0;
  int hidden = 0;
  Activation activation = Activation::tanh;

  [[nodiscard]] Eigen::Index size() const noexcept {
    return static_cast<Eigen::Index>(hidden) * (inputs + 2) + 1;
  }
};

Vector mlp_forward(const MlpShape& shape, const Vector& theta, const Matrix& x);

/// Mean squared error over (x, y) and its gradient with respect to theta.
std::pair<double, Vector> mlp_loss_gradient(const MlpShape& shape, const Vector& theta, const Matrix& x,
                                            const Vector& y);

class NnModel final : public Predictor {
 public:
  NnModel(MlpShape shape, Vector theta, Vector x_min, Vector x_range, double y_shift, double y_scale);

  [[nodiscard]] Technique technique() const noexcept override { return Technique::nn; }
  [[nodiscard]] Vector predict(const Matrix& x) const override;
  [[nodiscard]] Json parameters() const override;
  static std::shared_ptr<const Predictor> load(const Json& params);

  [[nodiscard]] const Vector& weights() const noexcept { return theta_; }
  [[nodiscard]] const MlpShape& shape() const noexcept { return shape_; }

 private:
  MlpShape shape_;
  Vector theta_;
  Vector x_min_;
  Vector x_range_;
  double y_shift_;
  double y_scale_;
};

void validate(const NnParams& p);
Json to_json(const NnParams& p);

struct NnTrace {
  std::vector<double> loss;  // full-batch training loss after each epoch (standardized units)
};

/// Inputs are rescaled to [0, 1] with the training min/max and the target is
/// standardized before training. Initial weights come from
/// Rng(seed).derive("init"); epoch e shuffles with derive("epoch", e).
/// Throws ModelError naming the epoch if the loss stops being finite.
TrainedModel fit_nn(const Matrix& x, const Vector& y, const NnParams& params, std::uint64_t seed,
                    NnTrace* trace = nullptr);

}  // namespace smp::models
