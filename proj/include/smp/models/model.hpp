#pragma once

#include "smp/linalg.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace smp::models {

using Json = nlohmann::json;

enum class Technique { swr, svr, nn, mars, cart, rf, garf };

std::string_view to_string(Technique t) noexcept;
/// Label used in rankings and reports (SWR, SVM, NN, MARS, CART, RF, GARF).
std::string_view display_label(Technique t) noexcept;
Technique technique_from_string(std::string_view name);

/// Fitted state of one technique. Implementations are immutable after fit.
class Predictor {
 public:
  virtual ~Predictor() = default;
  [[nodiscard]] virtual Technique technique() const noexcept = 0;
  [[nodiscard]] virtual Vector predict(const Matrix& x) const = 0;
  [[nodiscard]] virtual Json parameters() const = 0;
};

struct TrainingInfo {
  std::size_t feature_count = 0;
  double target_min = 0.0;
  double target_max = 0.0;
  double seconds = 0.0;
  bool converged = true;
  std::vector<std::string> notes;
};

/// Shareable handle to a fitted predictor plus its training metadata.
class TrainedModel {
 public:
  TrainedModel(std::shared_ptr<const Predictor> predictor, TrainingInfo info, Json hyperparameters);

  [[nodiscard]] Technique technique() const noexcept { return predictor_->technique(); }
  [[nodiscard]] const TrainingInfo& info() const noexcept { return info_; }
  [[nodiscard]] const Json& hyperparameters() const noexcept { return hyperparameters_; }
  [[nodiscard]] const Predictor& predictor() const noexcept { return *predictor_; }

  template <typename T>
  [[nodiscard]] const T* as() const noexcept {
    return dynamic_cast<const T*>(predictor_.get());
  }

  /// Throws ModelError when the column count differs from fit time.
  [[nodiscard]] Vector predict(const Matrix& x) const;

  static constexpr int kSchemaVersion = 1;
  [[nodiscard]] Json to_json() const;
  /// Predict-only reload of a document produced by to_json().
  static TrainedModel from_json(const Json& doc);

 private:
  std::shared_ptr<const Predictor> predictor_;
  TrainingInfo info_;
  Json hyperparameters_;
};

inline Vector predict(const TrainedModel& model, const Matrix& x) { return model.predict(x); }

/// Fills the target range and feature count; used by every fit routine.
TrainingInfo make_info(const Matrix& x, const Vector& y);

/// Throws ModelError unless x and y describe at least one aligned, finite instance.
void check_training_data(const Matrix& x, const Vector& y, std::string_view who);

}  // namespace smp::models
