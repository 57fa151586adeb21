#include "smp/models/swr.hpp"

#include "smp/error.hpp"
#include "smp/models/linear.hpp"

#include <boost/math/distributions/fisher_f.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <limits>

namespace smp::models {

SwrModel::SwrModel(std::vector<std::size_t> selected, double intercept, Vector slopes, std::vector<double> rss_path)
    : selected_(std::move(selected)), intercept_(intercept), slopes_(std::move(slopes)), rss_path_(std::move(rss_path)) {}

Vector SwrModel::predict(const Matrix& x) const {
  Vector out = Vector::Constant(x.rows(), intercept_);
  for (std::size_t j = 0; j < selected_.size(); ++j) {
    out += slopes_(static_cast<Eigen::Index>(j)) * x.col(static_cast<Eigen::Index>(selected_[j]));
  }
  return out;
}

Json SwrModel::parameters() const {
  return Json{{"selected", selected_}, {"intercept", intercept_}, {"slopes", to_std(slopes_)}, {"rss_path", rss_path_}};
}

std::shared_ptr<const Predictor> SwrModel::load(const Json& params) {
  const auto slopes = params.at("slopes").get<std::vector<double>>();
  return std::make_shared<SwrModel>(params.at("selected").get<std::vector<std::size_t>>(),
                                    params.at("intercept").get<double>(), from_std(slopes),
                                    params.at("rss_path").get<std::vector<double>>());
}

void validate(const SwrParams& p) {
  if (!(p.alpha_enter > 0.0 && p.alpha_enter < 1.0)) {
    throw ConfigError(fmt::format("swr: alpha_enter must lie in (0, 1) (got {})", p.alpha_enter));
  }
  if (p.max_features < 0) throw ConfigError("swr: max_features must be >= 0");
}

Json to_json(const SwrParams& p) { return Json{{"alpha_enter", p.alpha_enter}, {"max_features", p.max_features}}; }

TrainedModel fit_swr(const Matrix& x, const Vector& y, const SwrParams& params) {
  validate(params);
  check_training_data(x, y, "swr");
  const auto start = std::chrono::steady_clock::now();
  const auto n = x.rows();
  const auto p = static_cast<std::size_t>(x.cols());
  auto info = make_info(x, y);

  std::vector<bool> eligible(p);
  for (std::size_t j = 0; j < p; ++j) {
    const auto col = x.col(static_cast<Eigen::Index>(j));
    eligible[j] = col.maxCoeff() > col.minCoeff();
  }

  std::vector<std::size_t> selected;
  double rss = (y.array() - y.mean()).square().sum();
  std::vector<double> rss_path{rss};
  const std::size_t limit = params.max_features > 0 ? static_cast<std::size_t>(params.max_features) : p;

  while (selected.size() < limit) {
    std::size_t best = p;
    double best_rss = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p; ++j) {
      if (!eligible[j]) continue;
      auto cols = selected;
      cols.push_back(j);
      const double candidate = least_squares(with_intercept(take_cols(x, cols)), y).rss;
      if (candidate < best_rss) {
        best_rss = candidate;
        best = j;
      }
    }
    if (best == p) break;
    const double df2 = static_cast<double>(n) - static_cast<double>(selected.size() + 1) - 1.0;
    const double reduction = rss - best_rss;
    if (df2 <= 0.0 || !(reduction > 0.0)) break;
    double p_value = 0.0;
    if (best_rss > 0.0) {
      const double f = reduction / (best_rss / df2);
      boost::math::fisher_f dist(1.0, df2);
      p_value = boost::math::cdf(boost::math::complement(dist, f));
    }
    if (!(p_value < params.alpha_enter)) break;
    selected.push_back(best);
    eligible[best] = false;
    rss = best_rss;
    rss_path.push_back(rss);
  }

  const auto fit = least_squares(with_intercept(take_cols(x, selected)), y);
  if (fit.ridge_fallback) info.notes.emplace_back("singular design on the selected set; ridge fallback lambda=1e-8");
  const double intercept = fit.coefficients(0);
  Vector slopes = fit.coefficients.tail(fit.coefficients.size() - 1);
  info.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return TrainedModel(std::make_shared<SwrModel>(std::move(selected), intercept, std::move(slopes), std::move(rss_path)),
                      std::move(info), to_json(params));
}

}  // namespace smp::models
