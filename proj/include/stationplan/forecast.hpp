#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "stationplan/json_io.hpp"
#include "stationplan/tensor.hpp"

namespace stationplan {

class Forecaster;

enum class ModelKind { LinearRidge, Plugin };

struct ForecastConfig;

using ForecasterFactory =
    std::function<std::unique_ptr<Forecaster>(const SpatioTemporalTensor&, const ForecastConfig&)>;

struct ForecastConfig {
  int history = 3;      // T: lagged months fed to the model
  int horizon = 1;      // K: months rolled out by predict()
  ModelKind kind = ModelKind::LinearRidge;
  double ridge = 1.0;   // penalty on standardized inputs
  ForecasterFactory plugin;  // required when kind == Plugin
};

void validate(const ForecastConfig& cfg);

/// A per-cell one-step predictor of next month's fire count from the current
/// month's grid features and the last `history()` counts.
class Forecaster {
 public:
  virtual ~Forecaster() = default;

  virtual const GridSpec& grid() const noexcept = 0;
  virtual std::span<const std::string> feature_names() const noexcept = 0;
  virtual int history() const noexcept = 0;

  /// Unclamped model output for one cell.  `lags` runs oldest to newest.
  virtual double score(std::size_t cell, std::span<const double> features,
                       std::span<const double> lags) const = 0;

  /// Attribution baseline (training means of the features) for a cell.
  virtual std::span<const double> baseline_features(std::size_t cell) const = 0;

  /// Shapley values of the features for one cell, lags held fixed.  The
  /// default enumerates coalitions with shapley_exact.
  virtual std::vector<double> attribute_cell(std::size_t cell, std::span<const double> features,
                                             std::span<const double> lags) const;
};

/// Per-cell ridge regression (the default model).  Weights are stored in
/// original units: [features..., lags oldest->newest].
class FittedForecaster final : public Forecaster {
 public:
  FittedForecaster(GridSpec grid, std::vector<std::string> features, int history,
                   std::vector<double> weights, std::vector<double> intercepts,
                   std::vector<double> feature_means);

  const GridSpec& grid() const noexcept override { return grid_; }
  std::span<const std::string> feature_names() const noexcept override { return features_; }
  int history() const noexcept override { return history_; }

  double score(std::size_t cell, std::span<const double> features,
               std::span<const double> lags) const override;
  std::span<const double> baseline_features(std::size_t cell) const override;
  std::vector<double> attribute_cell(std::size_t cell, std::span<const double> features,
                                     std::span<const double> lags) const override;

  std::size_t input_width() const noexcept { return features_.size() + static_cast<std::size_t>(history_); }
  std::span<const double> weights(std::size_t cell) const;
  double intercept(std::size_t cell) const { return intercepts_.at(cell); }

 private:
  GridSpec grid_;
  std::vector<std::string> features_;
  int history_;
  std::vector<double> weights_;        // cells x input_width
  std::vector<double> intercepts_;     // cells
  std::vector<double> feature_means_;  // cells x features
};

/// Fits one ridge model per cell on (features at t, counts t-T+1..t) -> count
/// at t+1.  Requires more than T + K timestamps.  A cell whose target is
/// identically zero gets zero weights and intercept.
FittedForecaster fit(const SpatioTemporalTensor& tensor, const ForecastConfig& cfg);

/// Dispatches on cfg.kind; Plugin delegates to cfg.plugin.
std::unique_ptr<Forecaster> fit_model(const SpatioTemporalTensor& tensor, const ForecastConfig& cfg);

struct Prediction {
  std::vector<YearMonth> months;             // K target months
  std::vector<std::vector<double>> counts;   // [k][cell], clamped at 0
};

/// Recursive K-step rollout from the last T timestamps of `history`.  Feature
/// channels beyond the first step are held at their last observed values.
Prediction predict(const Forecaster& model, const SpatioTemporalTensor& history, int horizon);

/// Root-mean-square one-step error over target indices [begin, end) and the
/// same for a predictor that always answers the training mean of each cell.
struct BacktestScore {
  double model_rmse = 0.0;
  double mean_rmse = 0.0;
  std::size_t samples = 0;
};
BacktestScore backtest(const Forecaster& model, const SpatioTemporalTensor& tensor,
                       std::size_t target_begin, std::size_t target_end);

/// Maximum number of players shapley_exact will enumerate.
inline constexpr std::size_t kMaxShapleyPlayers = 20;

/// Exact Shapley values of f at x relative to `baseline`: absent players take
/// their baseline value.  Enumerates all 2^n coalitions.
std::vector<double> shapley_exact(const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> x, std::span<const double> baseline);

/// Feature attributions for every in-sample one-step prediction.  Index t
/// refers to target month timestamps()[t].
class AttributionFrame {
 public:
  AttributionFrame(GridSpec grid, std::vector<std::string> features, std::vector<YearMonth> months);

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const std::string> features() const noexcept { return features_; }
  std::span<const YearMonth> timestamps() const noexcept { return months_; }
  std::size_t time_count() const noexcept { return months_.size(); }
  std::size_t cell_count() const noexcept { return grid_.cell_count(); }

  double phi(std::size_t t, std::size_t f, std::size_t cell) const { return phi_[(t * features_.size() + f) * cell_count() + cell]; }
  double& phi(std::size_t t, std::size_t f, std::size_t cell) { return phi_[(t * features_.size() + f) * cell_count() + cell]; }
  double predicted(std::size_t t, std::size_t cell) const { return predicted_[t * cell_count() + cell]; }
  double& predicted(std::size_t t, std::size_t cell) { return predicted_[t * cell_count() + cell]; }
  double baseline(std::size_t t, std::size_t cell) const { return baseline_[t * cell_count() + cell]; }
  double& baseline(std::size_t t, std::size_t cell) { return baseline_[t * cell_count() + cell]; }

  /// City-wide sums for the supply/demand series.
  double city_phi(std::size_t t, std::size_t f) const;
  double city_predicted(std::size_t t) const;
  double city_baseline(std::size_t t) const;

  /// Sum over features of |phi| for one cell (sector-chart size).
  double abs_phi_sum(std::size_t t, std::size_t cell) const;

 private:
  GridSpec grid_;
  std::vector<std::string> features_;
  std::vector<YearMonth> months_;
  std::vector<double> phi_;
  std::vector<double> predicted_;
  std::vector<double> baseline_;
};

/// Attributes every one-step prediction whose target month lies in the
/// tensor.  Predictions are the unclamped model score; the baseline holds the
/// features at their training means and the lags at their observed values.
AttributionFrame attribute(const Forecaster& model, const SpatioTemporalTensor& tensor);

/// {timestamps, features, per_t: [{month, predicted, actual, baseline,
/// phi_by_feature}], per_cell?: {...}}.  `actuals` supplies the observed
/// counts; per-cell blocks are included when `include_cells` is set.
Json attribution_to_json(const AttributionFrame& frame, const SpatioTemporalTensor& actuals,
                         bool include_cells);

}  // namespace stationplan
