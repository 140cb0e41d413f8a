#include "stationplan/forecast.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>

#include "stationplan/error.hpp"

namespace stationplan {

void validate(const ForecastConfig& cfg) {
  if (cfg.history < 1) throw Error(errc::kInvalidArgument, "forecast history must be >= 1");
  if (cfg.horizon < 1) throw Error(errc::kInvalidArgument, "forecast horizon must be >= 1");
  if (!(cfg.ridge >= 0.0) || !std::isfinite(cfg.ridge)) {
    throw Error(errc::kInvalidArgument, "ridge strength must be finite and >= 0");
  }
  if (cfg.kind == ModelKind::Plugin && !cfg.plugin) {
    throw Error(errc::kInvalidArgument, "plugin forecaster requested without a factory");
  }
}

std::vector<double> Forecaster::attribute_cell(std::size_t cell, std::span<const double> features,
                                               std::span<const double> lags) const {
  const auto f = [&](std::span<const double> z) { return score(cell, z, lags); };
  return shapley_exact(f, features, baseline_features(cell));
}

FittedForecaster::FittedForecaster(GridSpec grid, std::vector<std::string> features, int history,
                                   std::vector<double> weights, std::vector<double> intercepts,
                                   std::vector<double> feature_means)
    : grid_(grid),
      features_(std::move(features)),
      history_(history),
      weights_(std::move(weights)),
      intercepts_(std::move(intercepts)),
      feature_means_(std::move(feature_means)) {
  const std::size_t cells = grid_.cell_count();
  if (weights_.size() != cells * input_width() || intercepts_.size() != cells ||
      feature_means_.size() != cells * features_.size()) {
    throw Error(errc::kShapeMismatch, "forecaster parameter arrays do not match the grid");
  }
}

std::span<const double> FittedForecaster::weights(std::size_t cell) const {
  return std::span<const double>(weights_).subspan(cell * input_width(), input_width());
}

std::span<const double> FittedForecaster::baseline_features(std::size_t cell) const {
  return std::span<const double>(feature_means_).subspan(cell * features_.size(), features_.size());
}

double FittedForecaster::score(std::size_t cell, std::span<const double> features,
                               std::span<const double> lags) const {
  const auto w = weights(cell);
  double y = intercepts_[cell];
  for (std::size_t f = 0; f < features_.size(); ++f) y += w[f] * features[f];
  for (std::size_t l = 0; l < static_cast<std::size_t>(history_); ++l) y += w[features_.size() + l] * lags[l];
  return y;
}

std::vector<double> FittedForecaster::attribute_cell(std::size_t cell, std::span<const double> features,
                                                     std::span<const double> /*lags*/) const {
  const auto w = weights(cell);
  const auto mu = baseline_features(cell);
  std::vector<double> phi(features_.size());
  for (std::size_t f = 0; f < phi.size(); ++f) phi[f] = w[f] * (features[f] - mu[f]);
  return phi;
}

namespace {

std::vector<std::string> feature_channels(const SpatioTemporalTensor& tensor) {
  return {tensor.channels().begin() + 1, tensor.channels().end()};
}

// Gathers model inputs for input timestamp t: features at t, then counts
// t-T+1..t.
void gather(const SpatioTemporalTensor& tensor, std::size_t t, std::size_t cell, int history,
            std::vector<double>& features, std::vector<double>& lags) {
  const std::size_t nf = tensor.channel_count() - 1;
  features.resize(nf);
  lags.resize(static_cast<std::size_t>(history));
  for (std::size_t f = 0; f < nf; ++f) features[f] = tensor.at(t, f + 1, cell);
  for (int l = 0; l < history; ++l) {
    lags[static_cast<std::size_t>(l)] = tensor.at(t + 1 + static_cast<std::size_t>(l) - static_cast<std::size_t>(history), 0, cell);
  }
}

void check_compatible(const Forecaster& model, const SpatioTemporalTensor& tensor) {
  if (!(tensor.grid() == model.grid())) {
    throw Error(errc::kShapeMismatch, "tensor grid differs from the model grid");
  }
  const auto names = model.feature_names();
  if (tensor.channel_count() != names.size() + 1 ||
      !std::equal(names.begin(), names.end(), tensor.channels().begin() + 1)) {
    throw Error(errc::kShapeMismatch, "tensor feature channels differ from the model's");
  }
}

}  // namespace

FittedForecaster fit(const SpatioTemporalTensor& tensor, const ForecastConfig& cfg) {
  validate(cfg);
  const std::size_t L = tensor.time_count();
  const auto T = static_cast<std::size_t>(cfg.history);
  if (L <= T + static_cast<std::size_t>(cfg.horizon)) {
    throw Error(errc::kInsufficientHistory,
                "need more than history + horizon = " + std::to_string(T + cfg.horizon) +
                    " timestamps, tensor has " + std::to_string(L));
  }
  const std::size_t nf = tensor.channel_count() - 1;
  const std::size_t p = nf + T;
  const std::size_t n = L - T;  // samples: input t in [T-1, L-2]
  const std::size_t cells = tensor.cell_count();

  std::vector<double> weights(cells * p, 0.0);
  std::vector<double> intercepts(cells, 0.0);
  std::vector<double> means(cells * nf, 0.0);

  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  std::vector<double> feats, lags;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t t = T - 1 + s;
      gather(tensor, t, cell, cfg.history, feats, lags);
      for (std::size_t j = 0; j < nf; ++j) X(s, j) = feats[j];
      for (std::size_t j = 0; j < T; ++j) X(s, nf + j) = lags[j];
      y(s) = tensor.at(t + 1, 0, cell);
    }
    const Eigen::VectorXd mean_x = X.colwise().mean();
    for (std::size_t j = 0; j < nf; ++j) means[cell * nf + j] = mean_x(j);
    if ((y.array() == 0.0).all()) continue;

    const double mean_y = y.mean();
    Eigen::VectorXd scale(p);
    Eigen::MatrixXd A(n + p, p);
    A.setZero();
    for (std::size_t j = 0; j < p; ++j) {
      const Eigen::VectorXd centered = X.col(j).array() - mean_x(j);
      const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(n));
      scale(j) = sd;
      if (sd > 0.0) A.col(j).head(n) = centered / sd;
      A(n + j, j) = std::sqrt(cfg.ridge);
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + p);
    rhs.head(n) = y.array() - mean_y;
    const Eigen::VectorXd beta = A.completeOrthogonalDecomposition().solve(rhs);

    double b = mean_y;
    for (std::size_t j = 0; j < p; ++j) {
      const double w = scale(j) > 0.0 ? beta(j) / scale(j) : 0.0;
      weights[cell * p + j] = w;
      b -= w * mean_x(j);
    }
    intercepts[cell] = b;
  }
  return FittedForecaster(tensor.grid(), feature_channels(tensor), cfg.history, std::move(weights),
                          std::move(intercepts), std::move(means));
}

std::unique_ptr<Forecaster> fit_model(const SpatioTemporalTensor& tensor, const ForecastConfig& cfg) {
  validate(cfg);
  if (cfg.kind == ModelKind::Plugin) {
    auto model = cfg.plugin(tensor, cfg);
    if (!model) throw Error(errc::kInvalidArgument, "plugin factory returned no model");
    check_compatible(*model, tensor);
    return model;
  }
  return std::make_unique<FittedForecaster>(fit(tensor, cfg));
}

Prediction predict(const Forecaster& model, const SpatioTemporalTensor& history, int horizon) {
  check_compatible(model, history);
  if (horizon < 1) throw Error(errc::kInvalidArgument, "horizon must be >= 1");
  const auto T = static_cast<std::size_t>(model.history());
  if (history.time_count() < T) {
    throw Error(errc::kShapeMismatch, "history holds " + std::to_string(history.time_count()) +
                                          " timestamps, model needs " + std::to_string(T));
  }
  const std::size_t last = history.time_count() - 1;
  const std::size_t cells = history.cell_count();
  Prediction out;
  out.counts.assign(static_cast<std::size_t>(horizon), std::vector<double>(cells, 0.0));
  for (int k = 0; k < horizon; ++k) {
    out.months.push_back(history.timestamps()[last] + history.interval_months() * (k + 1));
  }
  std::vector<double> feats, lags;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    gather(history, last, cell, model.history(), feats, lags);
    for (int k = 0; k < horizon; ++k) {
      const double y = std::max(0.0, model.score(cell, feats, lags));
      out.counts[static_cast<std::size_t>(k)][cell] = y;
      std::rotate(lags.begin(), lags.begin() + 1, lags.end());
      lags.back() = y;
    }
  }
  return out;
}

BacktestScore backtest(const Forecaster& model, const SpatioTemporalTensor& tensor,
                       std::size_t target_begin, std::size_t target_end) {
  check_compatible(model, tensor);
  const auto T = static_cast<std::size_t>(model.history());
  if (target_begin < T || target_end > tensor.time_count() || target_begin >= target_end) {
    throw Error(errc::kOutOfBounds, "backtest range must lie within [history, time_count)");
  }
  const std::size_t cells = tensor.cell_count();
  std::vector<double> cell_mean(cells, 0.0);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    for (std::size_t t = 0; t < target_begin; ++t) cell_mean[cell] += tensor.at(t, 0, cell);
    cell_mean[cell] /= static_cast<double>(target_begin);
  }
  BacktestScore s;
  std::vector<double> feats, lags;
  for (std::size_t tau = target_begin; tau < target_end; ++tau) {
    for (std::size_t cell = 0; cell < cells; ++cell) {
      gather(tensor, tau - 1, cell, model.history(), feats, lags);
      const double actual = tensor.at(tau, 0, cell);
      const double y = std::max(0.0, model.score(cell, feats, lags));
      s.model_rmse += (y - actual) * (y - actual);
      s.mean_rmse += (cell_mean[cell] - actual) * (cell_mean[cell] - actual);
      ++s.samples;
    }
  }
  s.model_rmse = std::sqrt(s.model_rmse / static_cast<double>(s.samples));
  s.mean_rmse = std::sqrt(s.mean_rmse / static_cast<double>(s.samples));
  return s;
}

std::vector<double> shapley_exact(const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> x, std::span<const double> baseline) {
  const std::size_t n = x.size();
  if (baseline.size() != n) throw Error(errc::kShapeMismatch, "x and baseline lengths differ");
  if (n > kMaxShapleyPlayers) {
    throw Error(errc::kInvalidArgument, "shapley_exact enumerates at most " +
                                            std::to_string(kMaxShapleyPlayers) + " features, got " +
                                            std::to_string(n));
  }
  if (n == 0) return {};

  const std::size_t coalitions = std::size_t{1} << n;
  std::vector<double> value(coalitions);
  std::vector<double> z(baseline.begin(), baseline.end());
  for (std::size_t mask = 0; mask < coalitions; ++mask) {
    for (std::size_t i = 0; i < n; ++i) z[i] = (mask >> i) & 1u ? x[i] : baseline[i];
    value[mask] = f(z);
  }

  // weight[s] = s! (n - s - 1)! / n! = 1 / (n * C(n-1, s))
  std::vector<double> weight(n);
  double binom = 1.0;
  for (std::size_t s = 0; s < n; ++s) {
    weight[s] = 1.0 / (static_cast<double>(n) * binom);
    binom = binom * static_cast<double>(n - 1 - s) / static_cast<double>(s + 1);
  }

  std::vector<double> phi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    double acc = 0.0;
    for (std::size_t mask = 0; mask < coalitions; ++mask) {
      if (mask & bit) continue;
      const auto size = static_cast<std::size_t>(std::popcount(mask));
      acc += weight[size] * (value[mask | bit] - value[mask]);
    }
    phi[i] = acc;
  }
  return phi;
}

AttributionFrame::AttributionFrame(GridSpec grid, std::vector<std::string> features,
                                   std::vector<YearMonth> months)
    : grid_(grid), features_(std::move(features)), months_(std::move(months)) {
  const std::size_t cells = grid_.cell_count();
  phi_.assign(months_.size() * features_.size() * cells, 0.0);
  predicted_.assign(months_.size() * cells, 0.0);
  baseline_.assign(months_.size() * cells, 0.0);
}

double AttributionFrame::city_phi(std::size_t t, std::size_t f) const {
  double s = 0.0;
  for (std::size_t cell = 0; cell < cell_count(); ++cell) s += phi(t, f, cell);
  return s;
}

double AttributionFrame::city_predicted(std::size_t t) const {
  double s = 0.0;
  for (std::size_t cell = 0; cell < cell_count(); ++cell) s += predicted(t, cell);
  return s;
}

double AttributionFrame::city_baseline(std::size_t t) const {
  double s = 0.0;
  for (std::size_t cell = 0; cell < cell_count(); ++cell) s += baseline(t, cell);
  return s;
}

double AttributionFrame::abs_phi_sum(std::size_t t, std::size_t cell) const {
  double s = 0.0;
  for (std::size_t f = 0; f < features_.size(); ++f) s += std::abs(phi(t, f, cell));
  return s;
}

AttributionFrame attribute(const Forecaster& model, const SpatioTemporalTensor& tensor) {
  check_compatible(model, tensor);
  const auto T = static_cast<std::size_t>(model.history());
  const std::size_t L = tensor.time_count();
  std::vector<YearMonth> months;
  if (L > T) months.assign(tensor.timestamps().begin() + static_cast<std::ptrdiff_t>(T), tensor.timestamps().end());
  const auto names = model.feature_names();
  AttributionFrame frame(tensor.grid(), {names.begin(), names.end()}, months);

  std::vector<double> feats, lags;
  for (std::size_t t = 0; t < months.size(); ++t) {
    const std::size_t input = T - 1 + t;
    for (std::size_t cell = 0; cell < tensor.cell_count(); ++cell) {
      gather(tensor, input, cell, model.history(), feats, lags);
      frame.predicted(t, cell) = model.score(cell, feats, lags);
      frame.baseline(t, cell) = model.score(cell, model.baseline_features(cell), lags);
      const auto phi = model.attribute_cell(cell, feats, lags);
      for (std::size_t f = 0; f < phi.size(); ++f) frame.phi(t, f, cell) = phi[f];
    }
  }
  return frame;
}

Json attribution_to_json(const AttributionFrame& frame, const SpatioTemporalTensor& actuals,
                         bool include_cells) {
  if (!(actuals.grid() == frame.grid())) {
    throw Error(errc::kShapeMismatch, "actuals grid differs from the attribution grid");
  }
  Json out;
  out["timestamps"] = frame.timestamps();
  out["features"] = frame.features();
  Json per_t = Json::array();
  for (std::size_t t = 0; t < frame.time_count(); ++t) {
    const auto ti = actuals.time_index(frame.timestamps()[t]);
    if (!ti) throw Error(errc::kShapeMismatch, "actuals lack month " + frame.timestamps()[t].to_string());
    double actual = 0.0;
    for (double v : actuals.plane(*ti, 0)) actual += v;
    Json phi = Json::object();
    for (std::size_t f = 0; f < frame.features().size(); ++f) phi[frame.features()[f]] = frame.city_phi(t, f);
    per_t.push_back({{"month", frame.timestamps()[t]},
                     {"predicted", frame.city_predicted(t)},
                     {"actual", actual},
                     {"baseline", frame.city_baseline(t)},
                     {"phi_by_feature", std::move(phi)}});
  }
  out["per_t"] = std::move(per_t);
  if (include_cells) {
    Json cells = Json::array();
    for (std::size_t t = 0; t < frame.time_count(); ++t) {
      Json month{{"month", frame.timestamps()[t]}};
      std::vector<double> predicted(frame.cell_count()), abs_sum(frame.cell_count());
      Json phi = Json::object();
      for (std::size_t cell = 0; cell < frame.cell_count(); ++cell) {
        predicted[cell] = frame.predicted(t, cell);
        abs_sum[cell] = frame.abs_phi_sum(t, cell);
      }
      for (std::size_t f = 0; f < frame.features().size(); ++f) {
        std::vector<double> row(frame.cell_count());
        for (std::size_t cell = 0; cell < frame.cell_count(); ++cell) row[cell] = frame.phi(t, f, cell);
        phi[frame.features()[f]] = std::move(row);
      }
      month["predicted"] = std::move(predicted);
      month["abs_phi_sum"] = std::move(abs_sum);
      month["phi"] = std::move(phi);
      cells.push_back(std::move(month));
    }
    out["per_cell"] = {{"grid", frame.grid()}, {"layout", "row-major, row 0 = south"}, {"months", std::move(cells)}};
  }
  return out;
}

}  // namespace stationplan
