// Copyright 2026 The fmlp-rul Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Sensor preprocessing: operating-condition removal by per-sensor MLP
// regression, min-max scaling, and sliding-window instance generation with
// piece-wise RUL labels.
//
// Pipeline order is fixed: remove_condition_effect -> apply_minmax ->
// slide_windows / last_window. Min-max statistics are computed over full
// training trajectories, not over windows.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "fmlp/data_ingest.hpp"
#include "fmlp/errors.hpp"
#include "fmlp/numerics.hpp"

namespace fmlp::preprocess {

using data::EngineTrajectory;
using data::kNumSensors;
using data::kNumSettings;
using data::SensorStage;

inline constexpr double kConstantSensorTolerance = 1e-9;
inline constexpr double kDefaultRulCap = 130.0;

struct ConditionConfig {
  int hidden_width = 8;
  int epochs = 500;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;

  friend bool operator==(const ConditionConfig&, const ConditionConfig&) = default;
};

/// settings -> hidden logistic layer -> linear output, on min-max scaled
/// settings and a standardized target.
struct SensorRegressor {
  std::vector<double> hidden_weights;  // hidden_width x kNumSettings, row-major
  std::vector<double> hidden_bias;
  std::vector<double> output_weights;
  double output_bias = 0.0;
  double target_mean = 0.0;
  double target_scale = 1.0;

  double predict(const std::array<double, kNumSettings>& scaled_settings) const {
    const std::size_t h = hidden_bias.size();
    double out = output_bias;
    for (std::size_t j = 0; j < h; ++j) {
      double u = hidden_bias[j];
      for (std::size_t k = 0; k < kNumSettings; ++k) {
        u += hidden_weights[j * kNumSettings + k] * scaled_settings[k];
      }
      out += output_weights[j] * numerics::logistic(u);
    }
    return target_mean + target_scale * out;
  }

  friend bool operator==(const SensorRegressor&, const SensorRegressor&) = default;
};

/// Maps operating settings to the would-be value of each of the 21 sensors.
struct ConditionModel {
  ConditionConfig config;
  std::array<double, kNumSettings> settings_min{};
  std::array<double, kNumSettings> settings_max{};
  std::vector<SensorRegressor> regressors;  // one per sensor column

  std::array<double, kNumSettings> scale_settings(const data::SettingsRow& s) const {
    std::array<double, kNumSettings> out{};
    for (std::size_t k = 0; k < kNumSettings; ++k) {
      const double range = settings_max[k] - settings_min[k];
      out[k] = range > kConstantSensorTolerance ? (s[k] - settings_min[k]) / range : 0.0;
    }
    return out;
  }

  double predict(std::size_t sensor, const data::SettingsRow& settings) const {
    return regressors.at(sensor).predict(scale_settings(settings));
  }

  friend bool operator==(const ConditionModel&, const ConditionModel&) = default;
};

namespace detail {

// Full-batch training of one regressor with Adam steps. Plain gradient steps
// at this learning rate leave multi-regime targets essentially unfitted
// within the epoch budget.
inline SensorRegressor fit_sensor_regressor(const std::vector<std::array<double, kNumSettings>>& x,
                                            const std::vector<double>& y,
                                            const ConditionConfig& cfg,
                                            numerics::SeededRng& rng) {
  const std::size_t n = x.size();
  const auto h = static_cast<std::size_t>(cfg.hidden_width);

  SensorRegressor reg;
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  reg.target_mean = mean;
  reg.target_scale = std::sqrt(var) > kConstantSensorTolerance ? std::sqrt(var) : 1.0;

  reg.hidden_weights.resize(h * kNumSettings);
  reg.hidden_bias.assign(h, 0.0);
  reg.output_weights.resize(h);
  for (double& w : reg.hidden_weights) w = rng.uniform(-0.5, 0.5);
  for (double& w : reg.output_weights) w = rng.uniform(-0.5, 0.5);
  reg.output_bias = 0.0;

  if (std::sqrt(var) <= kConstantSensorTolerance) {
    // Constant target: the mean is the exact fit.
    std::fill(reg.output_weights.begin(), reg.output_weights.end(), 0.0);
    return reg;
  }

  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = (y[i] - mean) / reg.target_scale;

  const std::size_t num_params = h * kNumSettings + h + h + 1;
  std::vector<double> grad(num_params), m(num_params, 0.0), v(num_params, 0.0);
  std::vector<double> hidden(h);
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  double beta1_t = 1.0, beta2_t = 1.0;
  const double inv_n = 1.0 / static_cast<double>(n);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double* g_hw = grad.data();
    double* g_hb = g_hw + h * kNumSettings;
    double* g_ow = g_hb + h;
    double* g_ob = g_ow + h;
    for (std::size_t i = 0; i < n; ++i) {
      double out = reg.output_bias;
      for (std::size_t j = 0; j < h; ++j) {
        double u = reg.hidden_bias[j];
        for (std::size_t k = 0; k < kNumSettings; ++k) {
          u += reg.hidden_weights[j * kNumSettings + k] * x[i][k];
        }
        hidden[j] = numerics::logistic(u);
        out += reg.output_weights[j] * hidden[j];
      }
      const double d = 2.0 * (out - target[i]) * inv_n;
      *g_ob += d;
      for (std::size_t j = 0; j < h; ++j) {
        g_ow[j] += d * hidden[j];
        const double dh = d * reg.output_weights[j] * hidden[j] * (1.0 - hidden[j]);
        g_hb[j] += dh;
        for (std::size_t k = 0; k < kNumSettings; ++k) g_hw[j * kNumSettings + k] += dh * x[i][k];
      }
    }

    beta1_t *= beta1;
    beta2_t *= beta2;
    std::size_t p = 0;
    const auto step = [&](double& param) {
      m[p] = beta1 * m[p] + (1.0 - beta1) * grad[p];
      v[p] = beta2 * v[p] + (1.0 - beta2) * grad[p] * grad[p];
      const double m_hat = m[p] / (1.0 - beta1_t);
      const double v_hat = v[p] / (1.0 - beta2_t);
      param -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + eps);
      ++p;
    };
    for (double& w : reg.hidden_weights) step(w);
    for (double& w : reg.hidden_bias) step(w);
    for (double& w : reg.output_weights) step(w);
    step(reg.output_bias);
  }
  return reg;
}

}  // namespace detail

/// Fits one settings -> sensor regressor per sensor column over every cycle
/// of every training engine.
inline ConditionModel fit_condition_regressors(std::span<const EngineTrajectory> train,
                                               const ConditionConfig& cfg) {
  if (train.empty()) throw ArgumentError("fit_condition_regressors: no training trajectories");
  if (cfg.hidden_width <= 0 || cfg.epochs < 0 || !(cfg.learning_rate > 0.0)) {
    throw ArgumentError("fit_condition_regressors: invalid configuration");
  }

  ConditionModel model;
  model.config = cfg;
  model.settings_min.fill(std::numeric_limits<double>::infinity());
  model.settings_max.fill(-std::numeric_limits<double>::infinity());
  std::size_t rows = 0;
  for (const auto& t : train) {
    if (t.stage != SensorStage::kRaw) {
      throw ArgumentError("fit_condition_regressors: trajectories must be raw");
    }
    for (const auto& s : t.op_settings) {
      for (std::size_t k = 0; k < kNumSettings; ++k) {
        model.settings_min[k] = std::min(model.settings_min[k], s[k]);
        model.settings_max[k] = std::max(model.settings_max[k], s[k]);
      }
    }
    rows += t.length();
  }
  if (rows == 0) throw ArgumentError("fit_condition_regressors: trajectories have no cycles");

  std::vector<std::array<double, kNumSettings>> x;
  x.reserve(rows);
  for (const auto& t : train) {
    for (const auto& s : t.op_settings) x.push_back(model.scale_settings(s));
  }

  numerics::SeededRng rng(cfg.seed);
  std::vector<double> y(rows);
  model.regressors.reserve(kNumSensors);
  for (std::size_t sensor = 0; sensor < kNumSensors; ++sensor) {
    std::size_t i = 0;
    for (const auto& t : train) {
      for (const auto& row : t.sensors) y[i++] = row[sensor];
    }
    model.regressors.push_back(detail::fit_sensor_regressor(x, y, cfg, rng));
  }
  return model;
}

/// Replaces every sensor reading by raw minus the regressor's would-be value.
inline EngineTrajectory remove_condition_effect(EngineTrajectory traj, const ConditionModel& model) {
  if (model.regressors.size() != kNumSensors) {
    throw ArgumentError("remove_condition_effect: model must hold one regressor per sensor");
  }
  if (traj.stage != SensorStage::kRaw) {
    throw ArgumentError("remove_condition_effect: trajectory already processed");
  }
  for (std::size_t i = 0; i < traj.length(); ++i) {
    const auto scaled = model.scale_settings(traj.op_settings[i]);
    for (std::size_t s = 0; s < kNumSensors; ++s) {
      traj.sensors[i][s] -= model.regressors[s].predict(scaled);
    }
  }
  traj.stage = SensorStage::kConditionRemoved;
  return traj;
}

struct MinMaxScaler {
  std::array<double, kNumSensors> min{};
  std::array<double, kNumSensors> max{};
  std::array<bool, kNumSensors> constant{};

  /// Sensor column indices (0-based) that survive the constant-sensor rule.
  std::vector<std::size_t> retained() const {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < kNumSensors; ++s) {
      if (!constant[s]) out.push_back(s);
    }
    return out;
  }

  double scale(std::size_t sensor, double x) const {
    return (x - min[sensor]) / (max[sensor] - min[sensor]);
  }

  friend bool operator==(const MinMaxScaler&, const MinMaxScaler&) = default;
};

inline MinMaxScaler fit_minmax(std::span<const EngineTrajectory> train) {
  MinMaxScaler scaler;
  scaler.min.fill(std::numeric_limits<double>::infinity());
  scaler.max.fill(-std::numeric_limits<double>::infinity());
  bool any = false;
  for (const auto& t : train) {
    if (t.stage == SensorStage::kScaled) {
      throw ArgumentError("fit_minmax: trajectory already scaled");
    }
    for (const auto& row : t.sensors) {
      any = true;
      for (std::size_t s = 0; s < kNumSensors; ++s) {
        scaler.min[s] = std::min(scaler.min[s], row[s]);
        scaler.max[s] = std::max(scaler.max[s], row[s]);
      }
    }
  }
  if (!any) throw ArgumentError("fit_minmax: no observations");
  for (std::size_t s = 0; s < kNumSensors; ++s) {
    scaler.constant[s] = (scaler.max[s] - scaler.min[s]) < kConstantSensorTolerance;
  }
  return scaler;
}

/// Scales retained sensors to the training range. Values outside the
/// training range map outside [0, 1]; nothing is clamped. Constant sensors
/// are left untouched and never read downstream.
inline EngineTrajectory apply_minmax(EngineTrajectory traj, const MinMaxScaler& scaler) {
  if (traj.stage == SensorStage::kScaled) {
    throw ArgumentError("apply_minmax: trajectory already scaled");
  }
  for (auto& row : traj.sensors) {
    for (std::size_t s = 0; s < kNumSensors; ++s) {
      if (!scaler.constant[s]) row[s] = scaler.scale(s, row[s]);
    }
  }
  traj.stage = SensorStage::kScaled;
  return traj;
}

/// Window of M sensor curves on a shared grid.
struct FunctionalInstance {
  std::vector<double> grid;    // M time indices, 1..M within the window
  numerics::Matrix curves;     // R_kept x M
  std::optional<double> label;
  std::int64_t unit_id = 0;
  std::int64_t start_cycle = 0;

  std::size_t num_sensors() const noexcept { return curves.rows(); }
  std::size_t grid_size() const noexcept { return curves.cols(); }
};

/// RUL of the c-th (1-based) of n windows under the linear labeling rule.
inline double linear_rul(std::int64_t c, std::int64_t n_instances) {
  if (c < 1 || c > n_instances) throw ArgumentError("linear_rul: window index out of range");
  return static_cast<double>(n_instances - c);
}

inline double piecewise_rul(std::int64_t c, std::int64_t n_instances, double cap = kDefaultRulCap) {
  return std::min(cap, linear_rul(c, n_instances));
}

namespace detail {

inline FunctionalInstance make_instance(const EngineTrajectory& traj,
                                        std::span<const std::size_t> retained,
                                        std::span<const std::size_t> rows) {
  const std::size_t m = rows.size();
  FunctionalInstance inst;
  inst.grid.resize(m);
  for (std::size_t j = 0; j < m; ++j) inst.grid[j] = static_cast<double>(j + 1);
  inst.curves = numerics::Matrix(retained.size(), m);
  for (std::size_t r = 0; r < retained.size(); ++r) {
    if (retained[r] >= kNumSensors) throw ArgumentError("retained sensor index out of range");
    for (std::size_t j = 0; j < m; ++j) inst.curves(r, j) = traj.sensors[rows[j]][retained[r]];
  }
  inst.unit_id = traj.unit_id;
  inst.start_cycle = traj.cycles[rows.front()];
  return inst;
}

}  // namespace detail

/// Cuts a run-to-failure trajectory into every window of length M, the c-th
/// covering cycles c .. c+M-1, labeled piece-wise. Too-short engines give none.
inline std::vector<FunctionalInstance> slide_windows(const EngineTrajectory& traj,
                                                     std::span<const std::size_t> retained,
                                                     int window, double cap = kDefaultRulCap) {
  if (window <= 0) throw ArgumentError("slide_windows: window length must be positive");
  const auto m = static_cast<std::size_t>(window);
  std::vector<FunctionalInstance> out;
  if (traj.length() < m) return out;
  const std::size_t n = traj.length() - m + 1;
  out.reserve(n);
  std::vector<std::size_t> rows(m);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t j = 0; j < m; ++j) rows[j] = c + j;
    auto inst = detail::make_instance(traj, retained, rows);
    inst.label = piecewise_rul(static_cast<std::int64_t>(c + 1), static_cast<std::int64_t>(n), cap);
    out.push_back(std::move(inst));
  }
  return out;
}

/// The final M cycles as one unlabeled instance. Engines shorter than M are
/// left-padded by repeating their first observation.
inline FunctionalInstance last_window(const EngineTrajectory& traj,
                                      std::span<const std::size_t> retained, int window) {
  if (traj.length() == 0) throw ArgumentError("last_window: empty trajectory");
  if (window <= 0) throw ArgumentError("last_window: window length must be positive");
  const auto m = static_cast<std::size_t>(window);
  std::vector<std::size_t> rows(m);
  const std::size_t len = traj.length();
  for (std::size_t j = 0; j < m; ++j) {
    // Position j of the window maps to trajectory row len - m + j, or row 0
    // while that index is still negative.
    rows[j] = (len >= m - j) ? len - m + j : 0;
  }
  return detail::make_instance(traj, retained, rows);
}

/// Fitted preprocessing state applied identically to train and test data.
struct Preprocessor {
  ConditionModel condition;
  MinMaxScaler scaler;

  EngineTrajectory transform(EngineTrajectory traj) const {
    return apply_minmax(remove_condition_effect(std::move(traj), condition), scaler);
  }

  friend bool operator==(const Preprocessor&, const Preprocessor&) = default;
};

/// Fits condition removal on raw training data, then min-max on the residuals.
inline Preprocessor fit_preprocessor(std::span<const EngineTrajectory> train,
                                     const ConditionConfig& cfg) {
  Preprocessor pre;
  pre.condition = fit_condition_regressors(train, cfg);
  std::vector<EngineTrajectory> removed;
  removed.reserve(train.size());
  for (const auto& t : train) removed.push_back(remove_condition_effect(t, pre.condition));
  pre.scaler = fit_minmax(removed);
  return pre;
}

}  // namespace fmlp::preprocess
