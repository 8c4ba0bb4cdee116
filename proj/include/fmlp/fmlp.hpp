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

// Functional multilayer perceptron.
//
// Functional neuron k sees every retained sensor curve X_r through a weight
// curve V_{k,r} = sum_p beta_{k,r,p} phi_{r,p} built on the FPCA eigenbasis:
//
//   z_k = logistic(b_k + sum_r (1/M) sum_j V_{k,r}(T_j) X_r(T_j))
//
// The vector (a_k z_k) feeds a stack of dense numerical layers whose last
// layer is linear with width one. The network predicts RUL / label_scale.
//
// Because V is linear in beta, the inner integral equals
// sum_p beta_{k,r,p} <phi_{r,p}, X_r>, so training precomputes the
// projection scores once per instance and works on those.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "fmlp/errors.hpp"
#include "fmlp/fpca.hpp"
#include "fmlp/numerics.hpp"
#include "fmlp/preprocess.hpp"

namespace fmlp::model {

using preprocess::FunctionalInstance;

enum class Activation { kLogistic, kLinear };

inline const char* to_string(Activation a) {
  return a == Activation::kLogistic ? "logistic" : "linear";
}

struct LayerShape {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  Activation activation = Activation::kLinear;

  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

struct LayerParams {
  std::vector<double> weights;  // outputs x inputs, row-major
  std::vector<double> bias;

  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

/// Every trainable value of the network. Gradients use the same layout.
struct Parameters {
  std::vector<double> a;                              // K
  std::vector<double> b;                              // K
  std::vector<std::vector<std::vector<double>>> beta;  // [k][r][p], p < P_r
  std::vector<LayerParams> layers;

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

/// Calls f(block_name, value&) for every parameter in a fixed order.
template <typename P, typename F>
void for_each_parameter(P& params, F&& f) {
  for (auto& v : params.a) f("a", v);
  for (auto& v : params.b) f("b", v);
  for (auto& per_k : params.beta) {
    for (auto& per_r : per_k) {
      for (auto& v : per_r) f("beta", v);
    }
  }
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const std::string w_name = "layer" + std::to_string(l + 1) + ".weights";
    const std::string b_name = "layer" + std::to_string(l + 1) + ".bias";
    for (auto& v : params.layers[l].weights) f(w_name, v);
    for (auto& v : params.layers[l].bias) f(b_name, v);
  }
}

/// Same layout as `like`, all zeros.
inline Parameters zeros_like(const Parameters& like) {
  Parameters out = like;
  for_each_parameter(out, [](const std::string&, double& v) { v = 0.0; });
  return out;
}

struct Architecture {
  std::size_t functional_neurons = 4;
  /// Widths of the logistic numerical layers; a width-1 linear output layer
  /// is always appended.
  std::vector<std::size_t> hidden_widths = {2};

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct FmlpModel {
  std::size_t num_neurons = 0;
  std::vector<LayerShape> layers;
  Parameters params;
  fpca::EigenBasis basis;
  double label_scale = preprocess::kDefaultRulCap;

  friend bool operator==(const FmlpModel&, const FmlpModel&) = default;
};

/// Checks the structural invariants; throws ArgumentError on violation.
inline void validate(const FmlpModel& m) {
  const std::size_t k_count = m.num_neurons;
  if (k_count == 0) throw ArgumentError("model: no functional neurons");
  if (m.params.a.size() != k_count || m.params.b.size() != k_count ||
      m.params.beta.size() != k_count) {
    throw ArgumentError("model: functional-layer parameter count does not match K");
  }
  for (const auto& per_k : m.params.beta) {
    if (per_k.size() != m.basis.sensors.size()) {
      throw ArgumentError("model: beta sensor count does not match basis");
    }
    for (std::size_t r = 0; r < per_k.size(); ++r) {
      if (per_k[r].size() != static_cast<std::size_t>(m.basis.sensors[r].num_components)) {
        throw ArgumentError("model: beta length does not match component count of sensor " +
                            std::to_string(m.basis.sensors[r].sensor + 1));
      }
    }
  }
  if (m.layers.empty() || m.layers.size() != m.params.layers.size()) {
    throw ArgumentError("model: numerical layer list is malformed");
  }
  std::size_t width = k_count;
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const auto& s = m.layers[l];
    if (s.inputs != width) throw ArgumentError("model: layer widths do not chain");
    if (m.params.layers[l].weights.size() != s.inputs * s.outputs ||
        m.params.layers[l].bias.size() != s.outputs) {
      throw ArgumentError("model: layer parameter sizes do not match shape");
    }
    width = s.outputs;
  }
  if (m.layers.back().outputs != 1 || m.layers.back().activation != Activation::kLinear) {
    throw ArgumentError("model: final layer must be linear with width 1");
  }
  bool finite = true;
  for_each_parameter(m.params, [&](const std::string&, const double& v) {
    finite = finite && std::isfinite(v);
  });
  if (!finite) throw ArgumentError("model: non-finite parameter");
  if (!(m.label_scale > 0.0)) throw ArgumentError("model: label scale must be positive");
}

/// Fresh model: weights and beta uniform(-init_scale, init_scale), biases 0,
/// a_k = 1.
inline FmlpModel make_model(const fpca::EigenBasis& basis, const Architecture& arch,
                            double label_scale, numerics::SeededRng& rng,
                            double init_scale = 0.5) {
  if (arch.functional_neurons == 0) throw ArgumentError("make_model: K must be positive");
  if (basis.sensors.empty()) throw ArgumentError("make_model: basis has no sensors");
  FmlpModel m;
  m.num_neurons = arch.functional_neurons;
  m.basis = basis;
  m.label_scale = label_scale;
  const std::size_t k_count = arch.functional_neurons;
  m.params.a.assign(k_count, 1.0);
  m.params.b.assign(k_count, 0.0);
  m.params.beta.resize(k_count);
  for (auto& per_k : m.params.beta) {
    per_k.resize(basis.sensors.size());
    for (std::size_t r = 0; r < basis.sensors.size(); ++r) {
      per_k[r].resize(static_cast<std::size_t>(basis.sensors[r].num_components));
      for (double& v : per_k[r]) v = rng.uniform(-init_scale, init_scale);
    }
  }
  std::size_t width = k_count;
  auto add_layer = [&](std::size_t outputs, Activation act) {
    if (outputs == 0) throw ArgumentError("make_model: layer width must be positive");
    m.layers.push_back({width, outputs, act});
    LayerParams p;
    p.weights.resize(width * outputs);
    for (double& v : p.weights) v = rng.uniform(-init_scale, init_scale);
    p.bias.assign(outputs, 0.0);
    m.params.layers.push_back(std::move(p));
    width = outputs;
  };
  for (std::size_t w : arch.hidden_widths) add_layer(w, Activation::kLogistic);
  add_layer(1, Activation::kLinear);
  validate(m);
  return m;
}

/// V_{k,r} on the grid: sum_p beta_{k,r,p} phi_{r,p}(T_j).
inline std::vector<double> weight_curve(const FmlpModel& m, std::size_t k, std::size_t r) {
  if (k >= m.num_neurons || r >= m.basis.sensors.size()) {
    throw ArgumentError("weight_curve: neuron or sensor index out of range");
  }
  const auto& sb = m.basis.sensors[r];
  const auto& beta = m.params.beta[k][r];
  std::vector<double> v(m.basis.grid_size(), 0.0);
  for (std::size_t p = 0; p < beta.size(); ++p) {
    for (std::size_t j = 0; j < v.size(); ++j) v[j] += beta[p] * sb.eigenfunctions[p][j];
  }
  return v;
}

namespace detail {

inline void check_instance(const FmlpModel& m, const FunctionalInstance& inst) {
  if (inst.grid_size() != m.basis.grid_size()) {
    throw ArgumentError("instance grid length " + std::to_string(inst.grid_size()) +
                        " does not match model grid length " +
                        std::to_string(m.basis.grid_size()));
  }
  if (inst.num_sensors() != m.basis.sensors.size()) {
    throw ArgumentError("instance sensor count does not match model");
  }
}

// Linear part of neuron k from precomputed scores (sensor-major layout).
inline double neuron_input(const Parameters& p, std::size_t k, std::span<const double> scores) {
  double u = p.b[k];
  std::size_t idx = 0;
  for (const auto& per_r : p.beta[k]) {
    for (double beta : per_r) u += beta * scores[idx++];
  }
  return u;
}

}  // namespace detail

/// Functional-layer activations evaluated directly through the weight curves
/// and the integral approximator.
inline std::vector<double> functional_layer_forward(const FmlpModel& m,
                                                    const FunctionalInstance& inst) {
  detail::check_instance(m, inst);
  std::vector<double> z(m.num_neurons);
  for (std::size_t k = 0; k < m.num_neurons; ++k) {
    double u = m.params.b[k];
    for (std::size_t r = 0; r < m.basis.sensors.size(); ++r) {
      u += numerics::discrete_integral(weight_curve(m, k, r), inst.curves.row(r));
    }
    z[k] = numerics::logistic(u);
  }
  return z;
}

/// Functional-layer activations from projection scores.
inline std::vector<double> functional_layer_from_scores(const FmlpModel& m,
                                                        std::span<const double> scores) {
  if (scores.size() != m.basis.num_scores()) {
    throw ArgumentError("functional_layer_from_scores: score vector has wrong length");
  }
  std::vector<double> z(m.num_neurons);
  for (std::size_t k = 0; k < m.num_neurons; ++k) {
    z[k] = numerics::logistic(detail::neuron_input(m.params, k, scores));
  }
  return z;
}

namespace detail {

inline double activate(Activation a, double u) {
  return a == Activation::kLogistic ? numerics::logistic(u) : u;
}

// Forward through the numerical stack; `outs[l]` receives the output of
// layer l (outs[0] is the layer input a * z).
inline double numerical_forward(const FmlpModel& m, std::span<const double> z,
                                std::vector<std::vector<double>>& outs) {
  outs.resize(m.layers.size() + 1);
  outs[0].resize(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) outs[0][k] = m.params.a[k] * z[k];
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const auto& s = m.layers[l];
    const auto& p = m.params.layers[l];
    auto& out = outs[l + 1];
    out.resize(s.outputs);
    for (std::size_t o = 0; o < s.outputs; ++o) {
      double u = p.bias[o];
      for (std::size_t i = 0; i < s.inputs; ++i) u += p.weights[o * s.inputs + i] * outs[l][i];
      out[o] = activate(s.activation, u);
    }
  }
  return outs.back()[0];
}

}  // namespace detail

/// Network output in label_scale units from projection scores.
inline double forward_scores(const FmlpModel& m, std::span<const double> scores) {
  const auto z = functional_layer_from_scores(m, scores);
  std::vector<std::vector<double>> outs;
  return detail::numerical_forward(m, z, outs);
}

/// Network output in label_scale units (multiply by label_scale for cycles).
inline double forward(const FmlpModel& m, const FunctionalInstance& inst) {
  detail::check_instance(m, inst);
  return forward_scores(m, fpca::project(m.basis, inst));
}

/// Reported RUL in cycles: the scaled output times label_scale, floored at 0.
inline double to_reported_rul(const FmlpModel& m, double scaled_output) {
  return std::max(0.0, scaled_output * m.label_scale);
}

inline double predict(const FmlpModel& m, const FunctionalInstance& inst) {
  return to_reported_rul(m, forward(m, inst));
}

/// Instances reduced to what training needs: scores and scaled targets.
struct ScoredBatch {
  std::vector<std::vector<double>> scores;
  std::vector<double> targets;  // label / label_scale

  std::size_t size() const noexcept { return targets.size(); }
};

inline ScoredBatch score_instances(const FmlpModel& m,
                                   std::span<const FunctionalInstance> instances) {
  ScoredBatch out;
  out.scores.reserve(instances.size());
  out.targets.reserve(instances.size());
  for (const auto& inst : instances) {
    if (!inst.label) throw ArgumentError("training instance has no label");
    detail::check_instance(m, inst);
    out.scores.push_back(fpca::project(m.basis, inst));
    out.targets.push_back(*inst.label / m.label_scale);
  }
  return out;
}

/// Mean squared error over the selected rows of a scored batch.
inline double loss_scores(const FmlpModel& m, const ScoredBatch& batch,
                          std::span<const std::size_t> rows) {
  if (rows.empty()) throw ArgumentError("loss: empty batch");
  double s = 0.0;
  for (std::size_t i : rows) {
    const double e = batch.targets[i] - forward_scores(m, batch.scores[i]);
    s += e * e;
  }
  return s / static_cast<double>(rows.size());
}

/// J = (1/N) sum (y_i - yhat_i)^2 with labels scaled by 1/label_scale.
inline double loss(const FmlpModel& m, std::span<const FunctionalInstance> batch) {
  const auto scored = score_instances(m, batch);
  std::vector<std::size_t> rows(scored.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return loss_scores(m, scored, rows);
}

struct LossAndGradient {
  double loss = 0.0;
  Parameters gradient;
};

/// Analytic gradient of the batch MSE over the selected rows. Contributions
/// are summed in row order, so the result is reproducible.
inline LossAndGradient gradient_scores(const FmlpModel& m, const ScoredBatch& batch,
                                       std::span<const std::size_t> rows) {
  if (rows.empty()) throw ArgumentError("backward: empty batch");
  LossAndGradient out;
  out.gradient = zeros_like(m.params);
  Parameters& g = out.gradient;
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  std::vector<std::vector<double>> outs;
  std::vector<double> delta, next;

  for (std::size_t i : rows) {
    const auto& scores = batch.scores[i];
    const auto z = functional_layer_from_scores(m, scores);
    const double y_hat = detail::numerical_forward(m, z, outs);
    const double err = y_hat - batch.targets[i];
    out.loss += err * err;

    delta.assign(1, 2.0 * err * inv_n);  // dJ/d(output of last layer)
    for (std::size_t l = m.layers.size(); l-- > 0;) {
      const auto& s = m.layers[l];
      const auto& p = m.params.layers[l];
      auto& gp = g.layers[l];
      const auto& out_l = outs[l + 1];
      const auto& in_l = outs[l];
      for (std::size_t o = 0; o < s.outputs; ++o) {
        if (s.activation == Activation::kLogistic) delta[o] *= out_l[o] * (1.0 - out_l[o]);
      }
      next.assign(s.inputs, 0.0);
      for (std::size_t o = 0; o < s.outputs; ++o) {
        gp.bias[o] += delta[o];
        for (std::size_t in = 0; in < s.inputs; ++in) {
          gp.weights[o * s.inputs + in] += delta[o] * in_l[in];
          next[in] += p.weights[o * s.inputs + in] * delta[o];
        }
      }
      delta.swap(next);
    }
    // delta now holds dJ/d(a_k z_k).
    for (std::size_t k = 0; k < m.num_neurons; ++k) {
      g.a[k] += delta[k] * z[k];
      const double d_pre = delta[k] * m.params.a[k] * z[k] * (1.0 - z[k]);
      g.b[k] += d_pre;
      std::size_t idx = 0;
      for (auto& per_r : g.beta[k]) {
        for (double& gb : per_r) gb += d_pre * scores[idx++];
      }
    }
  }
  out.loss *= inv_n;

  for_each_parameter(g, [](const std::string& block, const double& v) {
    if (!std::isfinite(v)) throw NumericError("backward: non-finite gradient in block " + block);
  });
  return out;
}

/// Analytic gradient of loss() with respect to every parameter.
inline Parameters backward(const FmlpModel& m, std::span<const FunctionalInstance> batch) {
  const auto scored = score_instances(m, batch);
  std::vector<std::size_t> rows(scored.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return gradient_scores(m, scored, rows).gradient;
}

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 300;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  double init_scale = 0.5;
  int patience = 25;
  double validation_fraction = 0.1;
  /// Heavy-ball momentum on the gradient step; 0 gives plain descent.
  double momentum = 0.9;
  /// Full-batch only: reject a step that raises the loss and halve the rate.
  bool halve_on_increase = false;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

inline void validate(const TrainConfig& c) {
  if (!(c.learning_rate > 0.0)) throw ArgumentError("learning_rate must be positive");
  if (c.epochs <= 0) throw ArgumentError("epochs must be positive");
  if (c.batch_size == 0) throw ArgumentError("batch_size must be positive");
  if (!(c.init_scale > 0.0)) throw ArgumentError("init_scale must be positive");
  if (c.patience <= 0) throw ArgumentError("patience must be positive");
  if (!(c.validation_fraction >= 0.0 && c.validation_fraction <= 0.5)) {
    throw ArgumentError("validation_fraction must lie in [0, 0.5]");
  }
  if (!(c.momentum >= 0.0 && c.momentum < 1.0)) {
    throw ArgumentError("momentum must lie in [0, 1)");
  }
}

struct EpochRecord {
  int epoch = 0;
  double train_mse = 0.0;
  /// NaN when no validation split is used.
  double val_mse = std::numeric_limits<double>::quiet_NaN();
  double learning_rate = 0.0;
};

struct TrainResult {
  FmlpModel model;
  std::vector<EpochRecord> trace;
  int best_epoch = 0;
  std::vector<std::int64_t> validation_units;
};

namespace detail {

// Engines (not windows) are held out, since windows of one engine overlap.
inline std::vector<std::int64_t> pick_validation_units(
    std::span<const FunctionalInstance> instances, double fraction, numerics::SeededRng& rng) {
  std::vector<std::int64_t> units;
  std::unordered_set<std::int64_t> seen;
  for (const auto& inst : instances) {
    if (seen.insert(inst.unit_id).second) units.push_back(inst.unit_id);
  }
  if (fraction <= 0.0 || units.size() < 2) return {};
  rng.shuffle(units);
  auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(units.size())));
  count = std::clamp<std::size_t>(count, 1, units.size() - 1);
  units.resize(count);
  std::sort(units.begin(), units.end());
  return units;
}

inline void add_scaled(Parameters& dst, const Parameters& src, double scale) {
  std::vector<double*> d;
  for_each_parameter(dst, [&](const std::string&, double& v) { d.push_back(&v); });
  std::size_t i = 0;
  for_each_parameter(src, [&](const std::string&, const double& v) { *d[i++] += scale * v; });
}

}  // namespace detail

/// Mini-batch gradient descent on the scaled-label MSE.
///
/// The initial parameters, the validation split and the per-epoch batch
/// order all come from one SeededRng seeded with cfg.seed. With a
/// validation split the parameters of the best validation epoch are
/// returned and training stops after `patience` epochs without improvement.
inline TrainResult train(std::span<const FunctionalInstance> instances,
                         const fpca::EigenBasis& basis, const TrainConfig& cfg,
                         const Architecture& arch = {},
                         double label_scale = preprocess::kDefaultRulCap) {
  validate(cfg);
  if (instances.empty()) throw ArgumentError("train: no instances");

  numerics::SeededRng rng(cfg.seed);
  TrainResult result;
  result.model = make_model(basis, arch, label_scale, rng, cfg.init_scale);
  FmlpModel& m = result.model;

  result.validation_units = detail::pick_validation_units(instances, cfg.validation_fraction, rng);
  const std::unordered_set<std::int64_t> held_out(result.validation_units.begin(),
                                                  result.validation_units.end());
  const ScoredBatch scored = score_instances(m, instances);
  std::vector<std::size_t> train_rows, val_rows;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    (held_out.contains(instances[i].unit_id) ? val_rows : train_rows).push_back(i);
  }

  const bool full_batch = cfg.batch_size >= train_rows.size();
  double lr = cfg.learning_rate;
  Parameters velocity = zeros_like(m.params);
  Parameters best = m.params;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;
  double current_loss = loss_scores(m, scored, train_rows);

  std::vector<std::size_t> order = train_rows;
  std::vector<std::size_t> batch;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    try {
      if (full_batch && cfg.halve_on_increase) {
        const auto lg = gradient_scores(m, scored, train_rows);
        for (int attempt = 0;; ++attempt) {
          Parameters trial = m.params;
          detail::add_scaled(trial, lg.gradient, -lr);
          FmlpModel probe = m;
          probe.params = std::move(trial);
          const double trial_loss = loss_scores(probe, scored, train_rows);
          if (trial_loss <= current_loss) {
            m.params = std::move(probe.params);
            current_loss = trial_loss;
            break;
          }
          lr *= 0.5;
          if (attempt == 60) break;  // step below resolution; keep parameters
        }
      } else {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
          const std::size_t end = std::min(order.size(), start + cfg.batch_size);
          batch.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                       order.begin() + static_cast<std::ptrdiff_t>(end));
          const auto lg = gradient_scores(m, scored, batch);
          if (cfg.momentum > 0.0) {
            detail::add_scaled(velocity, velocity, cfg.momentum - 1.0);
            detail::add_scaled(velocity, lg.gradient, 1.0);
            detail::add_scaled(m.params, velocity, -lr);
          } else {
            detail::add_scaled(m.params, lg.gradient, -lr);
          }
        }
        current_loss = loss_scores(m, scored, train_rows);
      }
    } catch (const NumericError& e) {
      // A non-finite gradient mid-epoch is divergence of the run.
      throw TrainingError(std::string("train: ") + e.what(), epoch);
    }

    if (!std::isfinite(current_loss)) throw TrainingError("train: loss diverged", epoch);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_mse = current_loss;
    rec.learning_rate = lr;
    if (!val_rows.empty()) {
      rec.val_mse = loss_scores(m, scored, val_rows);
      if (!std::isfinite(rec.val_mse)) throw TrainingError("train: validation loss diverged", epoch);
      if (rec.val_mse < best_val) {
        best_val = rec.val_mse;
        best = m.params;
        result.best_epoch = epoch;
        since_best = 0;
      } else {
        ++since_best;
      }
    } else {
      result.best_epoch = epoch;
    }
    result.trace.push_back(rec);
    if (!val_rows.empty() && since_best >= cfg.patience) break;
  }
  if (!val_rows.empty()) m.params = std::move(best);
  return result;
}

}  // namespace fmlp::model
