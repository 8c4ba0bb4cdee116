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

// The model artifact: one JSON document (schema "fmlp-artifact/1") holding
// everything inference needs, i.e. the condition regressors, the min-max
// scaler, the retained sensors, the eigenbasis and the network, plus an echo
// of the training configuration.
//
// Doubles are written in shortest round-trip form, so save -> load
// reproduces every parameter bit for bit.

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "fmlp/data_ingest.hpp"
#include "fmlp/errors.hpp"
#include "fmlp/fmlp.hpp"
#include "fmlp/fpca.hpp"
#include "fmlp/preprocess.hpp"
#include "json.hpp"

namespace fmlp::artifact {

inline constexpr const char* kSchema = "fmlp-artifact/1";

using json = nlohmann::ordered_json;

struct ModelArtifact {
  data::SubsetId subset = data::SubsetId::kFD001;
  int window_length = 0;
  double t_cap = preprocess::kDefaultRulCap;
  std::uint64_t seed = 0;
  std::string data_root;
  model::TrainConfig train_config;
  model::Architecture architecture;
  preprocess::Preprocessor preprocessor;
  std::vector<std::size_t> retained_sensors;  // 0-based columns
  model::FmlpModel model;

  friend bool operator==(const ModelArtifact&, const ModelArtifact&) = default;
};

namespace detail {

inline json to_json(const preprocess::ConditionModel& c) {
  json j;
  j["hidden_width"] = c.config.hidden_width;
  j["epochs"] = c.config.epochs;
  j["learning_rate"] = c.config.learning_rate;
  j["seed"] = c.config.seed;
  j["settings_min"] = c.settings_min;
  j["settings_max"] = c.settings_max;
  auto regs = json::array();
  for (const auto& r : c.regressors) {
    json jr;
    jr["hidden_weights"] = r.hidden_weights;
    jr["hidden_bias"] = r.hidden_bias;
    jr["output_weights"] = r.output_weights;
    jr["output_bias"] = r.output_bias;
    jr["target_mean"] = r.target_mean;
    jr["target_scale"] = r.target_scale;
    regs.push_back(std::move(jr));
  }
  j["regressors"] = std::move(regs);
  return j;
}

inline preprocess::ConditionModel condition_from_json(const json& j) {
  preprocess::ConditionModel c;
  c.config.hidden_width = j.at("hidden_width").get<int>();
  c.config.epochs = j.at("epochs").get<int>();
  c.config.learning_rate = j.at("learning_rate").get<double>();
  c.config.seed = j.at("seed").get<std::uint64_t>();
  c.settings_min = j.at("settings_min").get<std::array<double, data::kNumSettings>>();
  c.settings_max = j.at("settings_max").get<std::array<double, data::kNumSettings>>();
  for (const auto& jr : j.at("regressors")) {
    preprocess::SensorRegressor r;
    r.hidden_weights = jr.at("hidden_weights").get<std::vector<double>>();
    r.hidden_bias = jr.at("hidden_bias").get<std::vector<double>>();
    r.output_weights = jr.at("output_weights").get<std::vector<double>>();
    r.output_bias = jr.at("output_bias").get<double>();
    r.target_mean = jr.at("target_mean").get<double>();
    r.target_scale = jr.at("target_scale").get<double>();
    const auto h = static_cast<std::size_t>(c.config.hidden_width);
    if (r.hidden_weights.size() != h * data::kNumSettings || r.hidden_bias.size() != h ||
        r.output_weights.size() != h) {
      throw LoadError("artifact: condition regressor sizes do not match hidden_width");
    }
    c.regressors.push_back(std::move(r));
  }
  if (c.regressors.size() != data::kNumSensors) {
    throw LoadError("artifact: expected one condition regressor per sensor");
  }
  return c;
}

inline json to_json(const preprocess::MinMaxScaler& s) {
  json j;
  j["min"] = s.min;
  j["max"] = s.max;
  j["constant"] = s.constant;
  return j;
}

inline preprocess::MinMaxScaler scaler_from_json(const json& j) {
  preprocess::MinMaxScaler s;
  s.min = j.at("min").get<std::array<double, data::kNumSensors>>();
  s.max = j.at("max").get<std::array<double, data::kNumSensors>>();
  s.constant = j.at("constant").get<std::array<bool, data::kNumSensors>>();
  return s;
}

inline json to_json(const fpca::EigenBasis& b) {
  json j;
  j["grid"] = b.grid;
  j["fve_cutoff"] = b.fve_cutoff;
  j["component_cap"] = b.component_cap;
  auto sensors = json::array();
  for (const auto& s : b.sensors) {
    json js;
    js["sensor"] = s.sensor + 1;
    js["mean"] = s.mean;
    js["eigenvalues"] = s.eigenvalues;
    js["num_components"] = s.num_components;
    js["eigenfunctions"] = s.eigenfunctions;
    sensors.push_back(std::move(js));
  }
  j["sensors"] = std::move(sensors);
  return j;
}

inline fpca::EigenBasis basis_from_json(const json& j) {
  fpca::EigenBasis b;
  b.grid = j.at("grid").get<std::vector<double>>();
  b.fve_cutoff = j.at("fve_cutoff").get<double>();
  b.component_cap = j.at("component_cap").get<int>();
  for (const auto& js : j.at("sensors")) {
    fpca::SensorBasis s;
    const auto one_based = js.at("sensor").get<std::size_t>();
    if (one_based < 1 || one_based > data::kNumSensors) {
      throw LoadError("artifact: basis sensor id out of range");
    }
    s.sensor = one_based - 1;
    s.mean = js.at("mean").get<std::vector<double>>();
    s.eigenvalues = js.at("eigenvalues").get<std::vector<double>>();
    s.num_components = js.at("num_components").get<int>();
    s.eigenfunctions = js.at("eigenfunctions").get<std::vector<std::vector<double>>>();
    if (s.mean.size() != b.grid.size() ||
        s.eigenfunctions.size() != static_cast<std::size_t>(s.num_components)) {
      throw LoadError("artifact: basis arrays do not match grid or component count");
    }
    for (const auto& phi : s.eigenfunctions) {
      if (phi.size() != b.grid.size()) throw LoadError("artifact: eigenfunction length mismatch");
    }
    b.sensors.push_back(std::move(s));
  }
  return b;
}

inline json to_json(const model::FmlpModel& m) {
  json j;
  j["functional_neurons"] = m.num_neurons;
  j["label_scale"] = m.label_scale;
  j["a"] = m.params.a;
  j["b"] = m.params.b;
  j["beta"] = m.params.beta;
  auto layers = json::array();
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    json jl;
    jl["inputs"] = m.layers[l].inputs;
    jl["outputs"] = m.layers[l].outputs;
    jl["activation"] = model::to_string(m.layers[l].activation);
    jl["weights"] = m.params.layers[l].weights;
    jl["bias"] = m.params.layers[l].bias;
    layers.push_back(std::move(jl));
  }
  j["layers"] = std::move(layers);
  return j;
}

inline model::FmlpModel model_from_json(const json& j, fpca::EigenBasis basis) {
  model::FmlpModel m;
  m.basis = std::move(basis);
  m.num_neurons = j.at("functional_neurons").get<std::size_t>();
  m.label_scale = j.at("label_scale").get<double>();
  m.params.a = j.at("a").get<std::vector<double>>();
  m.params.b = j.at("b").get<std::vector<double>>();
  m.params.beta = j.at("beta").get<std::vector<std::vector<std::vector<double>>>>();
  for (const auto& jl : j.at("layers")) {
    model::LayerShape s;
    s.inputs = jl.at("inputs").get<std::size_t>();
    s.outputs = jl.at("outputs").get<std::size_t>();
    const auto act = jl.at("activation").get<std::string>();
    if (act == "logistic") {
      s.activation = model::Activation::kLogistic;
    } else if (act == "linear") {
      s.activation = model::Activation::kLinear;
    } else {
      throw LoadError("artifact: unknown activation '" + act + "'");
    }
    m.layers.push_back(s);
    model::LayerParams p;
    p.weights = jl.at("weights").get<std::vector<double>>();
    p.bias = jl.at("bias").get<std::vector<double>>();
    m.params.layers.push_back(std::move(p));
  }
  return m;
}

inline json to_json(const model::TrainConfig& c) {
  json j;
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["init_scale"] = c.init_scale;
  j["patience"] = c.patience;
  j["validation_fraction"] = c.validation_fraction;
  j["momentum"] = c.momentum;
  j["halve_on_increase"] = c.halve_on_increase;
  return j;
}

inline model::TrainConfig train_config_from_json(const json& j) {
  model::TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.init_scale = j.at("init_scale").get<double>();
  c.patience = j.at("patience").get<int>();
  c.validation_fraction = j.at("validation_fraction").get<double>();
  c.momentum = j.at("momentum").get<double>();
  c.halve_on_increase = j.at("halve_on_increase").get<bool>();
  return c;
}

}  // namespace detail

inline json to_json(const ModelArtifact& a) {
  json j;
  j["schema"] = kSchema;
  j["subset"] = data::to_string(a.subset);
  j["window_length"] = a.window_length;
  j["t_cap"] = a.t_cap;
  j["seed"] = a.seed;
  j["data_root"] = a.data_root;
  j["train_config"] = detail::to_json(a.train_config);
  j["architecture"] = {{"functional_neurons", a.architecture.functional_neurons},
                       {"hidden_widths", a.architecture.hidden_widths}};
  json retained = json::array();
  for (auto s : a.retained_sensors) retained.push_back(s + 1);
  j["retained_sensors"] = std::move(retained);
  j["condition_model"] = detail::to_json(a.preprocessor.condition);
  j["scaler"] = detail::to_json(a.preprocessor.scaler);
  j["basis"] = detail::to_json(a.model.basis);
  j["network"] = detail::to_json(a.model);
  return j;
}

inline ModelArtifact from_json(const json& j) {
  try {
    const auto schema = j.at("schema").get<std::string>();
    if (schema != kSchema) {
      throw LoadError("artifact: unsupported schema '" + schema + "' (expected " + kSchema + ")");
    }
    ModelArtifact a;
    a.subset = data::parse_subset_id(j.at("subset").get<std::string>());
    a.window_length = j.at("window_length").get<int>();
    a.t_cap = j.at("t_cap").get<double>();
    a.seed = j.at("seed").get<std::uint64_t>();
    a.data_root = j.at("data_root").get<std::string>();
    a.train_config = detail::train_config_from_json(j.at("train_config"));
    a.architecture.functional_neurons =
        j.at("architecture").at("functional_neurons").get<std::size_t>();
    a.architecture.hidden_widths =
        j.at("architecture").at("hidden_widths").get<std::vector<std::size_t>>();
    for (auto s : j.at("retained_sensors").get<std::vector<std::size_t>>()) {
      if (s < 1 || s > data::kNumSensors) throw LoadError("artifact: retained sensor out of range");
      a.retained_sensors.push_back(s - 1);
    }
    a.preprocessor.condition = detail::condition_from_json(j.at("condition_model"));
    a.preprocessor.scaler = detail::scaler_from_json(j.at("scaler"));
    a.model = detail::model_from_json(j.at("network"), detail::basis_from_json(j.at("basis")));

    if (a.retained_sensors != a.preprocessor.scaler.retained()) {
      throw LoadError("artifact: retained sensors disagree with the scaler");
    }
    if (a.model.basis.sensors.size() != a.retained_sensors.size()) {
      throw LoadError("artifact: basis does not cover the retained sensors");
    }
    for (std::size_t r = 0; r < a.retained_sensors.size(); ++r) {
      if (a.model.basis.sensors[r].sensor != a.retained_sensors[r]) {
        throw LoadError("artifact: basis sensor order disagrees with retained sensors");
      }
    }
    if (static_cast<std::size_t>(a.window_length) != a.model.basis.grid_size()) {
      throw LoadError("artifact: window length does not match basis grid");
    }
    model::validate(a.model);
    return a;
  } catch (const LoadError&) {
    throw;
  } catch (const std::exception& e) {
    throw LoadError(std::string("artifact: ") + e.what());
  }
}

inline void save_model(const ModelArtifact& a, std::ostream& out) {
  out << to_json(a).dump(1) << '\n';
  if (!out) throw IoError("artifact: write failed");
}

inline ModelArtifact load_model(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw LoadError(std::string("artifact: not a valid JSON document: ") + e.what());
  }
  return from_json(j);
}

}  // namespace fmlp::artifact
