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

// End-to-end experiment driver behind the command-line tool.
//
// Output directory layout:
//   artifact.json   model artifact (fmlp-artifact/1)
//   trace.csv       epoch,train_mse,val_mse,learning_rate
//   report.csv      unit_id,true,est,h
//   report.json     metrics and improvement table
//   inspect/        per-sensor basis CSVs and functional-neuron features

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fmlp/artifact.hpp"
#include "fmlp/data_ingest.hpp"
#include "fmlp/errors.hpp"
#include "fmlp/eval.hpp"
#include "fmlp/fmlp.hpp"
#include "fmlp/fpca.hpp"
#include "fmlp/preprocess.hpp"
#include "json.hpp"

namespace fmlp::experiment {

namespace fs = std::filesystem;

/// Invalid experiment configuration (maps to the usage-error exit code).
class ConfigError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

struct ExperimentConfig {
  std::string data_root = "data/CMAPSS";
  data::SubsetId subset = data::SubsetId::kFD001;
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  model::TrainConfig train;
  model::Architecture architecture;
  preprocess::ConditionConfig condition;
  double fve_cutoff = fpca::kDefaultFveCutoff;
  int component_cap = fpca::kDefaultComponentCap;
  double t_cap = preprocess::kDefaultRulCap;
  bool cap_test_rul = true;
};

inline void validate(const ExperimentConfig& c) {
  try {
    model::validate(c.train);
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(c.fve_cutoff > 0.0 && c.fve_cutoff <= 1.0)) {
    throw ConfigError("config: fve_cutoff must lie in (0, 1]");
  }
  if (c.component_cap < 1) throw ConfigError("config: component_cap must be at least 1");
  if (!(c.t_cap > 0.0)) throw ConfigError("config: t_cap must be positive");
  if (c.architecture.functional_neurons == 0) {
    throw ConfigError("config: functional_neurons must be positive");
  }
  for (auto w : c.architecture.hidden_widths) {
    if (w == 0) throw ConfigError("config: hidden_width must be positive");
  }
  if (c.condition.hidden_width <= 0 || c.condition.epochs < 0 ||
      !(c.condition.learning_rate > 0.0)) {
    throw ConfigError("config: invalid condition regressor settings");
  }
}

/// Applies the keys of a flat JSON object onto `cfg`. Unknown keys and
/// wrongly typed values are rejected with the key name.
inline void apply_json(ExperimentConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "data_root") {
        cfg.data_root = value.get<std::string>();
      } else if (key == "subset") {
        cfg.subset = data::parse_subset_id(value.get<std::string>());
      } else if (key == "out_dir") {
        cfg.out_dir = value.get<std::string>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "learning_rate") {
        cfg.train.learning_rate = value.get<double>();
      } else if (key == "epochs") {
        cfg.train.epochs = value.get<int>();
      } else if (key == "batch_size") {
        cfg.train.batch_size = value.get<std::size_t>();
      } else if (key == "init_scale") {
        cfg.train.init_scale = value.get<double>();
      } else if (key == "patience") {
        cfg.train.patience = value.get<int>();
      } else if (key == "validation_fraction") {
        cfg.train.validation_fraction = value.get<double>();
      } else if (key == "momentum") {
        cfg.train.momentum = value.get<double>();
      } else if (key == "fve_cutoff") {
        cfg.fve_cutoff = value.get<double>();
      } else if (key == "component_cap") {
        cfg.component_cap = value.get<int>();
      } else if (key == "t_cap") {
        cfg.t_cap = value.get<double>();
      } else if (key == "cap_test_rul") {
        cfg.cap_test_rul = value.get<bool>();
      } else if (key == "functional_neurons") {
        cfg.architecture.functional_neurons = value.get<std::size_t>();
      } else if (key == "hidden_widths") {
        cfg.architecture.hidden_widths = value.get<std::vector<std::size_t>>();
      } else if (key == "condition_hidden_width") {
        cfg.condition.hidden_width = value.get<int>();
      } else if (key == "condition_epochs") {
        cfg.condition.epochs = value.get<int>();
      } else if (key == "condition_learning_rate") {
        cfg.condition.learning_rate = value.get<double>();
      } else {
        throw ConfigError("config: unknown key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("config: bad value for key '" + key + "': " + e.what());
    }
  }
}

inline ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  ExperimentConfig cfg;
  apply_json(cfg, j);
  return cfg;
}

/// Writes `content` to a sibling temporary file and renames it into place.
inline void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

/// Windows of every training engine after preprocessing.
inline std::vector<preprocess::FunctionalInstance> training_instances(
    std::span<const data::EngineTrajectory> train, const preprocess::Preprocessor& pre,
    int window, double t_cap) {
  const auto retained = pre.scaler.retained();
  std::vector<preprocess::FunctionalInstance> out;
  for (const auto& t : train) {
    auto windows = preprocess::slide_windows(pre.transform(t), retained, window, t_cap);
    for (auto& w : windows) out.push_back(std::move(w));
  }
  return out;
}

struct TrainOutcome {
  artifact::ModelArtifact artifact;
  std::vector<model::EpochRecord> trace;
  std::size_t num_instances = 0;
};

/// Preprocess, fit the basis and train on the training split of `subset`.
inline TrainOutcome fit_experiment(const data::DataSubset& subset, const ExperimentConfig& cfg) {
  validate(cfg);
  TrainOutcome out;
  auto& a = out.artifact;
  a.subset = subset.subset_id;
  a.window_length = subset.window_length;
  a.t_cap = cfg.t_cap;
  a.seed = cfg.seed;
  a.data_root = cfg.data_root;
  a.train_config = cfg.train;
  a.train_config.seed = cfg.seed;
  a.architecture = cfg.architecture;

  auto cond_cfg = cfg.condition;
  cond_cfg.seed = cfg.seed;
  a.preprocessor = preprocess::fit_preprocessor(subset.train, cond_cfg);
  a.retained_sensors = a.preprocessor.scaler.retained();
  if (a.retained_sensors.empty()) {
    throw IntegrityError("every sensor is constant in the training data");
  }

  const auto instances =
      training_instances(subset.train, a.preprocessor, subset.window_length, cfg.t_cap);
  if (instances.size() < 2) {
    throw IntegrityError("fewer than two training windows; engines shorter than the window?");
  }
  out.num_instances = instances.size();
  const auto basis =
      fpca::fit_basis(instances, a.retained_sensors, cfg.fve_cutoff, cfg.component_cap);
  auto result = model::train(instances, basis, a.train_config, cfg.architecture, cfg.t_cap);
  a.model = std::move(result.model);
  out.trace = std::move(result.trace);
  return out;
}

inline std::string trace_csv(std::span<const model::EpochRecord> trace) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "epoch,train_mse,val_mse,learning_rate\n";
  for (const auto& r : trace) {
    os << r.epoch << ',' << r.train_mse << ',';
    if (!std::isnan(r.val_mse)) os << r.val_mse;
    os << ',' << r.learning_rate << '\n';
  }
  return os.str();
}

inline std::string artifact_text(const artifact::ModelArtifact& a) {
  std::ostringstream os;
  artifact::save_model(a, os);
  return os.str();
}

/// Trains and writes artifact.json and trace.csv under cfg.out_dir.
inline TrainOutcome run_train(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto subset = data::load_subset(cfg.data_root, cfg.subset);
  auto out = fit_experiment(subset, cfg);
  const fs::path dir(cfg.out_dir);
  atomic_write(dir / "artifact.json", artifact_text(out.artifact));
  atomic_write(dir / "trace.csv", trace_csv(out.trace));
  return out;
}

inline artifact::ModelArtifact read_artifact(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model artifact " + path.string());
  return artifact::load_model(in);
}

/// Preprocesses each trajectory with the artifact and predicts from its last
/// window. Returns (unit_id, RUL estimate) pairs in input order.
inline std::vector<std::pair<std::int64_t, double>> predict_trajectories(
    const artifact::ModelArtifact& a, std::span<const data::EngineTrajectory> trajs) {
  std::vector<std::pair<std::int64_t, double>> out;
  out.reserve(trajs.size());
  for (const auto& t : trajs) {
    const auto inst =
        preprocess::last_window(a.preprocessor.transform(t), a.retained_sensors, a.window_length);
    out.emplace_back(t.unit_id, model::predict(a.model, inst));
  }
  return out;
}

/// Scores the artifact on the test split, against the published baselines.
inline eval::EvalReport evaluate(const artifact::ModelArtifact& a, const data::DataSubset& subset,
                                 bool cap_test_rul) {
  if (subset.subset_id != a.subset) {
    throw ArgumentError("artifact was trained on " + data::to_string(a.subset) +
                        " but evaluation data is " + data::to_string(subset.subset_id));
  }
  const auto preds = predict_trajectories(a, subset.test);
  std::vector<std::int64_t> ids;
  std::vector<double> est, truth;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    ids.push_back(preds[i].first);
    est.push_back(preds[i].second);
    truth.push_back(static_cast<double>(subset.test_rul[i]));
  }
  const auto baselines = eval::baselines_for(a.subset);
  return eval::build_report(a.subset, ids, est, truth, baselines,
                            cap_test_rul ? std::optional<double>(a.t_cap) : std::nullopt);
}

struct EvaluateOutcome {
  eval::EvalReport report;
  std::string table;
};

/// Evaluates and writes report.csv and report.json under cfg.out_dir.
inline EvaluateOutcome run_evaluate(const fs::path& model_path, const ExperimentConfig& cfg) {
  const auto a = read_artifact(model_path);
  const auto subset = data::load_subset(cfg.data_root, a.subset);
  EvaluateOutcome out;
  out.report = evaluate(a, subset, cfg.cap_test_rul);
  out.table = eval::format_table(out.report);
  const fs::path dir(cfg.out_dir);
  std::ostringstream csv;
  eval::write_report_csv(csv, out.report);
  atomic_write(dir / "report.csv", csv.str());
  atomic_write(dir / "report.json", eval::report_to_json(out.report).dump(2) + "\n");
  return out;
}

/// Plot data for one sensor: grid, mean, the kept eigenfunctions, and the
/// full eigenvalue spectrum with its cumulative FVE.
inline std::string sensor_basis_csv(const fpca::SensorBasis& s, std::span<const double> grid,
                                    int component_cap) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "j,grid,mean";
  for (int p = 1; p <= component_cap; ++p) os << ",phi_" << p;
  os << ",eigenvalue,fve\n";
  double total = 0.0;
  for (double v : s.eigenvalues) total += v;
  double cumulative = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    os << (j + 1) << ',' << grid[j] << ',' << s.mean[j];
    for (int p = 0; p < component_cap; ++p) {
      os << ',';
      if (static_cast<std::size_t>(p) < s.eigenfunctions.size()) os << s.eigenfunctions[p][j];
    }
    cumulative += s.eigenvalues[j];
    os << ',' << s.eigenvalues[j] << ',' << (total > 0.0 ? cumulative / total : 0.0) << '\n';
  }
  return os.str();
}

struct FeatureRow {
  std::int64_t start_cycle = 0;
  double label = 0.0;
  std::vector<double> z;
};

/// Functional-neuron outputs along every window of one training engine.
inline std::vector<FeatureRow> neuron_features(const artifact::ModelArtifact& a,
                                               const data::EngineTrajectory& engine) {
  const auto windows = preprocess::slide_windows(a.preprocessor.transform(engine),
                                                 a.retained_sensors, a.window_length, a.t_cap);
  std::vector<FeatureRow> rows;
  for (const auto& w : windows) {
    rows.push_back({w.start_cycle, *w.label, model::functional_layer_forward(a.model, w)});
  }
  return rows;
}

inline std::string features_csv(std::span<const FeatureRow> rows, std::size_t k_count) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "instance,start_cycle,label";
  for (std::size_t k = 1; k <= k_count; ++k) os << ",z_" << k;
  os << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << (i + 1) << ',' << rows[i].start_cycle << ',' << rows[i].label;
    for (double v : rows[i].z) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

struct InspectOutcome {
  std::vector<fs::path> sensor_files;
  fs::path summary_file;
  std::optional<fs::path> features_file;
  std::int64_t unit_id = 0;
};

/// Writes per-sensor basis CSVs, a component summary and, when training data
/// for `engine` is given, the functional-neuron feature trajectories.
inline InspectOutcome write_inspection(const artifact::ModelArtifact& a, const fs::path& dir,
                                       const data::EngineTrajectory* engine) {
  InspectOutcome out;
  const auto& basis = a.model.basis;
  std::ostringstream summary;
  summary << std::setprecision(std::numeric_limits<double>::max_digits10);
  summary << "sensor,num_components,eigenvalue_1,eigenvalue_2,fve_1,fve_2\n";
  for (const auto& s : basis.sensors) {
    std::ostringstream name;
    name << "sensor_" << std::setw(2) << std::setfill('0') << (s.sensor + 1) << ".csv";
    const fs::path path = dir / name.str();
    atomic_write(path, sensor_basis_csv(s, basis.grid, basis.component_cap));
    out.sensor_files.push_back(path);

    double total = 0.0;
    for (double v : s.eigenvalues) total += v;
    const double l1 = s.eigenvalues.empty() ? 0.0 : s.eigenvalues[0];
    const double l2 = s.eigenvalues.size() > 1 ? s.eigenvalues[1] : 0.0;
    summary << (s.sensor + 1) << ',' << s.num_components << ',' << l1 << ',' << l2 << ','
            << (total > 0 ? l1 / total : 0.0) << ',' << (total > 0 ? (l1 + l2) / total : 0.0)
            << '\n';
  }
  out.summary_file = dir / "components.csv";
  atomic_write(out.summary_file, summary.str());
  if (engine != nullptr) {
    out.unit_id = engine->unit_id;
    const auto rows = neuron_features(a, *engine);
    const fs::path path = dir / ("features_unit_" + std::to_string(engine->unit_id) + ".csv");
    atomic_write(path, features_csv(rows, a.model.num_neurons));
    out.features_file = path;
  }
  return out;
}

/// Inspection against the artifact's training data. `unit` selects the
/// engine (default: the first training engine).
inline InspectOutcome run_inspect(const fs::path& model_path, const std::string& data_root,
                                  const fs::path& out_dir, std::optional<std::int64_t> unit) {
  const auto a = read_artifact(model_path);
  const auto subset = data::load_subset(data_root.empty() ? a.data_root : data_root, a.subset);
  const data::EngineTrajectory* engine = nullptr;
  for (const auto& t : subset.train) {
    if (!unit || t.unit_id == *unit) {
      engine = &t;
      break;
    }
  }
  if (engine == nullptr) {
    throw ArgumentError("no training engine with unit id " + std::to_string(unit.value_or(0)));
  }
  return write_inspection(a, out_dir / "inspect", engine);
}

}  // namespace fmlp::experiment
