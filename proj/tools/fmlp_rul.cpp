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

// fmlp_rul: train, evaluate, predict and inspect functional-MLP RUL models.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric/training error.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fmlp/data_ingest.hpp"
#include "fmlp/errors.hpp"
#include "fmlp/experiment.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CommonFlags {
  std::string config;
  std::string data_root;
  std::string subset;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string model;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_model) {
  cmd->add_option("--config", f.config, "Flat JSON experiment config");
  cmd->add_option("--data-root", f.data_root, "Directory holding train_/test_/RUL_FD00x.txt");
  cmd->add_option("--subset", f.subset, "FD001, FD002, FD003 or FD004");
  cmd->add_option("--seed", f.seed, "Seed for every random choice");
  cmd->add_option("--out", f.out, "Output directory");
  if (with_model) cmd->add_option("--model", f.model, "Model artifact (default <out>/artifact.json)");
}

fmlp::experiment::ExperimentConfig resolve(const CommonFlags& f) {
  fmlp::experiment::ExperimentConfig cfg;
  if (!f.config.empty()) cfg = fmlp::experiment::load_config(f.config);
  if (!f.data_root.empty()) cfg.data_root = f.data_root;
  if (!f.subset.empty()) {
    try {
      cfg.subset = fmlp::data::parse_subset_id(f.subset);
    } catch (const fmlp::ArgumentError& e) {
      throw fmlp::experiment::ConfigError(e.what());
    }
  }
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.out_dir = f.out;
  fmlp::experiment::validate(cfg);
  return cfg;
}

std::string model_path(const CommonFlags& f, const fmlp::experiment::ExperimentConfig& cfg) {
  return f.model.empty() ? (std::filesystem::path(cfg.out_dir) / "artifact.json").string()
                         : f.model;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional MLP remaining-useful-life estimation on C-MAPSS data"};
  app.require_subcommand(1);

  CommonFlags train_f, eval_f, predict_f, inspect_f;
  std::string trajectory_file;
  std::optional<std::int64_t> inspect_unit;

  auto* train = app.add_subcommand("train", "Fit preprocessing, basis and network; write artifact.json and trace.csv");
  add_common(train, train_f, false);

  auto* evaluate = app.add_subcommand("evaluate", "Score an artifact on the test split; write report.csv and report.json");
  add_common(evaluate, eval_f, true);

  auto* predict = app.add_subcommand("predict", "Print unit_id,rul_est for every engine of a trajectory file");
  add_common(predict, predict_f, true);
  predict->add_option("trajectory_file", trajectory_file, "C-MAPSS formatted trajectory file")->required();

  auto* inspect = app.add_subcommand("inspect", "Write plot-ready CSVs of the eigenbasis and neuron features");
  add_common(inspect, inspect_f, true);
  inspect->add_option("--unit", inspect_unit, "Training engine for the feature trajectories");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train) {
      const auto cfg = resolve(train_f);
      const auto out = fmlp::experiment::run_train(cfg);
      std::cout << "trained on " << out.num_instances << " windows, " << out.trace.size()
                << " epochs; wrote " << cfg.out_dir << "/artifact.json and trace.csv\n";
    } else if (*evaluate) {
      const auto cfg = resolve(eval_f);
      const auto out = fmlp::experiment::run_evaluate(model_path(eval_f, cfg), cfg);
      std::cout << out.table;
    } else if (*predict) {
      const auto cfg = resolve(predict_f);
      const auto a = fmlp::experiment::read_artifact(model_path(predict_f, cfg));
      std::ifstream in(trajectory_file);
      if (!in) throw fmlp::IoError("cannot open " + trajectory_file);
      const auto trajs = fmlp::data::parse_trajectory_file(in);
      const auto preds = fmlp::experiment::predict_trajectories(a, trajs);
      std::cout << std::setprecision(std::numeric_limits<double>::max_digits10);
      std::cout << "unit_id,rul_est\n";
      for (const auto& [unit, est] : preds) std::cout << unit << ',' << est << '\n';
    } else if (*inspect) {
      const auto cfg = resolve(inspect_f);
      const auto out = fmlp::experiment::run_inspect(
          model_path(inspect_f, cfg), inspect_f.data_root, cfg.out_dir, inspect_unit);
      std::cout << "wrote " << out.sensor_files.size() << " sensor files";
      if (out.features_file) std::cout << " and " << out.features_file->string();
      std::cout << '\n';
    }
  } catch (const fmlp::experiment::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fmlp::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const fmlp::TrainingError& e) {
    std::cerr << "training error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const fmlp::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
