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

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "synthetic_cmapss.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write a synthetic run-to-failure fleet as train_/test_/RUL_<subset>.txt"};
  std::string dir = "synthetic";
  std::string subset = "FD001";
  fmlp::testing::SyntheticFleetConfig cfg;
  app.add_option("--out", dir, "Output directory");
  app.add_option("--subset", subset, "Subset name used in the file names");
  app.add_option("--train-engines", cfg.train_engines);
  app.add_option("--test-engines", cfg.test_engines);
  app.add_option("--seed", cfg.seed);
  app.add_option("--noise", cfg.noise, "Noise level relative to the degradation gain");
  app.add_flag("--multi-condition", cfg.multi_condition, "Draw each cycle from six operating regimes");
  CLI11_PARSE(app, argc, argv);

  const auto fleet = fmlp::testing::make_synthetic_fleet(cfg);
  fmlp::testing::write_fleet(fleet, dir, subset);
  std::cout << "wrote " << fleet.train.size() << " training and " << fleet.test.size()
            << " test engines to " << dir << '\n';
  return 0;
}
