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

// Library walk-through: each pipeline stage called explicitly.
//
//   sample_fit_and_score <data_root> [FD001|FD002|FD003|FD004]

#include <iostream>
#include <string>
#include <vector>

#include "fmlp/data_ingest.hpp"
#include "fmlp/eval.hpp"
#include "fmlp/fmlp.hpp"
#include "fmlp/fpca.hpp"
#include "fmlp/preprocess.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: " << argv[0] << " <data_root> [subset]\n";
    return 2;
  }
  using namespace fmlp;
  const auto id = data::parse_subset_id(argc > 2 ? argv[2] : "FD001");
  const auto subset = data::load_subset(argv[1], id);

  preprocess::ConditionConfig cond;
  const auto pre = preprocess::fit_preprocessor(subset.train, cond);
  const auto retained = pre.scaler.retained();

  std::vector<preprocess::FunctionalInstance> windows;
  for (const auto& engine : subset.train) {
    for (auto& w : preprocess::slide_windows(pre.transform(engine), retained, subset.window_length)) {
      windows.push_back(std::move(w));
    }
  }
  const auto basis = fpca::fit_basis(windows, retained);
  std::cout << windows.size() << " windows, " << retained.size() << " sensors, "
            << basis.num_scores() << " eigen-scores\n";

  const auto result = model::train(windows, basis, model::TrainConfig{});
  std::vector<double> errors;
  for (std::size_t i = 0; i < subset.test.size(); ++i) {
    const auto last = preprocess::last_window(pre.transform(subset.test[i]), retained,
                                              subset.window_length);
    const double truth = std::min(preprocess::kDefaultRulCap, double(subset.test_rul[i]));
    errors.push_back(model::predict(result.model, last) - truth);
  }
  std::cout << "RMSE " << eval::rmse(errors) << "  score " << eval::score(errors) << '\n';
  return 0;
}
