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

// Small synthetic subsets and fast configs for end-to-end tests.

#include <cstdint>

#include "fmlp/data_ingest.hpp"
#include "fmlp/experiment.hpp"
#include "synthetic_cmapss.hpp"

namespace fmlp::testing {

inline data::DataSubset synthetic_subset(data::SubsetId id, std::uint64_t seed, bool multi_condition,
                                         int train_engines = 30, int test_engines = 20) {
  SyntheticFleetConfig cfg;
  cfg.train_engines = train_engines;
  cfg.test_engines = test_engines;
  cfg.multi_condition = multi_condition;
  cfg.seed = seed;
  const auto fleet = make_synthetic_fleet(cfg);
  data::DataSubset s;
  s.subset_id = id;
  s.window_length = data::window_length(id);
  s.train = fleet.train;
  s.test = fleet.test;
  s.test_rul = fleet.test_rul;
  return s;
}

/// Short training budget so a full fit takes well under a second.
inline experiment::ExperimentConfig quick_config(std::uint64_t seed = 7) {
  experiment::ExperimentConfig cfg;
  cfg.seed = seed;
  cfg.train.epochs = 15;
  cfg.condition.epochs = 40;
  return cfg;
}

}  // namespace fmlp::testing
