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

#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "fmlp/artifact.hpp"
#include "fmlp/errors.hpp"
#include "fmlp/experiment.hpp"
#include "properties.hpp"

namespace {

using namespace fmlp::artifact;
using fmlp::data::SubsetId;

class ArtifactTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    subset_ = new fmlp::data::DataSubset(
        fmlp::testing::synthetic_subset(SubsetId::kFD002, 3, /*multi_condition=*/true));
    outcome_ = new fmlp::experiment::TrainOutcome(
        fmlp::experiment::fit_experiment(*subset_, fmlp::testing::quick_config()));
  }
  static void TearDownTestSuite() {
    delete outcome_;
    delete subset_;
  }

  static std::string text() {
    std::ostringstream os;
    save_model(outcome_->artifact, os);
    return os.str();
  }

  static std::vector<fmlp::preprocess::FunctionalInstance> test_windows() {
    const auto& a = outcome_->artifact;
    std::vector<fmlp::preprocess::FunctionalInstance> out;
    for (const auto& t : subset_->test) {
      out.push_back(fmlp::preprocess::last_window(a.preprocessor.transform(t), a.retained_sensors,
                                                  a.window_length));
    }
    return out;
  }

  static fmlp::data::DataSubset* subset_;
  static fmlp::experiment::TrainOutcome* outcome_;
};

fmlp::data::DataSubset* ArtifactTest::subset_ = nullptr;
fmlp::experiment::TrainOutcome* ArtifactTest::outcome_ = nullptr;

TEST_F(ArtifactTest, RoundTripIsBitwise) {
  std::istringstream in(text());
  const auto back = load_model(in);
  EXPECT_EQ(back, outcome_->artifact);
  const auto xs = test_windows();
  const auto res = fmlp::testing::check_round_trip(outcome_->artifact, xs);
  EXPECT_TRUE(res.ok) << res.detail;
}

TEST_F(ArtifactTest, LoadedModelPredictsWithoutRefit) {
  std::istringstream in(text());
  const auto back = load_model(in);
  const auto preds = fmlp::experiment::predict_trajectories(back, subset_->test);
  ASSERT_EQ(preds.size(), subset_->test.size());
  for (const auto& [unit, est] : preds) EXPECT_GE(est, 0.0);
}

TEST_F(ArtifactTest, DocumentLayout) {
  const auto j = to_json(outcome_->artifact);
  EXPECT_EQ(j["schema"], "fmlp-artifact/1");
  EXPECT_EQ(j["subset"], "FD002");
  EXPECT_EQ(j["window_length"], 21);
  for (const char* key : {"train_config", "architecture", "retained_sensors", "condition_model",
                          "scaler", "basis", "network", "seed"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  // Sensors are stored 1-based.
  EXPECT_EQ(j["retained_sensors"][0].get<std::size_t>(), outcome_->artifact.retained_sensors[0] + 1);
}

TEST_F(ArtifactTest, TruncatedFileIsLoadError) {
  const auto full = text();
  for (std::size_t cut : {std::size_t{0}, std::size_t{10}, full.size() / 2, full.size() - 3}) {
    std::istringstream in(full.substr(0, cut));
    EXPECT_THROW(load_model(in), fmlp::LoadError) << "cut at " << cut;
  }
}

TEST_F(ArtifactTest, SchemaViolationsAreLoadErrors) {
  auto j = to_json(outcome_->artifact);
  auto wrong_version = j;
  wrong_version["schema"] = "fmlp-artifact/2";
  EXPECT_THROW(from_json(wrong_version), fmlp::LoadError);

  auto missing = j;
  missing.erase("basis");
  EXPECT_THROW(from_json(missing), fmlp::LoadError);

  auto bad_sensor = j;
  bad_sensor["retained_sensors"][0] = 22;
  EXPECT_THROW(from_json(bad_sensor), fmlp::LoadError);

  auto bad_window = j;
  bad_window["window_length"] = 5;
  EXPECT_THROW(from_json(bad_window), fmlp::LoadError);

  auto wrong_type = j;
  wrong_type["t_cap"] = "one hundred thirty";
  EXPECT_THROW(from_json(wrong_type), fmlp::LoadError);
}

}  // namespace
