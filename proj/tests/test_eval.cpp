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

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "fmlp/errors.hpp"
#include "fmlp/eval.hpp"
#include "fmlp/numerics.hpp"
#include "properties.hpp"

namespace {

using namespace fmlp::eval;
using fmlp::data::SubsetId;

const double kE = std::exp(1.0);

TEST(Rmse, Examples) {
  EXPECT_EQ(rmse(std::vector<double>{0, 0, 0}), 0.0);
  EXPECT_NEAR(rmse(std::vector<double>{3, -4}), std::sqrt(12.5), 1e-12);
  EXPECT_NEAR(rmse(std::vector<double>{-4, 3}), rmse(std::vector<double>{3, -4}), 1e-15);
  EXPECT_THROW(rmse(std::vector<double>{}), fmlp::ArgumentError);
}

TEST(Rmse, Homogeneous) {
  fmlp::numerics::SeededRng rng(1);
  std::vector<double> h(50);
  for (double& v : h) v = rng.normal() * 20.0;
  for (double c : {-3.0, 0.5, 7.0}) {
    std::vector<double> s = h;
    for (double& v : s) v *= c;
    EXPECT_NEAR(rmse(s), std::abs(c) * rmse(h), 1e-12 * rmse(s));
  }
}

TEST(Score, Examples) {
  EXPECT_EQ(score(std::vector<double>{0}), 0.0);
  EXPECT_NEAR(score(std::vector<double>{10}), kE - 1.0, 1e-12);
  EXPECT_NEAR(score(std::vector<double>{-13}), kE - 1.0, 1e-12);
  EXPECT_NEAR(score(std::vector<double>{13}), std::exp(1.3) - 1.0, 1e-12);
  EXPECT_GT(score(std::vector<double>{13}), score(std::vector<double>{-13}));
  EXPECT_NEAR(score(std::vector<double>{10, -13}), 2.0 * (kE - 1.0), 1e-12);
}

TEST(Score, AsymmetryAndMonotonicity) {
  const auto res = fmlp::testing::check_score_asymmetry();
  EXPECT_TRUE(res.ok) << res.detail;
}

TEST(Improvement, Examples) {
  EXPECT_NEAR(improvement(13.36, 16.14) * 100.0, 17.22, 0.01);
  EXPECT_NEAR(improvement(16.62, 24.49) * 100.0, 32.14, 0.01);
  EXPECT_EQ(improvement(5.0, 5.0), 0.0);
  EXPECT_THROW(improvement(1.0, 0.0), fmlp::ArgumentError);
}

TEST(Baselines, PublishedConstants) {
  const auto lstm = find_baseline("LSTM", SubsetId::kFD001);
  ASSERT_TRUE(lstm.has_value());
  EXPECT_EQ(lstm->rmse, 16.14);
  const auto cnn = find_baseline("CNN", SubsetId::kFD004);
  ASSERT_TRUE(cnn.has_value());
  ASSERT_TRUE(cnn->score.has_value());
  EXPECT_EQ(*cnn->score, 7.9e3);
  EXPECT_EQ(find_baseline("LSTM", SubsetId::kFD002)->rmse, 24.49);
  EXPECT_EQ(find_baseline("CNN", SubsetId::kFD001)->rmse, 18.45);
  EXPECT_EQ(*find_baseline("CNN", SubsetId::kFD001)->score, 1.3e3);
  EXPECT_FALSE(find_baseline("DW-RNN", SubsetId::kFD003)->score.has_value());
  for (const char* name : {"MLP", "SVR", "RVR", "CNN", "DW-RNN", "MTL-RNN", "LSTMBS", "LSTM"}) {
    for (auto id : {SubsetId::kFD001, SubsetId::kFD002, SubsetId::kFD003, SubsetId::kFD004}) {
      EXPECT_TRUE(find_baseline(name, id).has_value()) << name;
    }
  }
  EXPECT_EQ(baselines_for(SubsetId::kFD003).size(), 9u);
}

TEST(BuildReport, MetricsAndCap) {
  const std::vector<std::int64_t> ids = {1, 2, 3};
  const std::vector<double> est = {100, 50, 10};
  const std::vector<double> truth = {150, 40, 13};
  const auto lstm = baselines_for(SubsetId::kFD001);
  const auto rep = build_report(SubsetId::kFD001, ids, est, truth, lstm, 130.0);
  ASSERT_EQ(rep.engines.size(), 3u);
  EXPECT_EQ(rep.engines[0].true_rul, 130.0);
  EXPECT_EQ(rep.engines[0].error, -30.0);
  EXPECT_EQ(rep.engines[1].error, 10.0);
  const std::vector<double> h = {-30, 10, -3};
  EXPECT_DOUBLE_EQ(rep.rmse, rmse(h));
  EXPECT_DOUBLE_EQ(rep.score, score(h));
  EXPECT_GE(rep.rmse, 0.0);
  EXPECT_GE(rep.score, 0.0);
  ASSERT_EQ(rep.improvements.size(), lstm.size());

  const auto uncapped = build_report(SubsetId::kFD001, ids, est, truth, {}, std::nullopt);
  EXPECT_EQ(uncapped.engines[0].true_rul, 150.0);
  EXPECT_THROW(build_report(SubsetId::kFD001, ids, std::vector<double>{1}, truth, {}, std::nullopt),
               fmlp::ArgumentError);
}

TEST(BuildReport, EmptyBaselinesOmitImprovement) {
  const std::vector<std::int64_t> ids = {1};
  const auto rep = build_report(SubsetId::kFD002, ids, std::vector<double>{5}, std::vector<double>{7}, {},
                                130.0);
  const auto j = report_to_json(rep);
  EXPECT_FALSE(j.contains("improvement"));
  EXPECT_TRUE(j["true_rul_capped"].get<bool>());
  const auto table = format_table(rep);
  EXPECT_EQ(table.find("LSTM"), std::string::npos);
}

TEST(BuildReport, JsonAndCsvLayout) {
  const std::vector<std::int64_t> ids = {4, 9};
  const auto rep = build_report(SubsetId::kFD001, ids, std::vector<double>{12.5, 30},
                                std::vector<double>{10, 31}, baselines_for(SubsetId::kFD001), 130.0);
  const auto j = report_to_json(rep);
  ASSERT_TRUE(j.contains("improvement"));
  bool found = false;
  for (const auto& row : j["improvement"]) {
    if (row["model"] == "LSTM") {
      found = true;
      EXPECT_EQ(row["baseline_rmse"].get<double>(), 16.14);
      EXPECT_NEAR(row["rmse_improvement_pct"].get<double>(), (1.0 - rep.rmse / 16.14) * 100.0, 1e-12);
    }
  }
  EXPECT_TRUE(found);
  std::ostringstream csv;
  write_report_csv(csv, rep);
  EXPECT_EQ(csv.str(), "unit_id,true,est,h\n4,10,12.5,2.5\n9,31,30,-1\n");
  EXPECT_NE(format_table(rep).find("LSTM"), std::string::npos);
}

}  // namespace
