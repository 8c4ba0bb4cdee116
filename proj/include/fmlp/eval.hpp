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

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fmlp/data_ingest.hpp"
#include "fmlp/errors.hpp"
#include "json.hpp"

namespace fmlp::eval {

inline double rmse(std::span<const double> errors) {
  if (errors.empty()) throw ArgumentError("rmse: no errors");
  double s = 0.0;
  for (double h : errors) s += h * h;
  return std::sqrt(s / static_cast<double>(errors.size()));
}

/// Asymmetric exponential penalty: late predictions (h >= 0) use 10 as the
/// denominator, early ones 13.
inline double score(std::span<const double> errors) {
  if (errors.empty()) throw ArgumentError("score: no errors");
  double s = 0.0;
  for (double h : errors) s += h < 0.0 ? std::exp(-h / 13.0) - 1.0 : std::exp(h / 10.0) - 1.0;
  return s;
}

/// 1 - ours / baseline, as a fraction.
inline double improvement(double metric, double baseline_metric) {
  if (!(baseline_metric > 0.0)) throw ArgumentError("improvement: baseline must be positive");
  return 1.0 - metric / baseline_metric;
}

/// Published comparison numbers for one model on one subset.
struct Baseline {
  std::string model;
  data::SubsetId subset;
  double rmse;
  std::optional<double> score;
  std::string citation;
};

inline constexpr const char* kBaselineTableVersion = "cmapss-baselines/1";

/// RMSE and score columns of the published C-MAPSS comparison, including the
/// functional MLP's own reported values under the name "FMLP (published)".
inline const std::vector<Baseline>& published_baselines() {
  using data::SubsetId;
  static const std::vector<Baseline> table = [] {
    struct Row {
      const char* model;
      const char* citation;
      double rmse[4];
      std::optional<double> score[4];
    };
    const Row rows[] = {
        {"MLP", "Babu et al., DASFAA 2016", {37.56, 80.03, 37.39, 77.37}, {1.8e4, 7.8e6, 1.7e4, 5.6e6}},
        {"SVR", "Babu et al., DASFAA 2016", {20.96, 42.00, 21.05, 45.35}, {1.4e3, 5.9e5, 1.6e3, 3.7e5}},
        {"RVR", "Babu et al., DASFAA 2016", {23.80, 31.30, 22.37, 34.34}, {1.5e3, 1.7e4, 1.4e3, 2.7e4}},
        {"CNN", "Babu et al., DASFAA 2016", {18.45, 30.29, 19.82, 29.16}, {1.3e3, 1.4e4, 1.6e3, 7.9e3}},
        {"DW-RNN", "Aggarwal et al., 2018", {22.52, 25.90, 18.75, 24.44}, {}},
        {"MTL-RNN", "Aggarwal et al., 2018", {21.47, 25.78, 17.98, 22.82}, {}},
        {"LSTMBS", "Liao et al., 2018", {14.89, 26.86, 15.11, 27.11}, {4.8e2, 8.0e3, 4.9e2, 5.2e3}},
        {"LSTM", "Zheng et al., ICPHM 2017", {16.14, 24.49, 16.18, 28.17}, {3.4e2, 4.5e3, 8.5e2, 5.6e3}},
        {"FMLP (published)", "reported functional MLP result", {13.36, 16.62, 12.74, 17.76}, {2.0e2, 9.0e2, 1.8e2, 1.0e3}},
    };
    const SubsetId ids[] = {SubsetId::kFD001, SubsetId::kFD002, SubsetId::kFD003, SubsetId::kFD004};
    std::vector<Baseline> out;
    for (const auto& r : rows) {
      for (int d = 0; d < 4; ++d) out.push_back({r.model, ids[d], r.rmse[d], r.score[d], r.citation});
    }
    return out;
  }();
  return table;
}

inline std::vector<Baseline> baselines_for(data::SubsetId subset) {
  std::vector<Baseline> out;
  for (const auto& b : published_baselines()) {
    if (b.subset == subset) out.push_back(b);
  }
  return out;
}

inline std::optional<Baseline> find_baseline(const std::string& model, data::SubsetId subset) {
  for (const auto& b : published_baselines()) {
    if (b.model == model && b.subset == subset) return b;
  }
  return std::nullopt;
}

struct EngineRecord {
  std::int64_t unit_id = 0;
  double true_rul = 0.0;
  double est_rul = 0.0;
  double error = 0.0;  // est - true
};

struct ImprovementEntry {
  Baseline baseline;
  double rmse_improvement = 0.0;
  std::optional<double> score_improvement;
};

struct EvalReport {
  data::SubsetId subset = data::SubsetId::kFD001;
  std::vector<EngineRecord> engines;
  double rmse = 0.0;
  double score = 0.0;
  /// Cap applied to the true test RULs before computing errors, if any.
  std::optional<double> true_rul_cap;
  std::vector<ImprovementEntry> improvements;
};

/// Pairs predictions with truths (optionally capped) and computes metrics
/// and improvement over each baseline given.
inline EvalReport build_report(data::SubsetId subset, std::span<const std::int64_t> unit_ids,
                               std::span<const double> predictions,
                               std::span<const double> truths, std::span<const Baseline> baselines,
                               std::optional<double> true_rul_cap) {
  if (predictions.size() != truths.size() || unit_ids.size() != truths.size()) {
    throw ArgumentError("build_report: predictions, truths and unit ids must align");
  }
  if (truths.empty()) throw ArgumentError("build_report: no engines");
  EvalReport rep;
  rep.subset = subset;
  rep.true_rul_cap = true_rul_cap;
  std::vector<double> errors;
  errors.reserve(truths.size());
  for (std::size_t i = 0; i < truths.size(); ++i) {
    EngineRecord r;
    r.unit_id = unit_ids[i];
    r.true_rul = true_rul_cap ? std::min(*true_rul_cap, truths[i]) : truths[i];
    r.est_rul = predictions[i];
    r.error = r.est_rul - r.true_rul;
    errors.push_back(r.error);
    rep.engines.push_back(r);
  }
  rep.rmse = rmse(errors);
  rep.score = score(errors);
  for (const auto& b : baselines) {
    ImprovementEntry e;
    e.baseline = b;
    e.rmse_improvement = improvement(rep.rmse, b.rmse);
    if (b.score) e.score_improvement = improvement(rep.score, *b.score);
    rep.improvements.push_back(e);
  }
  return rep;
}

inline void write_report_csv(std::ostream& out, const EvalReport& rep) {
  out << "unit_id,true,est,h\n";
  const auto p = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& e : rep.engines) {
    out << e.unit_id << ',' << e.true_rul << ',' << e.est_rul << ',' << e.error << '\n';
  }
  out.precision(p);
}

/// Human-readable comparison table: our row first, then each baseline.
inline std::string format_table(const EvalReport& rep) {
  std::ostringstream os;
  os << std::fixed;
  os << "subset " << data::to_string(rep.subset) << ", " << rep.engines.size() << " test engines";
  if (rep.true_rul_cap) os << ", true RUL capped at " << std::setprecision(0) << *rep.true_rul_cap;
  os << "\n";
  os << std::left << std::setw(18) << "model" << std::right << std::setw(10) << "RMSE"
     << std::setw(14) << "score" << std::setw(12) << "IMP(RMSE)" << std::setw(12) << "IMP(score)"
     << "\n";
  os << std::left << std::setw(18) << "this run" << std::right << std::setprecision(2)
     << std::setw(10) << rep.rmse << std::setw(14) << rep.score << "\n";
  for (const auto& e : rep.improvements) {
    os << std::left << std::setw(18) << e.baseline.model << std::right << std::setprecision(2)
       << std::setw(10) << e.baseline.rmse;
    if (e.baseline.score) {
      os << std::setw(14) << *e.baseline.score;
    } else {
      os << std::setw(14) << "-";
    }
    os << std::setw(11) << e.rmse_improvement * 100.0 << "%";
    if (e.score_improvement) {
      os << std::setw(11) << *e.score_improvement * 100.0 << "%";
    } else {
      os << std::setw(12) << "-";
    }
    os << "\n";
  }
  return os.str();
}

/// JSON summary: metrics, the cap flag, and the improvement table.
inline nlohmann::ordered_json report_to_json(const EvalReport& rep) {
  nlohmann::ordered_json j;
  j["subset"] = data::to_string(rep.subset);
  j["engines"] = rep.engines.size();
  j["rmse"] = rep.rmse;
  j["score"] = rep.score;
  j["true_rul_capped"] = rep.true_rul_cap.has_value();
  j["true_rul_cap"] = rep.true_rul_cap ? nlohmann::ordered_json(*rep.true_rul_cap) : nullptr;
  j["baseline_table"] = kBaselineTableVersion;
  auto imp = nlohmann::ordered_json::array();
  for (const auto& e : rep.improvements) {
    nlohmann::ordered_json row;
    row["model"] = e.baseline.model;
    row["citation"] = e.baseline.citation;
    row["baseline_rmse"] = e.baseline.rmse;
    row["rmse_improvement_pct"] = e.rmse_improvement * 100.0;
    if (e.baseline.score) {
      row["baseline_score"] = *e.baseline.score;
      row["score_improvement_pct"] = *e.score_improvement * 100.0;
    } else {
      row["baseline_score"] = nullptr;
      row["score_improvement_pct"] = nullptr;
    }
    imp.push_back(std::move(row));
  }
  if (!imp.empty()) j["improvement"] = std::move(imp);
  return j;
}

}  // namespace fmlp::eval
