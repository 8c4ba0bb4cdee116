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

// Invariant checks shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "fmlp/artifact.hpp"
#include "fmlp/eval.hpp"
#include "fmlp/fmlp.hpp"
#include "fmlp/fpca.hpp"
#include "fmlp/numerics.hpp"
#include "fmlp/preprocess.hpp"

namespace fmlp::testing {

struct PropertyResult {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

/// Eigenfunctions of every sensor are orthonormal under the discrete integral.
inline PropertyResult check_orthonormality(const fpca::EigenBasis& basis, double tol = 1e-8) {
  PropertyResult res;
  double worst = 0.0;
  for (const auto& s : basis.sensors) {
    for (std::size_t p = 0; p < s.eigenfunctions.size(); ++p) {
      for (std::size_t q = 0; q < s.eigenfunctions.size(); ++q) {
        const double ip = numerics::discrete_integral(s.eigenfunctions[p], s.eigenfunctions[q]);
        worst = std::max(worst, std::abs(ip - (p == q ? 1.0 : 0.0)));
      }
    }
  }
  std::ostringstream os;
  os << "max |<phi_p,phi_q> - delta| = " << worst;
  res.detail = os.str();
  if (!(worst < tol)) res.fail(os.str());
  return res;
}

/// Component counts sit in [1, cap], are the smallest FVE-reaching count
/// (or the cap), and eigenvalues are non-negative and non-increasing.
inline PropertyResult check_fve_cap(const fpca::EigenBasis& basis) {
  PropertyResult res;
  for (const auto& s : basis.sensors) {
    const int p = s.num_components;
    if (p < 1 || p > basis.component_cap) {
      res.fail("sensor " + std::to_string(s.sensor + 1) + " keeps " + std::to_string(p));
      continue;
    }
    double total = 0.0;
    for (double v : s.eigenvalues) total += v;
    double cum = 0.0;
    int p_fve = static_cast<int>(s.eigenvalues.size());
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
      cum += s.eigenvalues[i];
      if (cum >= basis.fve_cutoff * total) {
        p_fve = static_cast<int>(i) + 1;
        break;
      }
    }
    if (p != std::min(p_fve, basis.component_cap))
      res.fail("sensor " + std::to_string(s.sensor + 1) + " count disagrees with FVE rule");
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
      if (s.eigenvalues[i] < 0.0) res.fail("negative eigenvalue");
      if (i > 0 && s.eigenvalues[i] > s.eigenvalues[i - 1]) res.fail("eigenvalues increase");
    }
  }
  if (res.ok) res.detail = std::to_string(basis.sensors.size()) + " sensors within cap";
  return res;
}

/// Training labels along one engine: non-increasing in start cycle, steps of
/// at most one cycle, bounded by [0, cap], ending at zero.
inline PropertyResult check_label_monotonicity(const std::vector<preprocess::FunctionalInstance>& w,
                                               double cap) {
  PropertyResult res;
  if (w.empty()) {
    res.fail("no windows");
    return res;
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double y = *w[i].label;
    if (y < 0.0 || y > cap) res.fail("label outside [0, cap]");
    if (i > 0) {
      const double prev = *w[i - 1].label;
      if (y > prev) res.fail("label increases");
      if (prev - y > 1.0) res.fail("label drops by more than one");
    }
  }
  if (*w.back().label != 0.0) res.fail("last label is not zero");
  if (res.ok) res.detail = std::to_string(w.size()) + " windows monotone";
  return res;
}

/// Direct quadrature route and the score route give the same neuron outputs.
inline PropertyResult check_forward_equivalence(const model::FmlpModel& m,
                                                std::span<const preprocess::FunctionalInstance> xs,
                                                double tol = 1e-12) {
  PropertyResult res;
  double worst = 0.0;
  for (const auto& x : xs) {
    const auto direct = model::functional_layer_forward(m, x);
    const auto via = model::functional_layer_from_scores(m, fpca::project(m.basis, x));
    for (std::size_t k = 0; k < direct.size(); ++k) worst = std::max(worst, std::abs(direct[k] - via[k]));
  }
  std::ostringstream os;
  os << "max |z_direct - z_scores| = " << worst;
  res.detail = os.str();
  if (!(worst <= tol)) res.fail(os.str());
  return res;
}

/// Full-batch training with step halving never raises the training loss.
inline PropertyResult check_descent_monotonicity(std::span<const model::EpochRecord> trace) {
  PropertyResult res;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].train_mse > trace[i - 1].train_mse) {
      res.fail("loss rose at epoch " + std::to_string(trace[i].epoch));
    }
  }
  if (trace.size() < 2) res.fail("trace too short");
  if (res.ok) {
    std::ostringstream os;
    os << trace.front().train_mse << " -> " << trace.back().train_mse << " over " << trace.size()
       << " epochs";
    res.detail = os.str();
  }
  return res;
}

/// Late predictions cost more than early ones of the same size, and the
/// score grows with |h| on both sides.
inline PropertyResult check_score_asymmetry() {
  PropertyResult res;
  double prev_late = 0.0, prev_early = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double h = 0.5 * i;
    const double late = eval::score(std::vector<double>{h});
    const double early = eval::score(std::vector<double>{-h});
    if (!(late > early)) res.fail("score(+h) <= score(-h) at h=" + std::to_string(h));
    if (!(late > prev_late) || !(early > prev_early)) res.fail("score not monotone in |h|");
    prev_late = late;
    prev_early = early;
  }
  if (eval::score(std::vector<double>{0.0}) != 0.0) res.fail("score(0) != 0");
  if (res.ok) res.detail = "h in (0, 50]";
  return res;
}

/// save -> load -> save is a fixed point and predictions are bit-identical.
inline PropertyResult check_round_trip(const artifact::ModelArtifact& a,
                                       std::span<const preprocess::FunctionalInstance> xs) {
  PropertyResult res;
  std::ostringstream first;
  artifact::save_model(a, first);
  std::istringstream in(first.str());
  const auto back = artifact::load_model(in);
  std::ostringstream second;
  artifact::save_model(back, second);
  if (first.str() != second.str()) res.fail("re-serialized text differs");
  if (!(back.preprocessor == a.preprocessor)) res.fail("preprocessor differs");
  for (const auto& x : xs) {
    if (model::predict(back.model, x) != model::predict(a.model, x)) res.fail("prediction differs");
  }
  if (res.ok) res.detail = std::to_string(first.str().size()) + " bytes, predictions bitwise equal";
  return res;
}

}  // namespace fmlp::testing
