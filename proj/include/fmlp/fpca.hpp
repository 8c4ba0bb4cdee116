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

// Functional principal components on a shared regular grid.
//
// For each sensor the N x M matrix of window curves gives a 1/N sample
// covariance G. Its unit eigenvectors v_p are rescaled to sqrt(M) * v_p so
// that they are orthonormal under discrete_integral, and the eigenvalues of G
// are kept as they are. The number of components is the smallest count whose
// cumulative eigenvalue share reaches the FVE cutoff, capped.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "fmlp/errors.hpp"
#include "fmlp/numerics.hpp"
#include "fmlp/preprocess.hpp"

namespace fmlp::fpca {

using numerics::Matrix;
using numerics::SymmetricMatrix;

inline constexpr double kDefaultFveCutoff = 0.80;
inline constexpr int kDefaultComponentCap = 2;
inline constexpr double kNegativeEigenvalueTolerance = 1e-10;

/// Basis of one retained sensor.
struct SensorBasis {
  std::size_t sensor = 0;              // 0-based sensor column
  std::vector<double> mean;            // length M
  std::vector<double> eigenvalues;     // all M, non-increasing, >= 0
  std::vector<std::vector<double>> eigenfunctions;  // num_components curves of length M
  int num_components = 0;

  friend bool operator==(const SensorBasis&, const SensorBasis&) = default;
};

struct EigenBasis {
  std::vector<double> grid;
  std::vector<SensorBasis> sensors;  // in retained-sensor order
  double fve_cutoff = kDefaultFveCutoff;
  int component_cap = kDefaultComponentCap;

  std::size_t grid_size() const noexcept { return grid.size(); }

  /// Total number of projection scores per instance, sum of P_r.
  std::size_t num_scores() const noexcept {
    std::size_t n = 0;
    for (const auto& s : sensors) n += static_cast<std::size_t>(s.num_components);
    return n;
  }

  friend bool operator==(const EigenBasis&, const EigenBasis&) = default;
};

inline std::vector<double> sample_mean(const Matrix& x) {
  if (x.rows() == 0) throw ArgumentError("sample_mean: need at least one row");
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) mean[j] += row[j];
  }
  for (double& v : mean) v /= static_cast<double>(x.rows());
  return mean;
}

/// 1/N-normalized sample covariance of the columns of x.
inline SymmetricMatrix sample_covariance(const Matrix& x) {
  if (x.rows() < 2) throw ArgumentError("sample_covariance: need at least two rows");
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();
  const auto mean = sample_mean(x);
  Matrix g(m, m, 0.0);
  std::vector<double> centered(m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x.row(i);
    for (std::size_t j = 0; j < m; ++j) centered[j] = row[j] - mean[j];
    for (std::size_t s = 0; s < m; ++s) {
      const double cs = centered[s];
      for (std::size_t t = s; t < m; ++t) g(s, t) += cs * centered[t];
    }
  }
  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t t = s; t < m; ++t) {
      g(s, t) /= static_cast<double>(n);
      g(t, s) = g(s, t);
    }
  }
  return SymmetricMatrix(std::move(g));
}

/// Smallest p whose cumulative eigenvalue share reaches `fve_cutoff`, then
/// min(p, cap). Never below 1.
inline int select_num_components(std::span<const double> eigenvalues,
                                 double fve_cutoff = kDefaultFveCutoff,
                                 int cap = kDefaultComponentCap) {
  if (eigenvalues.empty()) throw ArgumentError("select_num_components: no eigenvalues");
  if (cap < 1) throw ArgumentError("select_num_components: cap must be at least 1");
  double total = 0.0;
  for (double v : eigenvalues) total += v;
  if (!(total > 0.0)) {
    throw NumericError("select_num_components: degenerate sensor (all eigenvalues zero)");
  }
  double cumulative = 0.0;
  int p_fve = static_cast<int>(eigenvalues.size());
  for (std::size_t p = 0; p < eigenvalues.size(); ++p) {
    cumulative += eigenvalues[p];
    // The share is compared as cumulative >= cutoff * total so that exact
    // ties such as 8 / (8 + 1.5 + 0.5) = 0.8 are not lost to a division.
    if (cumulative >= fve_cutoff * total) {
      p_fve = static_cast<int>(p) + 1;
      break;
    }
  }
  return std::max(1, std::min(p_fve, cap));
}

/// Basis of a single sensor from its N x M observation matrix.
inline SensorBasis fit_sensor_basis(const Matrix& x, std::size_t sensor, double fve_cutoff,
                                    int cap) {
  const std::size_t m = x.cols();
  SensorBasis out;
  out.sensor = sensor;
  out.mean = sample_mean(x);
  const auto eig = numerics::eigh(sample_covariance(x));

  out.eigenvalues = eig.eigenvalues;
  for (double& v : out.eigenvalues) {
    if (v < -kNegativeEigenvalueTolerance) {
      throw NumericError("fit_basis: covariance of sensor " + std::to_string(sensor + 1) +
                         " has a negative eigenvalue " + std::to_string(v));
    }
    v = std::max(v, 0.0);
  }
  out.num_components = select_num_components(out.eigenvalues, fve_cutoff, cap);

  const double root_m = std::sqrt(static_cast<double>(m));
  out.eigenfunctions.resize(static_cast<std::size_t>(out.num_components));
  for (std::size_t p = 0; p < out.eigenfunctions.size(); ++p) {
    auto& phi = out.eigenfunctions[p];
    phi.resize(m);
    for (std::size_t j = 0; j < m; ++j) phi[j] = root_m * eig.eigenvectors(j, p);
  }
  return out;
}

/// Per-sensor FPCA over a set of instances sharing one grid. The sensor
/// column ids are recorded from `sensor_ids` (defaults to 0..R-1).
inline EigenBasis fit_basis(std::span<const preprocess::FunctionalInstance> instances,
                            std::span<const std::size_t> sensor_ids = {},
                            double fve_cutoff = kDefaultFveCutoff,
                            int cap = kDefaultComponentCap) {
  if (instances.size() < 2) throw ArgumentError("fit_basis: need at least two instances");
  const std::size_t r_count = instances.front().num_sensors();
  const std::size_t m = instances.front().grid_size();
  if (m == 0 || r_count == 0) throw ArgumentError("fit_basis: empty instance");
  if (!sensor_ids.empty() && sensor_ids.size() != r_count) {
    throw ArgumentError("fit_basis: sensor id count does not match instance sensor count");
  }
  for (const auto& inst : instances) {
    if (inst.num_sensors() != r_count || inst.grid_size() != m) {
      throw ArgumentError("fit_basis: instances must share the sensor set and grid");
    }
  }

  EigenBasis basis;
  basis.grid = instances.front().grid;
  basis.fve_cutoff = fve_cutoff;
  basis.component_cap = cap;
  basis.sensors.reserve(r_count);
  Matrix x(instances.size(), m);
  for (std::size_t r = 0; r < r_count; ++r) {
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const auto src = instances[i].curves.row(r);
      std::copy(src.begin(), src.end(), x.row(i).begin());
    }
    basis.sensors.push_back(
        fit_sensor_basis(x, sensor_ids.empty() ? r : sensor_ids[r], fve_cutoff, cap));
  }
  return basis;
}

/// Projection scores <phi_{r,p}, X_r> for every retained sensor, concatenated
/// in sensor-major order; length basis.num_scores().
inline std::vector<double> project(const EigenBasis& basis,
                                   const preprocess::FunctionalInstance& inst) {
  if (inst.grid_size() != basis.grid_size()) {
    throw ArgumentError("project: instance grid length " + std::to_string(inst.grid_size()) +
                        " does not match basis grid length " +
                        std::to_string(basis.grid_size()));
  }
  if (inst.num_sensors() != basis.sensors.size()) {
    throw ArgumentError("project: instance sensor count does not match basis");
  }
  std::vector<double> scores;
  scores.reserve(basis.num_scores());
  for (std::size_t r = 0; r < basis.sensors.size(); ++r) {
    for (const auto& phi : basis.sensors[r].eigenfunctions) {
      scores.push_back(numerics::discrete_integral(phi, inst.curves.row(r)));
    }
  }
  return scores;
}

}  // namespace fmlp::fpca
