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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fmlp/errors.hpp"
#include "fmlp/fpca.hpp"
#include "fmlp/numerics.hpp"
#include "oracles.hpp"
#include "properties.hpp"

namespace {

using namespace fmlp::fpca;
using fmlp::numerics::Matrix;
using fmlp::numerics::SeededRng;
using fmlp::preprocess::FunctionalInstance;

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
  Matrix m(r.size(), r.begin()->size());
  std::size_t i = 0;
  for (const auto& row : r) {
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

TEST(SampleMean, Examples) {
  EXPECT_EQ(sample_mean(rows({{0, 2}, {2, 0}})), (std::vector<double>{1, 1}));
  EXPECT_EQ(sample_mean(rows({{3, -1, 4}})), (std::vector<double>{3, -1, 4}));
  SeededRng rng(2024);
  Matrix x(1000, 8);
  for (double& v : x.data()) v = rng.normal();
  for (double v : sample_mean(x)) EXPECT_NEAR(v, 0.0, 0.15);
}

TEST(SampleCovariance, Examples) {
  const auto g = sample_covariance(rows({{1, 1}, {-1, -1}}));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(g(i, j), 1.0);
  const auto z = sample_covariance(rows({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}}));
  EXPECT_EQ(z.values().max_abs(), 0.0);
  EXPECT_THROW(sample_covariance(rows({{1, 2}})), fmlp::ArgumentError);
}

TEST(SampleCovariance, SymmetricPositiveSemidefinite) {
  SeededRng rng(8);
  Matrix x(30, 12);
  for (double& v : x.data()) v = rng.uniform(-3, 3);
  const auto g = sample_covariance(x);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j) EXPECT_NEAR(g(i, j), g(j, i), 1e-10);
  for (double l : fmlp::numerics::eigh(g).eigenvalues) EXPECT_GT(l, -1e-10);
}

TEST(SelectNumComponents, Examples) {
  EXPECT_EQ(select_num_components(std::vector<double>{8, 1.5, 0.5}), 1);
  EXPECT_EQ(select_num_components(std::vector<double>{5, 4, 1}), 2);
  EXPECT_EQ(select_num_components(std::vector<double>{1, 1, 1, 1, 1}), 2);
  EXPECT_EQ(select_num_components(std::vector<double>{1, 1, 1, 1, 1}, 0.8, 10), 4);
  EXPECT_THROW(select_num_components(std::vector<double>{0, 0, 0}), fmlp::NumericError);
}

TEST(SelectNumComponents, ScaleInvariant) {
  SeededRng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> l(6);
    for (double& v : l) v = rng.uniform(0.01, 5.0);
    std::sort(l.rbegin(), l.rend());
    const int base = select_num_components(l, 0.8, 6);
    for (double c : {1e-6, 0.37, 3.0, 1e5}) {
      std::vector<double> s = l;
      for (double& v : s) v *= c;
      EXPECT_EQ(select_num_components(s, 0.8, 6), base);
    }
  }
}

TEST(FitBasis, KarhunenLoeveOracle) {
  const auto kl = fmlp::testing::karhunen_loeve_sample(500, 50, 4.0, 1.0, 31);
  const auto basis = fit_basis(kl.instances);
  ASSERT_EQ(basis.sensors.size(), 1u);
  const auto& s = basis.sensors[0];
  ASSERT_EQ(s.num_components, 2);
  EXPECT_LT(fmlp::testing::max_deviation_up_to_sign(s.eigenfunctions[0], kl.phi1), 0.1);
  EXPECT_LT(fmlp::testing::max_deviation_up_to_sign(s.eigenfunctions[1], kl.phi2), 0.1);
  const double ratio = s.eigenvalues[0] / s.eigenvalues[1];
  EXPECT_NEAR(ratio, 4.0, 1.0);
  const auto ortho = fmlp::testing::check_orthonormality(basis);
  EXPECT_TRUE(ortho.ok) << ortho.detail;
}

TEST(FitBasis, RankOneConstantShift) {
  SeededRng rng(6);
  const std::size_t m = 20;
  std::vector<FunctionalInstance> xs(40);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i].grid.resize(m);
    xs[i].curves = Matrix(1, m);
    const double shift = rng.uniform(-2, 2);
    for (std::size_t j = 0; j < m; ++j) {
      xs[i].grid[j] = static_cast<double>(j + 1);
      xs[i].curves(0, j) = std::sin(0.3 * static_cast<double>(j)) + shift;
    }
  }
  const auto basis = fit_basis(xs);
  const auto& s = basis.sensors[0];
  EXPECT_EQ(s.num_components, 1);
  const std::vector<double> ones(m, 1.0);
  EXPECT_LT(fmlp::testing::max_deviation_up_to_sign(s.eigenfunctions[0], ones), 1e-8);
}

TEST(FitBasis, RankBound) {
  std::vector<FunctionalInstance> xs(2);
  const double vals[2][3] = {{1, 4, 2}, {0, -1, 5}};
  for (std::size_t i = 0; i < 2; ++i) {
    xs[i].grid = {1, 2, 3};
    xs[i].curves = Matrix(1, 3);
    for (std::size_t j = 0; j < 3; ++j) xs[i].curves(0, j) = vals[i][j];
  }
  const auto basis = fit_basis(xs);
  int nonzero = 0;
  for (double l : basis.sensors[0].eigenvalues) nonzero += l > 1e-10 ? 1 : 0;
  EXPECT_LE(nonzero, 2);
  EXPECT_THROW(fit_basis(std::span(xs).first(1)), fmlp::ArgumentError);
}

TEST(FitBasis, InvariantsOnRandomCurves) {
  SeededRng rng(12);
  const auto xs = fmlp::testing::random_instances(60, 5, 15, rng);
  const std::vector<std::size_t> ids = {1, 2, 3, 6, 7};
  const auto basis = fit_basis(xs, ids);
  for (std::size_t r = 0; r < ids.size(); ++r) EXPECT_EQ(basis.sensors[r].sensor, ids[r]);
  const auto ortho = fmlp::testing::check_orthonormality(basis);
  EXPECT_TRUE(ortho.ok) << ortho.detail;
  const auto fve = fmlp::testing::check_fve_cap(basis);
  EXPECT_TRUE(fve.ok) << fve.detail;
  EXPECT_EQ(project(basis, xs[0]).size(), basis.num_scores());
}

TEST(FitBasis, ProjectionResidualMatchesTailEigenvalues) {
  SeededRng rng(21);
  const std::size_t n = 25, m = 9;
  std::vector<FunctionalInstance> xs(n);
  Matrix raw(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i].grid.resize(m);
    xs[i].curves = Matrix(1, m);
    for (std::size_t j = 0; j < m; ++j) {
      xs[i].grid[j] = static_cast<double>(j + 1);
      raw(i, j) = xs[i].curves(0, j) = rng.normal() + 0.2 * static_cast<double>(j);
    }
  }
  const auto basis = fit_basis(xs, {}, 0.8, 2);
  const auto& s = basis.sensors[0];
  const auto p = static_cast<std::size_t>(s.num_components);

  // Residual through the fitted basis: centered scores times phi_hat.
  double resid = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> c(m);
    for (std::size_t j = 0; j < m; ++j) c[j] = raw(i, j) - s.mean[j];
    std::vector<double> r = c;
    for (std::size_t q = 0; q < p; ++q) {
      const double score = fmlp::numerics::discrete_integral(s.eigenfunctions[q], c);
      for (std::size_t j = 0; j < m; ++j) r[j] -= score * s.eigenfunctions[q][j];
    }
    for (double v : r) resid += v * v;
  }
  resid /= static_cast<double>(n * m);
  double tail = 0.0;
  for (std::size_t q = p; q < m; ++q) tail += s.eigenvalues[q];
  tail /= static_cast<double>(m);
  EXPECT_NEAR(resid, tail, 1e-6 * tail);
  const double brute = fmlp::testing::brute_force_projection_residual(raw, p);
  EXPECT_NEAR(resid, brute, 1e-6 * brute);
}

TEST(Project, ShapeChecks) {
  SeededRng rng(3);
  const auto xs = fmlp::testing::random_instances(10, 2, 6, rng);
  const auto basis = fit_basis(xs);
  const auto other = fmlp::testing::random_instances(1, 2, 7, rng);
  EXPECT_THROW(project(basis, other[0]), fmlp::ArgumentError);
  const auto fewer = fmlp::testing::random_instances(1, 1, 6, rng);
  EXPECT_THROW(project(basis, fewer[0]), fmlp::ArgumentError);
}

}  // namespace
