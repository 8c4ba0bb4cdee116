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

// Dense kernels shared by the FPCA and network code: a small row-major
// matrix, a cyclic Jacobi eigensolver for symmetric matrices, the mean-of-
// products integral approximator and a portable seeded RNG.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "fmlp/errors.hpp"

namespace fmlp::numerics {

/// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Square matrix symmetrized on construction as (A + A^T) / 2.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;

  explicit SymmetricMatrix(Matrix a) : values_(std::move(a)) {
    if (values_.rows() != values_.cols()) {
      throw ArgumentError("SymmetricMatrix: matrix must be square");
    }
    const std::size_t n = values_.rows();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double avg = 0.5 * (values_(i, j) + values_(j, i));
        values_(i, j) = avg;
        values_(j, i) = avg;
      }
    }
  }

  std::size_t order() const noexcept { return values_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  const Matrix& values() const noexcept { return values_; }

 private:
  Matrix values_;
};

struct EigenDecomposition {
  /// Sorted descending.
  std::vector<double> eigenvalues;
  /// Column p is the unit eigenvector of eigenvalues[p].
  Matrix eigenvectors;
  int sweeps = 0;
};

inline constexpr double kJacobiThreshold = 1e-12;
inline constexpr int kJacobiMaxSweeps = 100;

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

inline double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

// Sum of coordinates must be >= 0; when that sum vanishes the first
// nonzero coordinate is made positive.
inline void fix_sign(Matrix& v, std::size_t col) {
  const std::size_t n = v.rows();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += v(i, col);
  bool flip = false;
  if (std::abs(sum) > 1e-12) {
    flip = sum < 0.0;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(v(i, col)) > 1e-12) {
        flip = v(i, col) < 0.0;
        break;
      }
    }
  }
  if (flip) {
    for (std::size_t i = 0; i < n; ++i) v(i, col) = -v(i, col);
  }
}

}  // namespace detail

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Iterates until the off-diagonal Frobenius norm falls below
/// kJacobiThreshold relative to the Frobenius norm of the input, for at most
/// kJacobiMaxSweeps sweeps. Eigenvalues come back sorted descending and each
/// eigenvector carries a fixed sign, so equal inputs give bitwise-equal output.
inline EigenDecomposition eigh(const SymmetricMatrix& input) {
  const std::size_t n = input.order();
  for (double v : input.values().data()) {
    if (!std::isfinite(v)) throw ArgumentError("eigh: non-finite matrix entry");
  }

  Matrix a = input.values();
  Matrix v(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  const double scale = detail::frobenius_norm(a);
  const double tol = kJacobiThreshold * (scale > 0.0 ? scale : 1.0);

  int sweep = 0;
  while (detail::off_diagonal_norm(a) > tol) {
    if (sweep == kJacobiMaxSweeps) {
      throw NumericError("eigh: Jacobi iteration did not converge");
    }
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  EigenDecomposition out;
  out.sweeps = sweep;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t p = 0; p < n; ++p) {
    out.eigenvalues[p] = a(order[p], order[p]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, p) = v(i, order[p]);
    detail::fix_sign(out.eigenvectors, p);
  }
  return out;
}

/// Integral approximator on an M-point grid: (1/M) * sum_j f_j * g_j.
inline double discrete_integral(std::span<const double> f, std::span<const double> g) {
  if (f.size() != g.size()) {
    throw ArgumentError("discrete_integral: length mismatch");
  }
  if (f.empty()) throw ArgumentError("discrete_integral: empty grid");
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f[j] * g[j];
  return s / static_cast<double>(f.size());
}

inline double logistic(double u) noexcept { return 1.0 / (1.0 + std::exp(-u)); }

/// Seeded generator: std::mt19937_64 (fully specified by the standard) with
/// hand-rolled conversions, since the <random> distributions are not
/// reproducible across standard library implementations.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n), unbiased by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw ArgumentError("SeededRng::below: n must be positive");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  /// Standard normal by Box-Muller (one draw per call, second value dropped).
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Fisher-Yates, defined in terms of below() so the permutation is portable.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace fmlp::numerics
