// Copyright 2026 The Crossres Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shared helpers for the unit tests.

#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "crossres/fock_algebra.hpp"

namespace crossres::testing {

inline double distance(const Operator& a, const Operator& b) {
  return max_abs(a.matrix() - b.matrix());
}

inline Vector basis(std::size_t dim, std::size_t i) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(i)) = 1.0;
  return v;
}

inline Vector fock(const HilbertSpec& h, int q, std::vector<std::size_t> n) {
  return basis(h.total_dim(), q * h.modes_dim() + mode_index(n, h.mode_dims()));
}

// Random Hermitian matrix with entries of order `scale`.
inline Operator random_hermitian(std::mt19937_64& rng, Layout layout, double scale = 1.0) {
  std::size_t dim = 1;
  for (auto d : layout) dim *= d;
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = Complex(n(rng), n(rng));
  }
  return Operator(std::move(layout), (m + m.adjoint()) / 2.0);
}

// Kind of the crossres::Error thrown by fn; records a failure when none is.
template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::ConfigError;
}

// Global-phase-insensitive overlap |<a|b>|^2 for normalised vectors.
inline double overlap(const Vector& a, const Vector& b) { return std::norm(a.dot(b)); }

}  // namespace crossres::testing
