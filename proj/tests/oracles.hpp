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

// Reference values computed without the library's Fock-space machinery:
// closed-form series and Heisenberg-picture (symplectic) propagation of the
// mode operators, exponentiated with Eigen's Pade-based matrix exponential.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <utility>

namespace crossres::oracle {

using C = std::complex<double>;

// e^{-|a|^2/2} a^n / sqrt(n!) for n < dim.
inline Eigen::VectorXcd coherent_state(C alpha, int dim) {
  Eigen::VectorXcd v(dim);
  C term = std::exp(-std::norm(alpha) / 2.0);
  for (int n = 0; n < dim; ++n) {
    v(n) = term;
    term *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  return v;
}

// <n> of exp((z^* a^dag^2 - z a^2)/2)|0>. With X the exponent,
// U^dag a U = exp(-ad_X) a, and ad_X maps a -> -z^* a^dag, a^dag -> -z a.
// Coordinates are over the basis (a, a^dag); <n> = |coefficient of a^dag|^2.
inline double squeezed_mean_number(C zeta) {
  Eigen::Matrix2cd ad;
  // column j = image of basis element j
  ad << 0.0, -zeta, -std::conj(zeta), 0.0;
  const Eigen::Matrix2cd m = (-ad).exp();
  return std::norm(m(1, 0));
}

// <n_1>, <n_2> of exp(z a1^dag a2^dag - z^* a1 a2)|0,0>. Basis
// (a1, a2, a1^dag, a2^dag); ad_X: a1 -> -z a2^dag, a2 -> -z a1^dag,
// a1^dag -> -z^* a2, a2^dag -> -z^* a1.
inline std::pair<double, double> two_mode_mean_numbers(C zeta) {
  Eigen::Matrix4cd ad = Eigen::Matrix4cd::Zero();
  ad(3, 0) = -zeta;
  ad(2, 1) = -zeta;
  ad(1, 2) = -std::conj(zeta);
  ad(0, 3) = -std::conj(zeta);
  const Eigen::Matrix4cd m = (-ad).exp();
  double n1 = 0.0, n2 = 0.0;
  for (int k = 2; k < 4; ++k) {
    n1 += std::norm(m(k, 0));
    n2 += std::norm(m(k, 1));
  }
  return {n1, n2};
}

// exp(theta (e^{i phi} a1 a2^dag - h.c.)) on span(|1,0>, |0,1>), solved in
// closed form.
inline Eigen::Matrix2cd single_photon_beamsplitter(double theta, double phi) {
  const C e = std::exp(C(0.0, phi));
  Eigen::Matrix2cd m;
  m << std::cos(theta), -std::conj(e) * std::sin(theta), e * std::sin(theta), std::cos(theta);
  return m;
}

}  // namespace crossres::oracle
