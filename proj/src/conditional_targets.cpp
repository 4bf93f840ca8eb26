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

#include "crossres/conditional_targets.hpp"

#include <cmath>
#include <string>

namespace crossres {

namespace {

// exp(X) for anti-Hermitian X, through the Hermitian generator iX.
Operator exp_anti_hermitian(const Operator& x) {
  // exp(X) = exp(-i H) with H = i X.
  return expm_i(kI * x, 1.0);
}

void require_two_modes(std::span<const std::size_t> dims) {
  if (dims.size() != 2) {
    throw Error(ErrorKind::InvalidDimension, "two-mode operator needs exactly two dimensions");
  }
}

Matrix power(const Matrix& m, int n) {
  Matrix out = Matrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < n; ++i) out = out * m;
  return out;
}

Operator two_mode(std::span<const std::size_t> dims, const Matrix& first, const Matrix& second) {
  return kron(Operator({dims[0]}, first), Operator({dims[1]}, second));
}

}  // namespace

Operator displacement(Complex alpha, std::size_t dim) {
  const Operator a = ladder(Ladder::annihilate, dim);
  return exp_anti_hermitian(alpha * a.adjoint() - std::conj(alpha) * a);
}

Operator squeeze(Complex zeta, std::size_t dim) {
  const Operator a = ladder(Ladder::annihilate, dim);
  const Operator a2 = a * a;
  return exp_anti_hermitian(0.5 * (std::conj(zeta) * a2.adjoint() - zeta * a2));
}

Operator beamsplitter(double theta, double phi, std::span<const std::size_t> dims) {
  require_two_modes(dims);
  const Matrix a1 = ladder(Ladder::annihilate, dims[0]).matrix();
  const Matrix a2 = ladder(Ladder::annihilate, dims[1]).matrix();
  const Operator hop = two_mode(dims, a1, a2.adjoint());  // a_1 a_2^dag
  const Complex e = std::exp(kI * phi);
  return exp_anti_hermitian(theta * (e * hop - std::conj(e) * hop.adjoint()));
}

Operator two_mode_squeeze(Complex zeta, std::span<const std::size_t> dims) {
  require_two_modes(dims);
  const Matrix a1 = ladder(Ladder::annihilate, dims[0]).matrix();
  const Matrix a2 = ladder(Ladder::annihilate, dims[1]).matrix();
  const Operator pair = two_mode(dims, a1, a2);  // a_1 a_2
  return exp_anti_hermitian(zeta * pair.adjoint() - std::conj(zeta) * pair);
}

Operator generic_v(int m1, int m2, Complex zeta, std::span<const std::size_t> dims) {
  require_two_modes(dims);
  if (m1 < 1 || m2 < 1) {
    throw Error(ErrorKind::InvalidDimension, "generic operation needs m1, m2 >= 1");
  }
  const Matrix a1 = ladder(Ladder::annihilate, dims[0]).matrix();
  const Matrix a2 = ladder(Ladder::annihilate, dims[1]).matrix();
  const Operator forward = two_mode(dims, power(a1, m1), power(a2.adjoint(), m2));
  return exp_anti_hermitian(zeta * forward - std::conj(zeta) * forward.adjoint());
}

Operator joint_displacement(std::span<const Complex> alphas, std::span<const std::size_t> dims) {
  if (alphas.size() != dims.size() || dims.empty()) {
    throw Error(ErrorKind::InvalidDimension, "one displacement per mode is required");
  }
  Operator out = displacement(alphas[0], dims[0]);
  for (std::size_t k = 1; k < dims.size(); ++k) out = kron(out, displacement(alphas[k], dims[k]));
  return out;
}

Operator two_mode_squeeze_exponent_variant(Complex zeta, std::span<const std::size_t> dims) {
  require_two_modes(dims);
  const Matrix a1 = ladder(Ladder::annihilate, dims[0]).matrix();
  const Matrix a2 = ladder(Ladder::annihilate, dims[1]).matrix();
  const Matrix id1 = Matrix::Identity(a1.rows(), a1.cols());
  return zeta * two_mode(dims, a1.adjoint(), a2.adjoint()) -
         std::conj(zeta) * two_mode(dims, id1, a2 * a2);
}

Operator conditional_pair(const DressedQubit& dressed, const Operator& plus_branch,
                          const Operator& minus_branch, const HilbertSpec& h) {
  return qubit_tensor_modes(dressed.proj_plus(), plus_branch, h) +
         qubit_tensor_modes(dressed.proj_minus(), minus_branch, h);
}

Operator conditional_unitary(const DressedQubit& dressed, const Operator& generator, double t,
                             const HilbertSpec& h) {
  const HermitianPropagator u(generator);
  return conditional_pair(dressed, u.at(t), u.at(-t), h);
}

std::string_view to_string(CaseKind kind) {
  switch (kind) {
    case CaseKind::displacement: return "displacement";
    case CaseKind::squeeze: return "squeeze";
    case CaseKind::joint_displacement: return "joint_displacement";
    case CaseKind::beamsplitter: return "beamsplitter";
    case CaseKind::two_mode_squeeze: return "two_mode_squeeze";
    case CaseKind::generic: return "generic";
  }
  return "unknown";
}

std::optional<CaseKind> parse_case_kind(std::string_view name) {
  for (CaseKind k : {CaseKind::displacement, CaseKind::squeeze, CaseKind::joint_displacement,
                     CaseKind::beamsplitter, CaseKind::two_mode_squeeze, CaseKind::generic}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

Amplitudes parameter_map(CaseKind kind, Complex g, double t) {
  Amplitudes out;
  switch (kind) {
    case CaseKind::displacement:
    case CaseKind::joint_displacement:
    case CaseKind::two_mode_squeeze:
      out.value = -kI * std::conj(g) * t / 2.0;
      break;
    case CaseKind::squeeze:
      out.value = kI * g * t;
      break;
    case CaseKind::beamsplitter:
      out.value = -kI * g * t / 2.0;
      out.theta = std::abs(out.value);
      out.phi = std::arg(out.value);
      break;
    case CaseKind::generic:
      out.value = -kI * g * t / 2.0;
      break;
  }
  return out;
}

std::vector<Complex> joint_parameter_map(std::span<const Complex> g, double t) {
  std::vector<Complex> out;
  for (Complex gl : g) out.push_back(parameter_map(CaseKind::joint_displacement, gl, t).value);
  return out;
}

void check_case_matches(const ConditionalCase& c, const SystemSpec& spec) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorKind::SpecMismatch, std::string(to_string(c.kind)) + " case: " + why);
  };
  auto single_term = [&](std::vector<ModeExponent> want) {
    if (spec.terms.size() != 1) fail("expects exactly one interaction term");
    if (spec.terms[0].exponents != want) fail("interaction term has the wrong exponents");
  };
  switch (c.kind) {
    case CaseKind::displacement:
      if (spec.num_modes() != 1) fail("expects one mode");
      single_term({{1, 0}});
      break;
    case CaseKind::squeeze:
      if (spec.num_modes() != 1) fail("expects one mode");
      single_term({{2, 0}});
      break;
    case CaseKind::joint_displacement:
      if (spec.terms.size() != spec.num_modes()) fail("expects one term per mode");
      for (std::size_t l = 0; l < spec.terms.size(); ++l) {
        for (std::size_t k = 0; k < spec.num_modes(); ++k) {
          const ModeExponent want = k == l ? ModeExponent{1, 0} : ModeExponent{0, 0};
          if (spec.terms[l].exponents[k] != want) fail("term l must be the annihilator of mode l");
        }
      }
      break;
    case CaseKind::beamsplitter:
      if (spec.num_modes() != 2) fail("expects two modes");
      single_term({{1, 0}, {0, 1}});
      break;
    case CaseKind::two_mode_squeeze:
      if (spec.num_modes() != 2) fail("expects two modes");
      single_term({{1, 0}, {1, 0}});
      break;
    case CaseKind::generic:
      if (spec.num_modes() != 2) fail("expects two modes");
      if (c.m1 < 1 || c.m2 < 1) fail("m1 and m2 must be at least 1");
      single_term({{c.m1, 0}, {0, c.m2}});
      break;
  }
}

Operator case_mode_unitary(const ConditionalCase& c, std::span<const Complex> effective_g,
                           double t, const HilbertSpec& h, int sign) {
  const auto& dims = h.mode_dims();
  const double s = sign >= 0 ? 1.0 : -1.0;
  if (effective_g.empty()) throw Error(ErrorKind::SpecMismatch, "no couplings given");
  if (c.kind == CaseKind::joint_displacement) {
    std::vector<Complex> alphas = joint_parameter_map(effective_g, t);
    for (Complex& a : alphas) a *= s;
    return joint_displacement(alphas, dims);
  }
  const Amplitudes amp = parameter_map(c.kind, effective_g[0], t);
  switch (c.kind) {
    case CaseKind::displacement: return displacement(s * amp.value, dims[0]);
    case CaseKind::squeeze: return squeeze(s * amp.value, dims[0]);
    case CaseKind::beamsplitter: return beamsplitter(s * amp.theta, amp.phi, dims);
    case CaseKind::two_mode_squeeze: return two_mode_squeeze(s * amp.value, dims);
    case CaseKind::generic: return generic_v(c.m1, c.m2, s * amp.value, dims);
    case CaseKind::joint_displacement: break;
  }
  throw Error(ErrorKind::SpecMismatch, "unhandled case kind");
}

Operator conditional_target(const ConditionalCase& c, const SystemSpec& spec,
                            const HilbertSpec& h, double t) {
  check_case_matches(c, spec);
  spec.validate(h);
  const DressedQubit q = dressed_qubit(spec);
  std::vector<Complex> g;
  for (const auto& term : spec.terms) g.push_back(term.strength * std::sin(q.theta));
  return conditional_pair(q, case_mode_unitary(c, g, t, h, +1), case_mode_unitary(c, g, t, h, -1),
                          h);
}

}  // namespace crossres
