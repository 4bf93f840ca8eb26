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

// Analytic qubit-conditional bosonic unitaries.
//
// Every target is built by exponentiating its truncated generator, so it is
// exactly unitary on the truncated space; truncation error shows up only near
// the top Fock levels.

#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "crossres/fock_algebra.hpp"
#include "crossres/hamiltonians.hpp"

namespace crossres {

// D(alpha) = exp(alpha a^dag - alpha^* a)
Operator displacement(Complex alpha, std::size_t dim);

// S(zeta) = exp((zeta^* a^dag^2 - zeta a^2) / 2)
Operator squeeze(Complex zeta, std::size_t dim);

// B(theta, phi) = exp(theta (e^{i phi} a_1 a_2^dag - e^{-i phi} a_1^dag a_2))
Operator beamsplitter(double theta, double phi, std::span<const std::size_t> dims);

// S12(zeta) = exp(zeta a_1^dag a_2^dag - zeta^* a_1 a_2)
Operator two_mode_squeeze(Complex zeta, std::span<const std::size_t> dims);

// V(zeta) = exp(zeta a_1^m1 a_2^dag^m2 - zeta^* a_1^dag^m1 a_2^m2)
Operator generic_v(int m1, int m2, Complex zeta, std::span<const std::size_t> dims);

// Tensor product of per-mode displacements.
Operator joint_displacement(std::span<const Complex> alphas, std::span<const std::size_t> dims);

// The exponent zeta a_1^dag a_2^dag - zeta^* a_2 a_2, i.e. two-mode squeezing
// with the second annihilation pair taken on mode 2 twice. It is not
// anti-Hermitian; the self-check uses it to show that.
Operator two_mode_squeeze_exponent_variant(Complex zeta, std::span<const std::size_t> dims);

// |+~><+~| (x) e^{-iGt} + |-~><-~| (x) e^{+iGt} for a Hermitian mode generator G.
Operator conditional_unitary(const DressedQubit& dressed, const Operator& generator, double t,
                             const HilbertSpec& h);

// P+ (x) plus_branch + P- (x) minus_branch.
Operator conditional_pair(const DressedQubit& dressed, const Operator& plus_branch,
                          const Operator& minus_branch, const HilbertSpec& h);

enum class CaseKind {
  displacement,
  squeeze,
  joint_displacement,
  beamsplitter,
  two_mode_squeeze,
  generic,
};

std::string_view to_string(CaseKind kind);
std::optional<CaseKind> parse_case_kind(std::string_view name);

struct ConditionalCase {
  CaseKind kind = CaseKind::displacement;
  // Photon numbers of the generic a_1^m1 a_2^dag^m2 coupling.
  int m1 = 1;
  int m2 = 1;

  friend bool operator==(const ConditionalCase&, const ConditionalCase&) = default;
};

// Amplitudes of the target after evolving for time t under a coupling whose
// effective strength is g (the coupling already scaled by sin(theta)):
//   displacement       alpha = -i g^* t / 2
//   squeeze            zeta  =  i g t
//   beamsplitter       theta = |-i g t / 2|, phi = arg(-i g t / 2)
//   two_mode_squeeze   zeta  = -i g^* t / 2
//   generic            zeta  = -i g t / 2
// For real g these are the textbook maps; the conjugate on displacement-type
// amplitudes keeps them consistent with complex couplings.
struct Amplitudes {
  Complex value;
  double theta = 0.0;  // beamsplitter only
  double phi = 0.0;    // beamsplitter only
};

Amplitudes parameter_map(CaseKind kind, Complex g, double t);

// Per-mode displacements for joint displacement: alpha_l = -i g_l^* t / 2.
std::vector<Complex> joint_parameter_map(std::span<const Complex> g, double t);

// Target unitary of the case on the modes only, for the given couplings
// (one per term) at time t. `sign` = -1 produces the backward branch.
Operator case_mode_unitary(const ConditionalCase& c, std::span<const Complex> effective_g,
                           double t, const HilbertSpec& h, int sign = +1);

// Full conditional target at time t built from the system's couplings and
// its dressed qubit.
Operator conditional_target(const ConditionalCase& c, const SystemSpec& spec,
                            const HilbertSpec& h, double t);

// Throws SpecMismatch unless the system's terms have the shape the case needs.
void check_case_matches(const ConditionalCase& c, const SystemSpec& spec);

}  // namespace crossres
