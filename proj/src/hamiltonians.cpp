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

#include "crossres/hamiltonians.hpp"

#include <cmath>
#include <vector>

namespace crossres {

namespace {

Operator number_sum(std::span<const double> weights, const HilbertSpec& h) {
  Operator out = Operator::zero(h.layout());
  for (std::size_t k = 0; k < h.num_modes(); ++k) {
    if (weights[k] == 0.0) continue;
    out += weights[k] * embed(ladder(Ladder::number, h.mode_dim(k)), Slot::mode(k), h);
  }
  return out;
}

Operator qubit_full(QubitOp kind, const HilbertSpec& h) {
  return embed(qubit_operator(kind), Slot::qubit(), h);
}

// sum_l (c_l sigma_+ A_l + h.c.) with per-term complex coefficients.
Operator coupling_sum(const SystemSpec& spec, const HilbertSpec& h,
                      std::span<const Complex> coefficients) {
  Operator out = Operator::zero(h.layout());
  const Operator sp = qubit_operator(QubitOp::splus);
  for (std::size_t l = 0; l < spec.terms.size(); ++l) {
    if (coefficients[l] == 0.0) continue;
    const Operator a = monomial_modes(spec.terms[l], h);
    const Operator term = coefficients[l] * qubit_tensor_modes(sp, a, h);
    out += term;
    out += term.adjoint();
  }
  return out;
}

Eigen::Vector2cd as_vector(double first, double second) {
  return Eigen::Vector2cd(Complex(first), Complex(second));
}

}  // namespace

Operator DressedQubit::proj_plus() const {
  return Operator({2}, plus_state * plus_state.adjoint());
}

Operator DressedQubit::proj_minus() const {
  return Operator({2}, minus_state * minus_state.adjoint());
}

Operator DressedQubit::sigma_z() const { return proj_plus() - proj_minus(); }

DressedQubit dressed_qubit(double omega, double delta) {
  if (omega == 0.0 && delta == 0.0) {
    throw Error(ErrorKind::DegenerateDressing, "drive strength and qubit detuning both vanish");
  }
  DressedQubit q;
  q.epsilon = std::hypot(omega, delta);
  q.theta = std::atan2(omega, delta);
  const double s = std::sin(q.theta / 2.0);
  const double c = std::cos(q.theta / 2.0);
  q.plus_state = as_vector(s, c);
  q.minus_state = as_vector(c, -s);
  return q;
}

DressedQubit dressed_qubit(const SystemSpec& spec) {
  return dressed_qubit(spec.drive_strength, spec.qubit_detuning());
}

Operator build_static(const SystemSpec& spec, const HilbertSpec& h) {
  spec.validate(h);
  Operator out = number_sum(spec.mode_freqs, h);
  out += (spec.omega_q / 2.0) * qubit_full(QubitOp::sz, h);
  return out;
}

Operator build_interaction(const SystemSpec& spec, const HilbertSpec& h) {
  spec.validate(h);
  std::vector<Complex> g;
  for (const auto& term : spec.terms) g.push_back(term.strength);
  return coupling_sum(spec, h, g);
}

Operator build_lab(const SystemSpec& spec, const HilbertSpec& h, double t) {
  Operator out = build_static(spec, h);
  out += build_interaction(spec, h);
  const Complex phase = std::exp(-kI * spec.drive_freq * t);
  const Operator drive = (spec.drive_strength / 2.0 * phase) * qubit_full(QubitOp::splus, h);
  out += drive;
  out += drive.adjoint();
  return out;
}

namespace {

// Free part with the given mode detunings plus couplings whose phases advance
// at residual[l].
Operator assemble_frame(const SystemSpec& spec, std::span<const double> detunings,
                        std::span<const double> residuals, const HilbertSpec& h, double t) {
  Operator out = number_sum(detunings, h);
  out += (spec.qubit_detuning() / 2.0) * qubit_full(QubitOp::sz, h);
  out += (spec.drive_strength / 2.0) * qubit_full(QubitOp::sx, h);
  std::vector<Complex> coefficients;
  for (std::size_t l = 0; l < spec.terms.size(); ++l) {
    // An exactly zero residual keeps the result independent of t.
    const Complex phase = residuals[l] == 0.0 ? Complex(1.0) : std::exp(kI * residuals[l] * t);
    coefficients.push_back(spec.terms[l].strength * phase);
  }
  out += coupling_sum(spec, h, coefficients);
  return out;
}

}  // namespace

Operator build_rotating_frame(const SystemSpec& spec, std::span<const double> rates,
                              const HilbertSpec& h, double t) {
  spec.validate(h);
  if (rates.size() != spec.num_modes()) {
    throw Error(ErrorKind::SpecMismatch, "one frame rate per mode is required");
  }
  std::vector<double> detunings(spec.num_modes());
  for (std::size_t k = 0; k < spec.num_modes(); ++k) detunings[k] = spec.mode_freqs[k] - rates[k];
  std::vector<double> residuals;
  for (const auto& term : spec.terms) {
    double residual = spec.drive_freq;
    for (std::size_t k = 0; k < spec.num_modes(); ++k) residual -= term.exponents[k].net() * rates[k];
    residuals.push_back(residual);
  }
  return assemble_frame(spec, detunings, residuals, h, t);
}

Operator build_drive_frame(const SystemSpec& spec, const FrameIntegers& frame,
                           const HilbertSpec& h, double t) {
  spec.validate(h);
  if (frame.n.size() != spec.num_modes()) {
    throw Error(ErrorKind::SpecMismatch, "frame integers do not match the mode count");
  }
  std::vector<double> detunings(spec.num_modes());
  for (std::size_t k = 0; k < spec.num_modes(); ++k) {
    detunings[k] = spec.mode_freqs[k] - spec.drive_freq / frame.n[k];
  }
  // chi_A from the exact rational f_A, so f_A == 1 gives a bit-exact static
  // Hamiltonian.
  std::vector<double> chi;
  for (const auto& term : spec.terms) {
    const Rational rest = Rational(1) - frame_fraction(term, frame);
    chi.push_back(rest.numerator() == 0 ? 0.0 : spec.drive_freq * boost::rational_cast<double>(rest));
  }
  return assemble_frame(spec, detunings, chi, h, t);
}

bool drive_frame_is_static(const SystemSpec& spec, const FrameIntegers& frame) {
  for (const auto& term : spec.terms) {
    if (frame_fraction(term, frame) != Rational(1) && spec.drive_freq != 0.0) return false;
  }
  return true;
}

Operator effective_mode_generator(const SystemSpec& spec, const HilbertSpec& h, double t) {
  spec.validate(h);
  const DressedQubit q = dressed_qubit(spec);
  const double scale = std::sin(q.theta) / 2.0;
  Operator out = Operator::zero(h.mode_layout());
  for (const auto& term : spec.terms) {
    const double rate = signed_resonance(term, spec.mode_freqs) - spec.drive_freq;
    const Complex phase = rate == 0.0 ? Complex(1.0) : std::exp(-kI * rate * t);
    const Operator a = (term.strength * scale * phase) * monomial_modes(term, h);
    out += a;
    out += a.adjoint();
  }
  return out;
}

Operator build_effective(const SystemSpec& spec, const FrameIntegers& frame,
                         const HilbertSpec& h, double t) {
  if (frame.n.size() != spec.num_modes()) {
    throw Error(ErrorKind::SpecMismatch, "frame integers do not match the mode count");
  }
  const DressedQubit q = dressed_qubit(spec);
  return qubit_tensor_modes(q.sigma_z(), effective_mode_generator(spec, h, t), h);
}

}  // namespace crossres
