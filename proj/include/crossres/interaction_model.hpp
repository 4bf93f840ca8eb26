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

// Resonance bookkeeping for interaction monomials.
//
// A drive frame is parameterised by positive integers n_k: mode k rotates at
// omega_d / n_k. For a monomial with net exponents q_k = m_k1 - m_k2 the
// frame leaves a residual phase chi_A = omega_d (1 - f_A) on the coupling,
// where f_A = sum_k q_k / n_k is tracked as an exact rational.

#pragma once

#include <boost/rational.hpp>

#include <optional>
#include <span>
#include <vector>

#include "crossres/interaction_term.hpp"
#include "crossres/system_spec.hpp"

namespace crossres {

using Rational = boost::rational<long long>;

int term_degree(const InteractionTerm& term);

// Throws TermShapeError for a term with no nonzero exponent.
void validate_term(const InteractionTerm& term);

struct FrameIntegers {
  std::vector<int> n;

  friend bool operator==(const FrameIntegers&, const FrameIntegers&) = default;
};

// Default assignment n_k = |m_k1 - m_k2|, with n_k = 1 for modes whose net
// exponent vanishes in every term. All terms must share one polynomial degree
// and must not ask for different n_k on the same mode (HeterogeneousTerms).
FrameIntegers solve_frame_integers(std::span<const InteractionTerm> terms);

// sum_k omega_k (m_k1 - m_k2), keeping the sign.
double signed_resonance(const InteractionTerm& term, std::span<const double> mode_freqs);

// |sum_k omega_k (m_k1 - m_k2)|. Throws NoResonance for excitation-neutral
// terms and TermShapeError on a length mismatch.
double resonance_frequency(const InteractionTerm& term, std::span<const double> mode_freqs);

// |sum_k n_k omega_k (m_k1 - m_k2)|: the frame-weighted variant. Kept only so
// the self-check can show it disagrees with the worked single-mode cases.
double frame_weighted_resonance(const InteractionTerm& term, std::span<const double> mode_freqs,
                                const FrameIntegers& frame);

Rational frame_fraction(const InteractionTerm& term, const FrameIntegers& frame);

struct ResonanceReport {
  Rational f_A;
  double chi_A = 0.0;
  double eta_A = 0.0;
  double delta_A = 0.0;  // chi_A + eta_A
  double omega_A = 0.0;  // 0 for excitation-neutral terms
  std::vector<double> mode_detunings;
  double qubit_detuning = 0.0;
  // Rate of the coupling phase once both the drive frame and the free
  // evolution are removed: sum_k omega_k q_k - omega_d. It does not depend on
  // the frame integers and equals delta_A whenever f_A == 1.
  double phase_rate = 0.0;
};

ResonanceReport resonance_report(const InteractionTerm& term, const SystemSpec& system,
                                 const FrameIntegers& frame);

std::vector<ResonanceReport> resonance_reports(const SystemSpec& system,
                                               const FrameIntegers& frame);

// Signed drive frequency that puts every term on resonance, if the terms
// agree on one (relative tolerance 1e-12). Empty otherwise.
std::optional<double> resonant_drive(const SystemSpec& system);

}  // namespace crossres
