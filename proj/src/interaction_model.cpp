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

#include "crossres/interaction_model.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "crossres/errors.hpp"
#include "crossres/fock_algebra.hpp"

namespace crossres {

namespace {

void require_shape(const InteractionTerm& term, std::size_t modes) {
  if (term.exponents.size() != modes) {
    throw Error(ErrorKind::TermShapeError,
                "term has " + std::to_string(term.exponents.size()) +
                    " exponent pairs but the system has " + std::to_string(modes) + " modes");
  }
}

}  // namespace

void SystemSpec::validate() const {
  if (mode_freqs.empty()) throw Error(ErrorKind::SpecMismatch, "no modes declared");
  for (std::size_t k = 0; k < mode_freqs.size(); ++k) {
    if (!(mode_freqs[k] > 0.0)) {
      throw Error(ErrorKind::SpecMismatch,
                  "mode " + std::to_string(k) + " frequency must be positive");
    }
  }
  if (!(drive_strength >= 0.0)) {
    throw Error(ErrorKind::SpecMismatch, "drive strength must be non-negative");
  }
  for (std::size_t l = 0; l < terms.size(); ++l) {
    if (terms[l].exponents.size() != mode_freqs.size()) {
      throw Error(ErrorKind::SpecMismatch, "term " + std::to_string(l) +
                                               " does not list an exponent pair per mode");
    }
  }
}

void SystemSpec::validate(const HilbertSpec& space) const {
  validate();
  if (space.num_modes() != mode_freqs.size()) {
    throw Error(ErrorKind::SpecMismatch,
                "Fock truncation lists " + std::to_string(space.num_modes()) +
                    " modes, system has " + std::to_string(mode_freqs.size()));
  }
}

int term_degree(const InteractionTerm& term) {
  int degree = 0;
  for (const auto& e : term.exponents) degree += e.degree();
  return degree;
}

void validate_term(const InteractionTerm& term) {
  for (const auto& e : term.exponents) {
    if (e.annihilate < 0 || e.create < 0) {
      throw Error(ErrorKind::TermShapeError, "exponents must be non-negative");
    }
  }
  if (term_degree(term) < 1) {
    throw Error(ErrorKind::TermShapeError, "term has no nonzero exponent");
  }
}

FrameIntegers solve_frame_integers(std::span<const InteractionTerm> terms) {
  if (terms.empty()) throw Error(ErrorKind::EmptySpec, "no interaction terms");
  const std::size_t modes = terms.front().exponents.size();
  const int degree = term_degree(terms.front());
  FrameIntegers frame{std::vector<int>(modes, 0)};
  for (std::size_t l = 0; l < terms.size(); ++l) {
    const InteractionTerm& term = terms[l];
    require_shape(term, modes);
    validate_term(term);
    if (term_degree(term) != degree) {
      throw Error(ErrorKind::HeterogeneousTerms,
                  "term " + std::to_string(l) + " has degree " +
                      std::to_string(term_degree(term)) + ", term 0 has degree " +
                      std::to_string(degree));
    }
    for (std::size_t k = 0; k < modes; ++k) {
      const int wanted = std::abs(term.exponents[k].net());
      if (wanted == 0) continue;
      if (frame.n[k] != 0 && frame.n[k] != wanted) {
        throw Error(ErrorKind::HeterogeneousTerms,
                    "terms ask for different frame integers on mode " + std::to_string(k));
      }
      frame.n[k] = wanted;
    }
  }
  for (int& n : frame.n) {
    if (n == 0) n = 1;
  }
  return frame;
}

double signed_resonance(const InteractionTerm& term, std::span<const double> mode_freqs) {
  require_shape(term, mode_freqs.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < mode_freqs.size(); ++k) {
    sum += mode_freqs[k] * term.exponents[k].net();
  }
  return sum;
}

double resonance_frequency(const InteractionTerm& term, std::span<const double> mode_freqs) {
  require_shape(term, mode_freqs.size());
  bool any_net = false;
  for (const auto& e : term.exponents) any_net = any_net || e.net() != 0;
  if (!any_net) {
    throw Error(ErrorKind::NoResonance, "term conserves excitation number on every mode");
  }
  return std::abs(signed_resonance(term, mode_freqs));
}

double frame_weighted_resonance(const InteractionTerm& term, std::span<const double> mode_freqs,
                                const FrameIntegers& frame) {
  require_shape(term, mode_freqs.size());
  require_shape(term, frame.n.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < mode_freqs.size(); ++k) {
    sum += frame.n[k] * mode_freqs[k] * term.exponents[k].net();
  }
  return std::abs(sum);
}

Rational frame_fraction(const InteractionTerm& term, const FrameIntegers& frame) {
  require_shape(term, frame.n.size());
  Rational f{0};
  for (std::size_t k = 0; k < frame.n.size(); ++k) {
    if (frame.n[k] < 1) throw Error(ErrorKind::SpecMismatch, "frame integers must be positive");
    f += Rational(term.exponents[k].net(), frame.n[k]);
  }
  return f;
}

ResonanceReport resonance_report(const InteractionTerm& term, const SystemSpec& system,
                                 const FrameIntegers& frame) {
  require_shape(term, system.num_modes());
  if (frame.n.size() != system.num_modes()) {
    throw Error(ErrorKind::SpecMismatch, "frame integers do not match the mode count");
  }
  ResonanceReport r;
  const double wd = system.drive_freq;
  r.f_A = frame_fraction(term, frame);
  r.qubit_detuning = system.omega_q - wd;
  r.mode_detunings.resize(system.num_modes());
  for (std::size_t k = 0; k < system.num_modes(); ++k) {
    r.mode_detunings[k] = system.mode_freqs[k] - wd / frame.n[k];
    r.eta_A += term.exponents[k].net() * r.mode_detunings[k];
  }
  r.chi_A = wd * boost::rational_cast<double>(Rational(1) - r.f_A);
  r.delta_A = r.chi_A + r.eta_A;
  const double signed_wa = signed_resonance(term, system.mode_freqs);
  r.omega_A = std::abs(signed_wa);
  r.phase_rate = signed_wa - wd;
  return r;
}

std::vector<ResonanceReport> resonance_reports(const SystemSpec& system,
                                               const FrameIntegers& frame) {
  std::vector<ResonanceReport> out;
  out.reserve(system.terms.size());
  for (const auto& term : system.terms) out.push_back(resonance_report(term, system, frame));
  return out;
}

std::optional<double> resonant_drive(const SystemSpec& system) {
  std::optional<double> common;
  for (const auto& term : system.terms) {
    const double w = signed_resonance(term, system.mode_freqs);
    if (w == 0.0) return std::nullopt;
    if (!common) {
      common = w;
    } else if (std::abs(*common - w) > 1e-12 * std::max(std::abs(*common), std::abs(w))) {
      return std::nullopt;
    }
  }
  return common;
}

}  // namespace crossres
