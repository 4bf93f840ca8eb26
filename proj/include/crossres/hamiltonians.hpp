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

#pragma once

#include <span>

#include "crossres/fock_algebra.hpp"
#include "crossres/interaction_model.hpp"
#include "crossres/system_spec.hpp"

namespace crossres {

// Eigenbasis of the driven qubit block (Delta sz + Omega sx) / 2.
struct DressedQubit {
  double epsilon = 0.0;  // sqrt(Omega^2 + Delta^2)
  double theta = 0.0;    // atan2(Omega, Delta)
  Eigen::Vector2cd plus_state;
  Eigen::Vector2cd minus_state;

  Operator proj_plus() const;
  Operator proj_minus() const;
  // |+~><+~| - |-~><-~|
  Operator sigma_z() const;
};

// Throws DegenerateDressing when Omega == Delta == 0.
DressedQubit dressed_qubit(double omega, double delta);
DressedQubit dressed_qubit(const SystemSpec& spec);

// sum_k w_k n_k + (w_q / 2) sz
Operator build_static(const SystemSpec& spec, const HilbertSpec& h);

// sum_l g_l sigma_+ A_l + h.c.
Operator build_interaction(const SystemSpec& spec, const HilbertSpec& h);

// Lab-frame Hamiltonian including the rotating-form qubit drive at time t.
Operator build_lab(const SystemSpec& spec, const HilbertSpec& h, double t);

// Hamiltonian in a frame where the qubit rotates at omega_d and mode k at
// rates[k]. The coupling of term l keeps the phase
// exp(i (omega_d - sum_k q_k rates[k]) t).
Operator build_rotating_frame(const SystemSpec& spec, std::span<const double> rates,
                              const HilbertSpec& h, double t);

// The drive frame: build_rotating_frame with rates omega_d / n_k.
Operator build_drive_frame(const SystemSpec& spec, const FrameIntegers& frame,
                           const HilbertSpec& h, double t);

// True when every coupling is static in the drive frame (all chi_A == 0).
bool drive_frame_is_static(const SystemSpec& spec, const FrameIntegers& frame);

// Mode part sum_l (gbar_l(t) A_l + h.c.) of the effective Hamiltonian, on the
// modes only. gbar_l(t) = g_l sin(theta)/2 exp(-i r_l t) with r_l the term's
// phase rate (see ResonanceReport::phase_rate).
Operator effective_mode_generator(const SystemSpec& spec, const HilbertSpec& h, double t);

// (|+~><+~| - |-~><-~|) tensor effective_mode_generator. The frame integers
// are accepted for interface symmetry; the result does not depend on them.
Operator build_effective(const SystemSpec& spec, const FrameIntegers& frame,
                         const HilbertSpec& h, double t);

}  // namespace crossres
