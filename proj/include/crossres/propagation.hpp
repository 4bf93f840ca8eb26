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

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "crossres/fock_algebra.hpp"
#include "crossres/interaction_model.hpp"
#include "crossres/system_spec.hpp"

namespace crossres {

enum class PropagationMethod {
  automatic,     // static co-rotating frame when one exists, else time_ordered
  static_frame,  // fail with SpecMismatch if no static frame exists
  time_ordered,  // lab frame, exponential midpoint steps
};

std::string_view to_string(PropagationMethod method);

struct PropagationConfig {
  double t_final = 0.0;
  // Zero selects default_step(spec).
  double dt = 0.0;
  // Top Fock levels watched for leakage. Zero selects default_tail(h).
  std::size_t truncation_tail = 0;
  double tail_tolerance = 1e-6;
  // Number of equally spaced record times in [0, t_final], both ends included.
  std::size_t samples = 11;
  PropagationMethod method = PropagationMethod::automatic;
  // Re-run time-ordered propagation at dt/2 and fail with StepTooCoarse when
  // the two results differ by more than refine_tolerance (max element).
  bool dt_refine = false;
  double refine_tolerance = 1e-6;

  // Throws SpecMismatch describing the first violated constraint.
  void validate(const HilbertSpec& h) const;
  std::vector<double> sample_times() const;

  friend bool operator==(const PropagationConfig&, const PropagationConfig&) = default;
};

// (2 pi / w_max) / 200 with w_max the largest frequency appearing in the spec.
double default_step(const SystemSpec& spec);
// 20% of the smallest mode dimension, at least 1.
std::size_t default_tail(const HilbertSpec& h);
std::size_t effective_tail(const PropagationConfig& cfg, const HilbertSpec& h);
double effective_step(const PropagationConfig& cfg, const SystemSpec& spec);

Operator propagate_static(const Operator& hamiltonian, double t);

using HamiltonianFn = std::function<Operator(double)>;

// Ordered product of e^{-i H(t_mid) dt} over ceil(t_final / dt) equal steps.
Operator propagate_time_ordered(const HamiltonianFn& hamiltonian, double t_final, double dt);

// Same stepping, returning U(t, 0) at each requested time (ascending). Each
// interval between consecutive times is split into ceil(gap / dt) equal steps.
std::vector<Operator> propagate_time_ordered(const HamiltonianFn& hamiltonian,
                                             std::span<const double> times, double dt);

struct CheckedPropagation {
  Operator unitary;
  // Max-element distance between the dt and dt/2 results; set when dt_refine.
  std::optional<double> refinement_delta;
};

CheckedPropagation propagate_time_ordered(const HamiltonianFn& hamiltonian,
                                          const PropagationConfig& cfg, double dt);

struct FrameUnitaries {
  Operator drive;  // U_d(t)
  Operator free;   // U_0(t)
};

// U_d(t) = exp(-i w_d t (sum_k n_k^-1 a_k^dag a_k + sz/2)) and
// U_0(t) = exp(-i t (sum_k delta_k a_k^dag a_k + (Delta sz + Omega sx)/2)).
FrameUnitaries frame_unitaries(const SystemSpec& spec, const FrameIntegers& frame,
                               const HilbertSpec& h, double t);

// U_0^dag(t) U_d^dag(t) U_lab(t). The product does not depend on the frame
// integers: their mode rotations cancel between the two frames.
Operator to_interaction_picture(const Operator& lab, const SystemSpec& spec,
                                const FrameIntegers& frame, const HilbertSpec& h, double t);

// Mode rotation rates r_k for which the Hamiltonian is time independent in the
// frame exp(-i t (sum_k r_k n_k + w_d sz / 2)). The returned rates stay as
// close to the bare mode frequencies as possible. Empty when the couplings ask
// for incompatible rates.
std::optional<std::vector<double>> static_frame_rates(const SystemSpec& spec);

struct LabEvolution {
  std::vector<double> times;
  std::vector<Operator> unitaries;
  PropagationMethod path = PropagationMethod::static_frame;
  std::optional<double> refinement_delta;
};

// Exact lab-frame evolution U_lab(t, 0) at each requested time.
LabEvolution propagate_lab(const SystemSpec& spec, const HilbertSpec& h,
                           std::span<const double> times, const PropagationConfig& cfg);

// Basis indices of qubit tensor (bottom d_k - K Fock levels of every mode).
std::vector<std::size_t> comparison_indices(const HilbertSpec& h, std::size_t tail);
Operator comparison_projector(const HilbertSpec& h, std::size_t tail);

struct LeakageReport {
  double leakage = 0.0;
  bool breach = false;
};

// Largest population any single mode holds in its top `tail` Fock levels.
LeakageReport truncation_guard(const Vector& state, const HilbertSpec& h, std::size_t tail,
                               double tol);
// Largest squared column norm landing in the top `tail` levels of any mode,
// over the columns of the comparison subspace.
LeakageReport truncation_guard(const Operator& unitary, const HilbertSpec& h, std::size_t tail,
                               double tol);

}  // namespace crossres
