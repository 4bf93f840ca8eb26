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

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "crossres/conditional_targets.hpp"
#include "crossres/propagation.hpp"

namespace crossres {

struct FidelityRecord {
  double time = 0.0;
  double state_fidelity = 1.0;
  double operator_fidelity = 1.0;
  double leakage = 0.0;
  double rwa_ratio_g = 0.0;
  double rwa_ratio_delta = 0.0;
  // Set when leakage exceeds the tail tolerance; the fidelities of such a
  // sample are not trustworthy.
  bool leakage_breach = false;

  friend bool operator==(const FidelityRecord&, const FidelityRecord&) = default;
};

// |<psi|phi>|^2; both vectors must be normalised to 1e-10.
double state_fidelity(const Vector& psi, const Vector& phi);

// |Tr(P U^dag V P)|^2 / (Tr P)^2
double operator_fidelity(const Operator& u, const Operator& v, const Operator& projector);

struct RwaMargin {
  double epsilon = 0.0;
  double ratio_g = 0.0;      // max_l |g_l| / epsilon
  double ratio_delta = 0.0;  // max_l |phase rate_l| / epsilon
  double threshold = 0.1;
  bool violated = false;
};

RwaMargin rwa_margin(const SystemSpec& spec, const FrameIntegers& frame, double threshold = 0.1);

enum class QubitInit { g, e, plus, minus };

std::string_view to_string(QubitInit q);
std::optional<QubitInit> parse_qubit_init(std::string_view name);

// Qubit state (|g>, |e> or a dressed state of the spec) tensored with a Fock
// product state.
Vector initial_state(QubitInit qubit, std::span<const std::size_t> occupations,
                     const SystemSpec& spec, const HilbertSpec& h);

struct CompareRun {
  std::vector<FidelityRecord> records;
  PropagationMethod path = PropagationMethod::static_frame;
  std::optional<double> refinement_delta;
  // Interaction-picture states at the last sample time.
  Vector final_exact;
  Vector final_target;
};

// Propagates the lab-frame dynamics, moves each sample into the interaction
// picture and compares with the analytic conditional target of `c`.
CompareRun compare_run(const SystemSpec& spec, const FrameIntegers& frame,
                       const PropagationConfig& cfg, const Vector& initial, const ConditionalCase& c,
                       const HilbertSpec& h, double rwa_threshold = 0.1);

struct ScalingRow {
  double ratio = 0.0;  // max_l |g_l| / epsilon
  double t_final = 0.0;
  double infidelity = 0.0;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  bool monotone = false;  // infidelity strictly decreasing down the table
  double slope = 0.0;     // least-squares slope of log infidelity vs log ratio
};

// Re-runs compare_run with the couplings rescaled to each ratio and t_final
// rescaled so the target amplitude stays fixed. Ratios must be sorted
// descending and lie in (0, 1).
ScalingTable scaling_study(const SystemSpec& spec, const FrameIntegers& frame,
                           const PropagationConfig& cfg, std::span<const double> ratios,
                           const Vector& initial, const ConditionalCase& c, const HilbertSpec& h);

// Largest |target amplitude| the case reaches at time t (|alpha|, |zeta|, or
// theta), using the spec's couplings.
double target_amplitude(const ConditionalCase& c, const SystemSpec& spec, double t);

// Time at which the case reaches the given target amplitude.
double time_for_amplitude(const ConditionalCase& c, const SystemSpec& spec, double amplitude);

// Probability mass the ideal target state keeps inside the bottom d_k - tail
// Fock levels (the smaller of the per-mode values), using the closed-form
// photon distributions of each case started from `occupations`.
double target_support(const ConditionalCase& c, double amplitude,
                      std::span<const std::size_t> occupations, const HilbertSpec& h,
                      std::size_t tail);

}  // namespace crossres
