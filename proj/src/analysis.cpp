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

#include "crossres/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crossres/parallel.hpp"

namespace crossres {

namespace {

void require_normalised(const Vector& v, const char* name) {
  if (std::abs(v.norm() - 1.0) > 1e-10) {
    throw Error(ErrorKind::NormalizationError,
                std::string(name) + " has norm " + std::to_string(v.norm()));
  }
}

double max_coupling(const SystemSpec& spec) {
  double g = 0.0;
  for (const auto& term : spec.terms) g = std::max(g, std::abs(term.strength));
  return g;
}

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

// P(n) for a Poisson distribution, accumulated up to and including n_max.
double poisson_cdf(double mean, std::size_t n_max) {
  double p = std::exp(-mean);
  double sum = p;
  for (std::size_t n = 1; n <= n_max; ++n) {
    p *= mean / static_cast<double>(n);
    sum += p;
  }
  return sum;
}

// Squeezed vacuum: P(2n) = tanh(r)^{2n} (2n)! / (4^n (n!)^2 cosh r).
double squeezed_vacuum_cdf(double r, std::size_t n_max) {
  const double t2 = std::tanh(r) * std::tanh(r);
  double p = 1.0 / std::cosh(r);
  double sum = p;
  for (std::size_t n = 1; 2 * n <= n_max; ++n) {
    const double k = static_cast<double>(n);
    p *= t2 * (2.0 * k) * (2.0 * k - 1.0) / (4.0 * k * k);
    sum += p;
  }
  return sum;
}

// Thermal marginal of a two-mode squeezed vacuum with mean sinh^2 r.
double thermal_cdf(double r, std::size_t n_max) {
  const double t2 = std::tanh(r) * std::tanh(r);
  return 1.0 - std::pow(t2, static_cast<double>(n_max + 1));
}

}  // namespace

double state_fidelity(const Vector& psi, const Vector& phi) {
  if (psi.size() != phi.size()) {
    throw Error(ErrorKind::SpecMismatch, "states have different dimensions");
  }
  require_normalised(psi, "first state");
  require_normalised(phi, "second state");
  return clamp_unit(std::norm(psi.dot(phi)));
}

double operator_fidelity(const Operator& u, const Operator& v, const Operator& projector) {
  if (u.layout() != v.layout() || u.layout() != projector.layout()) {
    throw Error(ErrorKind::SpecMismatch, "operators act on different spaces");
  }
  if (!u.is_unitary(1e-9) || !v.is_unitary(1e-9)) {
    throw Error(ErrorKind::NotUnitary, "operator fidelity needs unitary arguments");
  }
  const Matrix& p = projector.matrix();
  if (hermiticity_defect(p) > 1e-12 || max_abs(p * p - p) > 1e-12) {
    throw Error(ErrorKind::NotProjector, "comparison operator is not an orthogonal projector");
  }
  const double rank = p.trace().real();
  if (rank < 0.5) throw Error(ErrorKind::NotProjector, "projector is zero");
  const Complex overlap = (p * u.matrix().adjoint() * v.matrix() * p).trace();
  return clamp_unit(std::norm(overlap) / (rank * rank));
}

RwaMargin rwa_margin(const SystemSpec& spec, const FrameIntegers& frame, double threshold) {
  const DressedQubit q = dressed_qubit(spec);
  RwaMargin m;
  m.epsilon = q.epsilon;
  m.threshold = threshold;
  m.ratio_g = max_coupling(spec) / q.epsilon;
  for (const auto& r : resonance_reports(spec, frame)) {
    m.ratio_delta = std::max(m.ratio_delta, std::abs(r.phase_rate) / q.epsilon);
  }
  m.violated = m.ratio_g > threshold || m.ratio_delta > threshold;
  return m;
}

std::string_view to_string(QubitInit q) {
  switch (q) {
    case QubitInit::g: return "g";
    case QubitInit::e: return "e";
    case QubitInit::plus: return "plus";
    case QubitInit::minus: return "minus";
  }
  return "unknown";
}

std::optional<QubitInit> parse_qubit_init(std::string_view name) {
  for (QubitInit q : {QubitInit::g, QubitInit::e, QubitInit::plus, QubitInit::minus}) {
    if (to_string(q) == name) return q;
  }
  return std::nullopt;
}

Vector initial_state(QubitInit qubit, std::span<const std::size_t> occupations,
                     const SystemSpec& spec, const HilbertSpec& h) {
  Eigen::Vector2cd q;
  switch (qubit) {
    case QubitInit::g: q << 1.0, 0.0; break;
    case QubitInit::e: q << 0.0, 1.0; break;
    case QubitInit::plus: q = dressed_qubit(spec).plus_state; break;
    case QubitInit::minus: q = dressed_qubit(spec).minus_state; break;
  }
  return product_state(q, occupations, h);
}

CompareRun compare_run(const SystemSpec& spec, const FrameIntegers& frame,
                       const PropagationConfig& cfg, const Vector& initial, const ConditionalCase& c,
                       const HilbertSpec& h, double rwa_threshold) {
  spec.validate(h);
  cfg.validate(h);
  check_case_matches(c, spec);
  if (static_cast<std::size_t>(initial.size()) != h.total_dim()) {
    throw Error(ErrorKind::SpecMismatch, "initial state does not match the system space");
  }
  require_normalised(initial, "initial state");

  const std::vector<double> times = cfg.sample_times();
  const LabEvolution lab = propagate_lab(spec, h, times, cfg);
  const RwaMargin margin = rwa_margin(spec, frame, rwa_threshold);
  const std::size_t tail = effective_tail(cfg, h);
  const Operator projector = comparison_projector(h, tail);

  CompareRun out;
  out.path = lab.path;
  out.refinement_delta = lab.refinement_delta;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const Operator exact = to_interaction_picture(lab.unitaries[i], spec, frame, h, t);
    const Operator target = conditional_target(c, spec, h, t);
    Vector psi = exact.matrix() * initial;
    Vector phi = target.matrix() * initial;
    // Renormalise away rounding accumulated over many steps.
    psi /= psi.norm();
    phi /= phi.norm();
    const LeakageReport leak = truncation_guard(psi, h, tail, cfg.tail_tolerance);

    FidelityRecord r;
    r.time = t;
    r.state_fidelity = state_fidelity(psi, phi);
    r.operator_fidelity = operator_fidelity(exact, target, projector);
    r.leakage = leak.leakage;
    r.leakage_breach = leak.breach;
    r.rwa_ratio_g = margin.ratio_g;
    r.rwa_ratio_delta = margin.ratio_delta;
    out.records.push_back(r);
    if (i + 1 == times.size()) {
      out.final_exact = std::move(psi);
      out.final_target = std::move(phi);
    }
  }
  return out;
}

ScalingTable scaling_study(const SystemSpec& spec, const FrameIntegers& frame,
                           const PropagationConfig& cfg, std::span<const double> ratios,
                           const Vector& initial, const ConditionalCase& c, const HilbertSpec& h) {
  if (ratios.empty()) throw Error(ErrorKind::EmptySweep, "no coupling ratios given");
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (!(ratios[i] > 0.0 && ratios[i] < 1.0)) {
      throw Error(ErrorKind::SpecMismatch, "coupling ratios must lie in (0, 1)");
    }
    if (i > 0 && !(ratios[i] < ratios[i - 1])) {
      throw Error(ErrorKind::SpecMismatch, "coupling ratios must be sorted descending");
    }
  }
  const double g_max = max_coupling(spec);
  if (g_max == 0.0) throw Error(ErrorKind::SpecMismatch, "scaling study needs a nonzero coupling");
  const double epsilon = dressed_qubit(spec).epsilon;

  std::vector<ScalingRow> rows = parallel_map(ratios.size(), [&](std::size_t i) {
    const double factor = ratios[i] * epsilon / g_max;
    SystemSpec scaled = spec;
    for (auto& term : scaled.terms) term.strength *= factor;
    PropagationConfig run_cfg = cfg;
    run_cfg.t_final = cfg.t_final / factor;
    run_cfg.samples = 1;
    const CompareRun run = compare_run(scaled, frame, run_cfg, initial, c, h);
    return ScalingRow{ratios[i], run_cfg.t_final, 1.0 - run.records.back().state_fidelity};
  });

  ScalingTable table;
  table.rows = std::move(rows);
  table.monotone = true;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    table.monotone = table.monotone && table.rows[i].infidelity < table.rows[i - 1].infidelity;
  }
  if (table.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(table.rows.size());
    for (const auto& row : table.rows) {
      const double x = std::log(row.ratio);
      const double y = std::log(std::max(row.infidelity, 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    table.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return table;
}

double target_amplitude(const ConditionalCase& c, const SystemSpec& spec, double t) {
  const double g = max_coupling(spec) * std::abs(std::sin(dressed_qubit(spec).theta));
  switch (c.kind) {
    case CaseKind::squeeze: return g * t;
    default: return g * t / 2.0;
  }
}

double time_for_amplitude(const ConditionalCase& c, const SystemSpec& spec, double amplitude) {
  const double per_unit_time = target_amplitude(c, spec, 1.0);
  if (per_unit_time == 0.0) {
    throw Error(ErrorKind::SpecMismatch, "target amplitude unreachable with zero coupling");
  }
  return amplitude / per_unit_time;
}

double target_support(const ConditionalCase& c, double amplitude,
                      std::span<const std::size_t> occupations, const HilbertSpec& h,
                      std::size_t tail) {
  if (occupations.size() != h.num_modes()) {
    throw Error(ErrorKind::SpecMismatch, "occupation list does not match mode count");
  }
  double support = 1.0;
  for (std::size_t k = 0; k < h.num_modes(); ++k) {
    if (h.mode_dim(k) <= tail) return 0.0;
    const std::size_t keep = h.mode_dim(k) - tail - 1;  // highest trusted level
    const double n0 = static_cast<double>(occupations[k]);
    double mode_support = 1.0;
    switch (c.kind) {
      case CaseKind::displacement:
      case CaseKind::joint_displacement: {
        const double mean = std::pow(std::sqrt(n0) + amplitude, 2.0);
        mode_support = poisson_cdf(mean, keep);
        break;
      }
      case CaseKind::squeeze:
        mode_support = squeezed_vacuum_cdf(amplitude, keep);
        if (occupations[k] > 0) mode_support = poisson_cdf(n0 * std::cosh(2 * amplitude), keep);
        break;
      case CaseKind::two_mode_squeeze:
        mode_support = thermal_cdf(amplitude, keep > occupations[k] ? keep - occupations[k] : 0);
        break;
      case CaseKind::beamsplitter: {
        std::size_t total = 0;
        for (std::size_t n : occupations) total += n;
        mode_support = total <= keep ? 1.0 : 0.0;
        break;
      }
      case CaseKind::generic: {
        // m2 n1 + m1 n2 is conserved.
        const std::size_t charge = static_cast<std::size_t>(c.m2) * occupations[0] +
                                   static_cast<std::size_t>(c.m1) * occupations[1];
        const std::size_t reach = charge / static_cast<std::size_t>(k == 0 ? c.m2 : c.m1);
        mode_support = reach <= keep ? 1.0 : 0.0;
        break;
      }
    }
    support = std::min(support, mode_support);
  }
  return support;
}

}  // namespace crossres
