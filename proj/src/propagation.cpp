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

#include "crossres/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "crossres/hamiltonians.hpp"

namespace crossres {

namespace {

// Per-basis-state occupation of every mode, in the full-space ordering.
std::vector<std::vector<std::size_t>> occupation_table(const HilbertSpec& h) {
  std::vector<std::vector<std::size_t>> table(h.total_dim(),
                                              std::vector<std::size_t>(h.num_modes()));
  for (std::size_t idx = 0; idx < h.total_dim(); ++idx) {
    std::size_t rest = idx % h.modes_dim();
    for (std::size_t k = h.num_modes(); k-- > 0;) {
      table[idx][k] = rest % h.mode_dim(k);
      rest /= h.mode_dim(k);
    }
  }
  return table;
}

// exp(-i t (sum_k rates[k] n_k + qubit_rate sz / 2)) as a diagonal operator.
Operator diagonal_rotation(std::span<const double> rates, double qubit_rate,
                           const HilbertSpec& h, double t) {
  const auto table = occupation_table(h);
  Vector diag(static_cast<Eigen::Index>(h.total_dim()));
  for (std::size_t idx = 0; idx < h.total_dim(); ++idx) {
    const double sz = idx < h.modes_dim() ? -1.0 : 1.0;
    double energy = qubit_rate * sz / 2.0;
    for (std::size_t k = 0; k < h.num_modes(); ++k) energy += rates[k] * table[idx][k];
    diag(static_cast<Eigen::Index>(idx)) = std::exp(-kI * energy * t);
  }
  return Operator(h.layout(), diag.asDiagonal().toDenseMatrix());
}

std::size_t step_count(double span, double dt) {
  if (span <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
}

LeakageReport make_report(double leakage, double tol) { return {leakage, leakage > tol}; }

}  // namespace

std::string_view to_string(PropagationMethod method) {
  switch (method) {
    case PropagationMethod::automatic: return "auto";
    case PropagationMethod::static_frame: return "static";
    case PropagationMethod::time_ordered: return "time_ordered";
  }
  return "unknown";
}

void PropagationConfig::validate(const HilbertSpec& h) const {
  if (!(t_final >= 0.0)) throw Error(ErrorKind::SpecMismatch, "t_final must be non-negative");
  if (dt < 0.0) throw Error(ErrorKind::SpecMismatch, "dt must be positive");
  if (!(tail_tolerance > 0.0)) {
    throw Error(ErrorKind::SpecMismatch, "tail_tolerance must be positive");
  }
  if (samples < 1) throw Error(ErrorKind::SpecMismatch, "at least one sample is required");
  const std::size_t min_dim = *std::min_element(h.mode_dims().begin(), h.mode_dims().end());
  const std::size_t tail = truncation_tail == 0 ? default_tail(h) : truncation_tail;
  if (tail < 1 || tail >= min_dim) {
    throw Error(ErrorKind::SpecMismatch,
                "truncation_tail must satisfy 1 <= K < " + std::to_string(min_dim));
  }
  if (dt_refine && !(refine_tolerance > 0.0)) {
    throw Error(ErrorKind::SpecMismatch, "refine_tolerance must be positive");
  }
}

std::vector<double> PropagationConfig::sample_times() const {
  if (t_final == 0.0 || samples == 1) return {t_final};
  std::vector<double> times(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    times[i] = t_final * static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  times.back() = t_final;
  return times;
}

double default_step(const SystemSpec& spec) {
  double w_max = std::max({std::abs(spec.omega_q), std::abs(spec.drive_freq),
                           spec.drive_strength});
  for (double w : spec.mode_freqs) w_max = std::max(w_max, std::abs(w));
  if (w_max == 0.0) w_max = 1.0;
  return (2.0 * std::numbers::pi / w_max) / 200.0;
}

std::size_t default_tail(const HilbertSpec& h) {
  const std::size_t min_dim = *std::min_element(h.mode_dims().begin(), h.mode_dims().end());
  return std::max<std::size_t>(1, min_dim / 5);
}

std::size_t effective_tail(const PropagationConfig& cfg, const HilbertSpec& h) {
  return cfg.truncation_tail == 0 ? default_tail(h) : cfg.truncation_tail;
}

double effective_step(const PropagationConfig& cfg, const SystemSpec& spec) {
  return cfg.dt > 0.0 ? cfg.dt : default_step(spec);
}

Operator propagate_static(const Operator& hamiltonian, double t) {
  return expm_i(hamiltonian, t);
}

std::vector<Operator> propagate_time_ordered(const HamiltonianFn& hamiltonian,
                                             std::span<const double> times, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::SpecMismatch, "dt must be positive");
  std::vector<Operator> out;
  out.reserve(times.size());
  std::optional<Operator> u;
  double t = 0.0;
  for (double target : times) {
    if (target < t) throw Error(ErrorKind::SpecMismatch, "sample times must be ascending");
    const std::size_t steps = step_count(target - t, dt);
    const double h = steps == 0 ? 0.0 : (target - t) / static_cast<double>(steps);
    for (std::size_t i = 0; i < steps; ++i) {
      const double mid = t + (static_cast<double>(i) + 0.5) * h;
      const Operator h_mid = hamiltonian(mid);
      const Operator step = expm_i(h_mid, h);
      u = u ? step * *u : step;
    }
    t = target;
    if (!u) u = Operator::identity(hamiltonian(0.0).layout());
    out.push_back(*u);
  }
  return out;
}

Operator propagate_time_ordered(const HamiltonianFn& hamiltonian, double t_final, double dt) {
  const double times[] = {t_final};
  return std::move(propagate_time_ordered(hamiltonian, times, dt).front());
}

CheckedPropagation propagate_time_ordered(const HamiltonianFn& hamiltonian,
                                          const PropagationConfig& cfg, double dt) {
  Operator coarse = propagate_time_ordered(hamiltonian, cfg.t_final, dt);
  if (!cfg.dt_refine) return {std::move(coarse), std::nullopt};
  Operator fine = propagate_time_ordered(hamiltonian, cfg.t_final, dt / 2.0);
  const double delta = max_abs(fine.matrix() - coarse.matrix());
  if (delta > cfg.refine_tolerance) {
    throw Error(ErrorKind::StepTooCoarse,
                "halving dt moved the propagator by " + std::to_string(delta));
  }
  return {std::move(fine), delta};
}

FrameUnitaries frame_unitaries(const SystemSpec& spec, const FrameIntegers& frame,
                               const HilbertSpec& h, double t) {
  spec.validate(h);
  if (frame.n.size() != spec.num_modes()) {
    throw Error(ErrorKind::SpecMismatch, "frame integers do not match the mode count");
  }
  std::vector<double> rates(spec.num_modes());
  for (std::size_t k = 0; k < rates.size(); ++k) rates[k] = spec.drive_freq / frame.n[k];
  Operator drive = diagonal_rotation(rates, spec.drive_freq, h, t);

  std::vector<double> detunings(spec.num_modes());
  for (std::size_t k = 0; k < rates.size(); ++k) detunings[k] = spec.mode_freqs[k] - rates[k];
  // The free generator is block diagonal over Fock states: a 2x2 qubit block
  // shifted by the mode energy. Exponentiate the block once.
  Matrix qubit_block(2, 2);
  qubit_block << -spec.qubit_detuning() / 2.0, spec.drive_strength / 2.0,
      spec.drive_strength / 2.0, spec.qubit_detuning() / 2.0;
  const Operator qubit_u = expm_i(Operator({2}, qubit_block), t);
  const Operator free =
      kron(qubit_u, Operator::identity(h.mode_layout())) *
      diagonal_rotation(detunings, 0.0, h, t);
  return {std::move(drive), free};
}

Operator to_interaction_picture(const Operator& lab, const SystemSpec& spec,
                                const FrameIntegers& frame, const HilbertSpec& h, double t) {
  if (lab.layout() != h.layout()) {
    throw Error(ErrorKind::SpecMismatch, "propagator does not act on the system space");
  }
  const FrameUnitaries f = frame_unitaries(spec, frame, h, t);
  return f.free.adjoint() * (f.drive.adjoint() * lab);
}

std::optional<std::vector<double>> static_frame_rates(const SystemSpec& spec) {
  spec.validate();
  const auto modes = static_cast<Eigen::Index>(spec.num_modes());
  Eigen::VectorXd bare(modes);
  for (Eigen::Index k = 0; k < modes; ++k) bare(k) = spec.mode_freqs[static_cast<std::size_t>(k)];
  if (spec.terms.empty()) return std::vector<double>(spec.mode_freqs);

  const auto rows = static_cast<Eigen::Index>(spec.terms.size());
  Eigen::MatrixXd nets(rows, modes);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index l = 0; l < rows; ++l) {
    const auto& term = spec.terms[static_cast<std::size_t>(l)];
    for (Eigen::Index k = 0; k < modes; ++k) {
      nets(l, k) = term.exponents[static_cast<std::size_t>(k)].net();
    }
    rhs(l) = spec.drive_freq - nets.row(l).dot(bare);
  }
  // Minimum-norm correction to the bare frequencies.
  const Eigen::VectorXd shift = nets.completeOrthogonalDecomposition().solve(rhs);
  const Eigen::VectorXd rates = bare + shift;
  double scale = std::abs(spec.drive_freq);
  for (double w : spec.mode_freqs) scale = std::max(scale, std::abs(w));
  const double residual = (nets * rates - Eigen::VectorXd::Constant(rows, spec.drive_freq))
                              .cwiseAbs()
                              .maxCoeff();
  if (residual > 1e-12 * std::max(1.0, scale)) return std::nullopt;
  return std::vector<double>(rates.data(), rates.data() + rates.size());
}

LabEvolution propagate_lab(const SystemSpec& spec, const HilbertSpec& h,
                           std::span<const double> times, const PropagationConfig& cfg) {
  spec.validate(h);
  LabEvolution out;
  out.times.assign(times.begin(), times.end());

  std::optional<std::vector<double>> rates;
  if (cfg.method != PropagationMethod::time_ordered) rates = static_frame_rates(spec);
  if (cfg.method == PropagationMethod::static_frame && !rates) {
    throw Error(ErrorKind::SpecMismatch, "no rotating frame makes this Hamiltonian static");
  }

  if (rates) {
    // Couplings whose residual phase is below rounding are taken as static.
    const Operator hr = build_rotating_frame(spec, *rates, h, 0.0);
    const HermitianPropagator inner(hr);
    out.path = PropagationMethod::static_frame;
    for (double t : times) {
      out.unitaries.push_back(diagonal_rotation(*rates, spec.drive_freq, h, t) * inner.at(t));
    }
    return out;
  }

  out.path = PropagationMethod::time_ordered;
  const double dt = effective_step(cfg, spec);
  const HamiltonianFn lab = [&](double t) { return build_lab(spec, h, t); };
  out.unitaries = propagate_time_ordered(lab, times, cfg.dt_refine ? dt / 2.0 : dt);
  if (cfg.dt_refine && !times.empty()) {
    const double last[] = {times.back()};
    const Operator coarse = std::move(propagate_time_ordered(lab, last, dt).front());
    const double delta = max_abs(coarse.matrix() - out.unitaries.back().matrix());
    if (delta > cfg.refine_tolerance) {
      throw Error(ErrorKind::StepTooCoarse,
                  "halving dt moved the propagator by " + std::to_string(delta));
    }
    out.refinement_delta = delta;
  }
  return out;
}

std::vector<std::size_t> comparison_indices(const HilbertSpec& h, std::size_t tail) {
  const auto table = occupation_table(h);
  std::vector<std::size_t> out;
  for (std::size_t idx = 0; idx < h.total_dim(); ++idx) {
    bool inside = true;
    for (std::size_t k = 0; k < h.num_modes(); ++k) {
      inside = inside && table[idx][k] + tail < h.mode_dim(k);
    }
    if (inside) out.push_back(idx);
  }
  return out;
}

Operator comparison_projector(const HilbertSpec& h, std::size_t tail) {
  Operator p = Operator::zero(h.layout());
  Matrix m = p.matrix();
  for (std::size_t idx : comparison_indices(h, tail)) {
    m(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)) = 1.0;
  }
  return Operator(h.layout(), std::move(m));
}

LeakageReport truncation_guard(const Vector& state, const HilbertSpec& h, std::size_t tail,
                               double tol) {
  if (static_cast<std::size_t>(state.size()) != h.total_dim()) {
    throw Error(ErrorKind::SpecMismatch, "state does not match the system space");
  }
  const auto table = occupation_table(h);
  double worst = 0.0;
  for (std::size_t k = 0; k < h.num_modes(); ++k) {
    double pop = 0.0;
    for (std::size_t idx = 0; idx < h.total_dim(); ++idx) {
      if (table[idx][k] + tail >= h.mode_dim(k)) {
        pop += std::norm(state(static_cast<Eigen::Index>(idx)));
      }
    }
    worst = std::max(worst, pop);
  }
  return make_report(worst, tol);
}

LeakageReport truncation_guard(const Operator& unitary, const HilbertSpec& h, std::size_t tail,
                               double tol) {
  if (unitary.layout() != h.layout()) {
    throw Error(ErrorKind::SpecMismatch, "operator does not act on the system space");
  }
  double worst = 0.0;
  for (std::size_t col : comparison_indices(h, tail)) {
    const Vector column = unitary.matrix().col(static_cast<Eigen::Index>(col));
    worst = std::max(worst, truncation_guard(column, h, tail, tol).leakage);
  }
  return make_report(worst, tol);
}

}  // namespace crossres
