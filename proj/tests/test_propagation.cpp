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

#include <numbers>
#include <random>

#include "crossres/conditional_targets.hpp"
#include "crossres/hamiltonians.hpp"
#include "crossres/propagation.hpp"
#include "support.hpp"

namespace crossres {
namespace {

using testing::distance;
using testing::fock;
using testing::kind_of;

constexpr double kPi = std::numbers::pi;

SystemSpec jc(double g, double omega, double wq, double wd, double w1) {
  SystemSpec s;
  s.omega_q = wq;
  s.mode_freqs = {w1};
  s.terms = {{g, {{1, 0}}}};
  s.drive_strength = omega;
  s.drive_freq = wd;
  return s;
}

SystemSpec beamsplitter_spec(double g = 0.05) {
  SystemSpec s;
  s.omega_q = 3.0;
  s.mode_freqs = {7.0, 4.0};
  s.terms = {{g, {{1, 0}, {0, 1}}}};
  s.drive_strength = 0.8;
  s.drive_freq = 3.1;
  return s;
}

double max_frequency(const SystemSpec& s) {
  double w = std::max({std::abs(s.omega_q), std::abs(s.drive_freq), s.drive_strength});
  for (double x : s.mode_freqs) w = std::max(w, x);
  return w;
}

TEST(PropagateStatic, IdentityAndGroupLaw) {
  std::mt19937_64 rng(1);
  const Operator h = testing::random_hermitian(rng, {2, 3});
  EXPECT_LT(distance(propagate_static(h, 0.0), Operator::identity({2, 3})), 1e-14);
  EXPECT_LT(distance(propagate_static(h, 0.4) * propagate_static(h, 1.1),
                     propagate_static(h, 1.5)),
            1e-10);
}

TEST(PropagateTimeOrdered, ConstantHamiltonianMatchesStatic) {
  std::mt19937_64 rng(2);
  const Operator h = testing::random_hermitian(rng, {2, 3});
  const Operator exact = propagate_static(h, 2.0);
  for (double dt : {0.01, 0.005}) {
    const Operator u = propagate_time_ordered([&](double) { return h; }, 2.0, dt);
    EXPECT_LT(distance(u, exact), 1e-10) << "dt " << dt;
  }
}

TEST(PropagateTimeOrdered, ZeroHamiltonianIsIdentity) {
  const Operator zero = Operator::zero({2, 4});
  EXPECT_LT(distance(propagate_time_ordered([&](double) { return zero; }, 3.0, 0.1),
                     Operator::identity({2, 4})),
            1e-15);
}

TEST(PropagateTimeOrdered, RejectsNonHermitian) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  const Operator bad({2}, m);
  EXPECT_EQ(kind_of([&] { propagate_time_ordered([&](double) { return bad; }, 1.0, 0.1); }),
            ErrorKind::NotHermitian);
}

TEST(PropagateTimeOrdered, SampledTimesMatchSingleRuns) {
  const SystemSpec s = jc(0.05, 0.3, 1.2, 1.0, 1.0);
  const HilbertSpec h({3});
  auto lab = [&](double t) { return build_lab(s, h, t); };
  const std::vector<double> times{0.0, 0.5, 1.0};
  const auto us = propagate_time_ordered(lab, times, 0.05);
  ASSERT_EQ(us.size(), 3u);
  EXPECT_LT(distance(us[0], Operator::identity(h.layout())), 1e-15);
  EXPECT_LT(distance(us[2], propagate_time_ordered(lab, 1.0, 0.05)), 1e-13);
}

// The midpoint error grows with drive strength times duration; this JC
// system (two qubit periods, Omega = 0.1) stays below 1e-6.
TEST(PropagateTimeOrdered, LabMatchesDriveFrameAtFineStep) {
  const SystemSpec s = jc(0.05, 0.1, 1.2, 1.0, 1.0);
  const HilbertSpec h({4});
  const FrameIntegers f{{1}};
  const double t = 2.0 * 2.0 * kPi / 1.2;
  const double dt = 1e-3 * 2.0 * kPi / max_frequency(s);
  const Operator lab = propagate_time_ordered([&](double x) { return build_lab(s, h, x); }, t, dt);
  const Operator via_frame =
      frame_unitaries(s, f, h, t).drive * propagate_static(build_drive_frame(s, f, h, 0.0), t);
  EXPECT_LT(distance(lab, via_frame), 1e-6);
  EXPECT_LT(unitarity_defect(lab.matrix()), 1e-9);
}

TEST(PropagateTimeOrdered, SecondOrderUnderHalving) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (int trial = 0; trial < 8; ++trial) {
    SystemSpec s;
    s.omega_q = u(rng);
    s.mode_freqs = {u(rng), u(rng)};
    s.terms = {{0.05 * u(rng), {{1, 0}, {0, 1}}}};
    s.drive_strength = 0.3 * u(rng);
    s.drive_freq = u(rng);
    const HilbertSpec h({2, 3});
    auto lab = [&](double t) { return build_lab(s, h, t); };
    const double t = 3.0;
    const double dt = default_step(s);
    const Operator ref = propagate_time_ordered(lab, t, dt / 8);
    const double e1 = distance(propagate_time_ordered(lab, t, dt), ref);
    const double e2 = distance(propagate_time_ordered(lab, t, dt / 2), ref);
    // Richardson-corrected ratio of the halving sequence.
    EXPECT_GE(e1 / e2, 3.5) << "trial " << trial;
  }
}

TEST(PropagateTimeOrdered, RefinementCheck) {
  const SystemSpec s = jc(0.05, 0.3, 1.2, 1.0, 1.0);
  const HilbertSpec h({3});
  auto lab = [&](double t) { return build_lab(s, h, t); };
  PropagationConfig cfg;
  cfg.t_final = 2.0;
  cfg.dt_refine = true;
  cfg.refine_tolerance = 1e-3;
  const CheckedPropagation ok = propagate_time_ordered(lab, cfg, 0.05);
  ASSERT_TRUE(ok.refinement_delta.has_value());
  EXPECT_LT(*ok.refinement_delta, 1e-3);
  cfg.refine_tolerance = 1e-12;
  EXPECT_EQ(kind_of([&] { propagate_time_ordered(lab, cfg, 0.05); }), ErrorKind::StepTooCoarse);
}

TEST(FrameUnitaries, IdentityAtZeroAndDiagonalDriveFrame) {
  const SystemSpec s = beamsplitter_spec();
  const HilbertSpec h({3, 3});
  const FrameIntegers f{{1, 1}};
  const FrameUnitaries zero = frame_unitaries(s, f, h, 0.0);
  EXPECT_LT(distance(zero.drive, Operator::identity(h.layout())), 1e-15);
  EXPECT_LT(distance(zero.free, Operator::identity(h.layout())), 1e-15);
  const FrameUnitaries u = frame_unitaries(s, f, h, 1.3);
  const Matrix off = u.drive.matrix() - Matrix(u.drive.matrix().diagonal().asDiagonal());
  EXPECT_EQ(max_abs(off), 0.0);
  EXPECT_LT(unitarity_defect(u.drive.matrix()), 1e-12);
  EXPECT_LT(unitarity_defect(u.free.matrix()), 1e-12);
}

// U_d^dag H U_d - i U_d^dag dU_d/dt must reproduce the drive-frame Hamiltonian.
TEST(FrameUnitaries, ConjugationMatchesDriveFrameByFiniteDifference) {
  const double step = 1e-6;
  for (const SystemSpec& s : {beamsplitter_spec(), jc(0.05, 0.6, 5.4, 5.1, 5.0)}) {
    const HilbertSpec h(std::vector<std::size_t>(s.num_modes(), 3));
    const FrameIntegers f{std::vector<int>(s.num_modes(), 1)};
    for (double t : {0.3, 2.7}) {
      const Operator ud = frame_unitaries(s, f, h, t).drive;
      const Matrix derivative = (frame_unitaries(s, f, h, t + step).drive.matrix() -
                                 frame_unitaries(s, f, h, t - step).drive.matrix()) /
                                (2.0 * step);
      const Matrix conj = ud.matrix().adjoint() * build_lab(s, h, t).matrix() * ud.matrix() -
                          kI * ud.matrix().adjoint() * derivative;
      EXPECT_LT(max_abs(conj - build_drive_frame(s, f, h, t).matrix()), 1e-5);
    }
  }
}

TEST(InteractionPicture, IdentityAtTimeZero) {
  const SystemSpec s = beamsplitter_spec();
  const HilbertSpec h({3, 3});
  const FrameIntegers f{{1, 1}};
  EXPECT_LT(distance(to_interaction_picture(Operator::identity(h.layout()), s, f, h, 0.0),
                     Operator::identity(h.layout())),
            1e-15);
}

TEST(InteractionPicture, FreeEvolutionCancels) {
  for (auto method : {PropagationMethod::static_frame, PropagationMethod::time_ordered}) {
    SystemSpec s = jc(0.0, 0.3, 1.2, 1.0, 1.05);
    const HilbertSpec h({4});
    PropagationConfig cfg;
    cfg.t_final = 3.0;
    cfg.method = method;
    cfg.dt = 2e-4;
    const std::vector<double> times{1.0, 3.0};
    const LabEvolution lab = propagate_lab(s, h, times, cfg);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const Operator ui = to_interaction_picture(lab.unitaries[i], s, FrameIntegers{{1}}, h,
                                                 times[i]);
      EXPECT_LT(distance(ui, Operator::identity(h.layout())), 1e-8) << to_string(method);
      EXPECT_LT(unitarity_defect(ui.matrix()), 1e-9);
    }
  }
}

TEST(InteractionPicture, IndependentOfFrameIntegers) {
  const SystemSpec s = beamsplitter_spec();
  const HilbertSpec h({3, 3});
  std::mt19937_64 rng(6);
  const Operator u = expm_i(testing::random_hermitian(rng, h.layout()), 1.0);
  EXPECT_LT(distance(to_interaction_picture(u, s, FrameIntegers{{1, 1}}, h, 2.2),
                     to_interaction_picture(u, s, FrameIntegers{{2, 3}}, h, 2.2)),
            1e-12);
}

// The co-rotating fast path must agree with brute-force lab stepping, also for
// couplings that stay time dependent in the drive frame.
TEST(PropagateLab, StaticPathAgreesWithTimeOrdered) {
  std::vector<SystemSpec> specs{beamsplitter_spec(), jc(0.05, 0.6, 5.4, 5.1, 5.0)};
  // a_1 a_2^dag and a_1^dag a_2 ask for r_1 - r_2 = w_d and r_2 - r_1 = w_d.
  SystemSpec hopping;
  hopping.omega_q = 3.0;
  hopping.mode_freqs = {7.0, 4.0};
  hopping.terms = {{0.03, {{1, 0}, {0, 1}}}, {0.02, {{0, 1}, {1, 0}}}};
  hopping.drive_strength = 0.5;
  hopping.drive_freq = 3.0;
  for (const SystemSpec& s : specs) {
    ASSERT_TRUE(static_frame_rates(s).has_value());
    const HilbertSpec h(std::vector<std::size_t>(s.num_modes(), 3));
    PropagationConfig cfg;
    cfg.t_final = 2.0;
    cfg.dt = 2e-4;
    const std::vector<double> times{2.0};
    cfg.method = PropagationMethod::static_frame;
    const LabEvolution fast = propagate_lab(s, h, times, cfg);
    cfg.method = PropagationMethod::time_ordered;
    const LabEvolution slow = propagate_lab(s, h, times, cfg);
    EXPECT_EQ(fast.path, PropagationMethod::static_frame);
    EXPECT_EQ(slow.path, PropagationMethod::time_ordered);
    EXPECT_LT(distance(fast.unitaries[0], slow.unitaries[0]), 1e-6);
  }
  EXPECT_FALSE(static_frame_rates(hopping).has_value());
  const HilbertSpec h({3, 3});
  PropagationConfig cfg;
  cfg.t_final = 1.0;
  const std::vector<double> times{1.0};
  EXPECT_EQ(propagate_lab(hopping, h, times, cfg).path, PropagationMethod::time_ordered);
  cfg.method = PropagationMethod::static_frame;
  EXPECT_EQ(kind_of([&] { propagate_lab(hopping, h, times, cfg); }), ErrorKind::SpecMismatch);
}

TEST(TruncationGuard, VacuumAndIdentity) {
  const HilbertSpec h({6, 5});
  const LeakageReport v = truncation_guard(fock(h, 0, {0, 0}), h, 2, 1e-6);
  EXPECT_EQ(v.leakage, 0.0);
  EXPECT_FALSE(v.breach);
  for (std::size_t tail : {1u, 2u, 3u}) {
    EXPECT_EQ(truncation_guard(Operator::identity(h.layout()), h, tail, 1e-6).leakage, 0.0);
  }
}

TEST(TruncationGuard, CoherentStateTail) {
  for (std::size_t dim : {30u, 40u}) {
    const HilbertSpec h({dim});
    const Operator d = displacement(Complex(0.6, -0.8), dim);  // |alpha| = 1
    Vector psi = Vector::Zero(h.total_dim());
    psi.tail(dim) = d.matrix().col(0);
    const LeakageReport r = truncation_guard(psi, h, 2, 1e-8);
    EXPECT_LT(r.leakage, 1e-8);
    EXPECT_FALSE(r.breach);
  }
}

TEST(TruncationGuard, FlagsPopulatedTopLevel) {
  const HilbertSpec h({5});
  const LeakageReport r = truncation_guard(fock(h, 1, {4}), h, 1, 1e-6);
  EXPECT_EQ(r.leakage, 1.0);
  EXPECT_TRUE(r.breach);
}

TEST(ComparisonSubspace, IndicesAndProjector) {
  const HilbertSpec h({4, 3});
  const auto idx = comparison_indices(h, 1);
  EXPECT_EQ(idx.size(), 2u * 3u * 2u);
  const Operator p = comparison_projector(h, 1);
  EXPECT_LT(max_abs((p * p).matrix() - p.matrix()), 1e-15);
  EXPECT_NEAR(p.matrix().trace().real(), 12.0, 1e-15);
}

TEST(PropagationConfig, Validation) {
  const HilbertSpec h({5});
  PropagationConfig cfg;
  cfg.t_final = 1.0;
  EXPECT_NO_THROW(cfg.validate(h));
  cfg.truncation_tail = 5;
  EXPECT_EQ(kind_of([&] { cfg.validate(h); }), ErrorKind::SpecMismatch);
  cfg.truncation_tail = 0;
  cfg.t_final = -1.0;
  EXPECT_EQ(kind_of([&] { cfg.validate(h); }), ErrorKind::SpecMismatch);
  cfg.t_final = 0.0;
  EXPECT_EQ(cfg.sample_times(), std::vector<double>{0.0});
  EXPECT_EQ(default_tail(HilbertSpec({30, 12})), 2u);
  EXPECT_EQ(default_tail(HilbertSpec({3})), 1u);
}

}  // namespace
}  // namespace crossres
