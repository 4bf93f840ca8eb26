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

#include "crossres/analysis.hpp"
#include "support.hpp"

namespace crossres {
namespace {

using testing::basis;
using testing::kind_of;

constexpr double kPi = std::numbers::pi;

SystemSpec jc(double g, double omega = 1.0, double w1 = 5.0, double wd = 5.0, double wq = 5.0) {
  SystemSpec s;
  s.omega_q = wq;
  s.mode_freqs = {w1};
  s.terms = {{g, {{1, 0}}}};
  s.drive_strength = omega;
  s.drive_freq = wd;
  return s;
}

TEST(StateFidelity, WorkedValues) {
  const Vector zero = basis(2, 0), one = basis(2, 1);
  EXPECT_DOUBLE_EQ(state_fidelity(zero, zero), 1.0);
  EXPECT_DOUBLE_EQ(state_fidelity(zero, one), 0.0);
  const Vector plus = (zero + one) / std::sqrt(2.0);
  EXPECT_NEAR(state_fidelity(plus, zero), 0.5, 1e-15);
  EXPECT_EQ(kind_of([&] { state_fidelity(2.0 * zero, zero); }), ErrorKind::NormalizationError);
}

TEST(OperatorFidelity, SelfAndGlobalPhase) {
  std::mt19937_64 rng(12);
  const Operator u = expm_i(testing::random_hermitian(rng, {2, 3}), 1.0);
  const Operator p = Operator::identity({2, 3});
  EXPECT_NEAR(operator_fidelity(u, u, p), 1.0, 1e-12);
  EXPECT_NEAR(operator_fidelity(u, std::exp(kI * 0.7) * u, p), 1.0, 1e-12);
}

// Explicit 4x4 trace for a qubit tensor a two-level mode.
double trace_oracle(const Matrix& u, const Matrix& v, const std::vector<int>& kept) {
  Complex tr = 0.0;
  for (int i : kept) {
    for (int j = 0; j < 4; ++j) tr += std::conj(u(j, i)) * v(j, i);
  }
  return std::norm(tr) / std::pow(static_cast<double>(kept.size()), 2);
}

TEST(OperatorFidelity, ExplicitTraceOracle) {
  std::mt19937_64 rng(13);
  const HilbertSpec h({2});
  const Operator u = expm_i(testing::random_hermitian(rng, {2, 2}), 1.0);
  const Operator sz = embed(qubit_operator(QubitOp::sz), Slot::qubit(), h);
  const Operator v = u * sz;
  const Operator full = Operator::identity(h.layout());
  EXPECT_NEAR(operator_fidelity(u, v, full), trace_oracle(u.matrix(), v.matrix(), {0, 1, 2, 3}),
              1e-14);
  EXPECT_NEAR(operator_fidelity(u, v, full), 0.0, 1e-14);
  const Operator w = u * expm_i(sz, 0.3);
  EXPECT_NEAR(operator_fidelity(u, w, full), trace_oracle(u.matrix(), w.matrix(), {0, 1, 2, 3}),
              1e-14);
  EXPECT_NEAR(operator_fidelity(u, w, full), std::pow(std::cos(0.3), 2), 1e-14);
  // Bottom Fock level only: indices |g,0> = 0 and |e,0> = 2.
  const Operator low = comparison_projector(h, 1);
  EXPECT_NEAR(operator_fidelity(u, w, low), trace_oracle(u.matrix(), w.matrix(), {0, 2}), 1e-14);
}

TEST(OperatorFidelity, Errors) {
  const Operator p = Operator::identity({2});
  Matrix m = Matrix::Identity(2, 2);
  m(0, 0) = 2.0;
  EXPECT_EQ(kind_of([&] { operator_fidelity(Operator({2}, m), p, p); }), ErrorKind::NotUnitary);
  EXPECT_EQ(kind_of([&] { operator_fidelity(p, p, 0.5 * p); }), ErrorKind::NotProjector);
}

TEST(RwaMargin, WorkedValues) {
  const RwaMargin ok = rwa_margin(jc(0.01), FrameIntegers{{1}});
  EXPECT_DOUBLE_EQ(ok.ratio_g, 0.01);
  EXPECT_DOUBLE_EQ(ok.ratio_delta, 0.0);
  EXPECT_FALSE(ok.violated);
  const RwaMargin weak = rwa_margin(jc(0.02, 0.05), FrameIntegers{{1}});
  EXPECT_NEAR(weak.ratio_g, 0.4, 1e-15);
  EXPECT_TRUE(weak.violated);
  // Mode at 6 while the drive and qubit sit at 5: the coupling phase turns at 1 = epsilon.
  const RwaMargin off = rwa_margin(jc(0.001, 1.0, 6.0), FrameIntegers{{1}});
  EXPECT_DOUBLE_EQ(off.ratio_delta, 1.0);
  EXPECT_TRUE(off.violated);
}

TEST(InitialState, DressedAndBare) {
  const SystemSpec s = jc(0.01);
  const HilbertSpec h({3});
  const std::vector<std::size_t> vac{0};
  const Vector plus = initial_state(QubitInit::plus, vac, s, h);
  EXPECT_NEAR(std::abs(plus(0)), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(std::abs(plus(3)), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(initial_state(QubitInit::e, vac, s, h), basis(6, 3));
  EXPECT_EQ(parse_qubit_init("minus"), QubitInit::minus);
  EXPECT_FALSE(parse_qubit_init("x").has_value());
}

PropagationConfig config(double t_final, std::size_t samples = 5) {
  PropagationConfig cfg;
  cfg.t_final = t_final;
  cfg.samples = samples;
  return cfg;
}

TEST(CompareRun, UncoupledIsPerfect) {
  const SystemSpec s = jc(0.0);
  const HilbertSpec h({6});
  for (auto method : {PropagationMethod::static_frame, PropagationMethod::time_ordered}) {
    PropagationConfig cfg = config(2.0);
    cfg.method = method;
    const Vector psi = initial_state(QubitInit::g, std::vector<std::size_t>{1}, s, h);
    const CompareRun run = compare_run(s, FrameIntegers{{1}}, cfg, psi, {}, h);
    for (const auto& r : run.records) {
      EXPECT_NEAR(r.state_fidelity, 1.0, 1e-8);
      EXPECT_NEAR(r.operator_fidelity, 1.0, 1e-8);
    }
  }
}

TEST(CompareRun, TimeZeroRecord) {
  const SystemSpec s = jc(0.01);
  const HilbertSpec h({10});
  const Vector psi = initial_state(QubitInit::plus, std::vector<std::size_t>{0}, s, h);
  const CompareRun run = compare_run(s, FrameIntegers{{1}}, config(0.0), psi, {}, h);
  ASSERT_EQ(run.records.size(), 1u);
  EXPECT_NEAR(run.records[0].state_fidelity, 1.0, 1e-14);
  EXPECT_NEAR(run.records[0].operator_fidelity, 1.0, 1e-14);
  EXPECT_NEAR(run.records[0].leakage, 0.0, 1e-15);
}

TEST(CompareRun, GlobalPhaseInvariant) {
  const SystemSpec s = jc(0.01);
  const HilbertSpec h({12});
  const Vector psi = initial_state(QubitInit::g, std::vector<std::size_t>{0}, s, h);
  const auto a = compare_run(s, FrameIntegers{{1}}, config(40.0), psi, {}, h).records;
  const auto b =
      compare_run(s, FrameIntegers{{1}}, config(40.0), std::exp(kI * 1.3) * psi, {}, h).records;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a[i].state_fidelity, b[i].state_fidelity, 1e-12);
    EXPECT_EQ(a[i].operator_fidelity, b[i].operator_fidelity);
  }
}

TEST(CompareRun, JcConditionalDisplacement) {
  const SystemSpec s = jc(0.01);
  const HilbertSpec h({30});
  const double t = time_for_amplitude({CaseKind::displacement}, s, 0.5);
  EXPECT_NEAR(t, 100.0, 1e-12);
  const Vector psi = initial_state(QubitInit::g, std::vector<std::size_t>{0}, s, h);
  const CompareRun run = compare_run(s, FrameIntegers{{1}}, config(t), psi, {}, h);
  EXPECT_GE(run.records.back().state_fidelity, 0.99);
  EXPECT_LT(run.records.back().leakage, 1e-10);
  EXPECT_EQ(run.path, PropagationMethod::static_frame);
}

TEST(CompareRun, RejectsMismatchedState) {
  const SystemSpec s = jc(0.01);
  const HilbertSpec h({5});
  EXPECT_EQ(kind_of([&] {
              compare_run(s, FrameIntegers{{1}}, config(1.0), basis(8, 0), {}, h);
            }),
            ErrorKind::SpecMismatch);
  EXPECT_EQ(kind_of([&] {
              compare_run(s, FrameIntegers{{1}}, config(1.0), 2.0 * basis(10, 0), {}, h);
            }),
            ErrorKind::NormalizationError);
}

TEST(ScalingStudy, MonotoneWithModerateSlope) {
  const SystemSpec s = jc(0.01);
  const HilbertSpec h({30});
  const Vector psi = initial_state(QubitInit::g, std::vector<std::size_t>{0}, s, h);
  const std::vector<double> ratios{0.1, 0.01, 0.001};
  const ScalingTable table =
      scaling_study(s, FrameIntegers{{1}}, config(100.0), ratios, psi, {}, h);
  ASSERT_EQ(table.rows.size(), 3u);
  EXPECT_TRUE(table.monotone);
  EXPECT_GE(table.slope, 0.8);
  EXPECT_LE(table.slope, 2.5);
  EXPECT_NEAR(table.rows[1].t_final, 100.0, 1e-9);
}

TEST(ScalingStudy, Errors) {
  const SystemSpec s = jc(0.01);
  const HilbertSpec h({5});
  const Vector psi = initial_state(QubitInit::g, std::vector<std::size_t>{0}, s, h);
  EXPECT_EQ(kind_of([&] {
              scaling_study(s, FrameIntegers{{1}}, config(1.0), {}, psi, {}, h);
            }),
            ErrorKind::EmptySweep);
  const std::vector<double> ascending{0.01, 0.1};
  EXPECT_EQ(kind_of([&] {
              scaling_study(s, FrameIntegers{{1}}, config(1.0), ascending, psi, {}, h);
            }),
            ErrorKind::SpecMismatch);
}

TEST(TargetSupport, PoissonTailHeuristic) {
  const HilbertSpec small({5});
  const std::vector<std::size_t> vac{0};
  EXPECT_LT(target_support({CaseKind::displacement}, 2.0, vac, small, 1), 0.9999);
  const HilbertSpec big({30});
  EXPECT_GT(target_support({CaseKind::displacement}, 0.5, vac, big, 6), 0.9999);
  const HilbertSpec sq({40});
  EXPECT_GT(target_support({CaseKind::squeeze}, 0.3, vac, sq, 8), 0.9999);
}

TEST(TargetAmplitude, KindScaling) {
  const SystemSpec s = jc(0.02);
  EXPECT_NEAR(target_amplitude({CaseKind::displacement}, s, 50.0), 0.5, 1e-15);
  SystemSpec two = s;
  two.terms = {{0.01, {{2, 0}}}};
  EXPECT_NEAR(target_amplitude({CaseKind::squeeze}, two, 40.0), 0.4, 1e-15);
}

}  // namespace
}  // namespace crossres
