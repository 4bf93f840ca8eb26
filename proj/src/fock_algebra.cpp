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

#include "crossres/fock_algebra.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

namespace crossres {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "InvalidDimension";
    case ErrorKind::EmbedMismatch: return "EmbedMismatch";
    case ErrorKind::TermShapeError: return "TermShapeError";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::EmptySpec: return "EmptySpec";
    case ErrorKind::HeterogeneousTerms: return "HeterogeneousTerms";
    case ErrorKind::NoResonance: return "NoResonance";
    case ErrorKind::SpecMismatch: return "SpecMismatch";
    case ErrorKind::DegenerateDressing: return "DegenerateDressing";
    case ErrorKind::StepTooCoarse: return "StepTooCoarse";
    case ErrorKind::NormalizationError: return "NormalizationError";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NotProjector: return "NotProjector";
    case ErrorKind::EmptySweep: return "EmptySweep";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

std::size_t layout_dim(const Layout& layout) {
  return std::accumulate(layout.begin(), layout.end(), std::size_t{1},
                         std::multiplies<>());
}

void require_same_layout(const Operator& a, const Operator& b, const char* what) {
  if (a.layout() != b.layout()) {
    throw Error(ErrorKind::EmbedMismatch, std::string(what) + ": operator layouts differ");
  }
}

Matrix identity_matrix(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return Matrix::Identity(n, n);
}

}  // namespace

HilbertSpec::HilbertSpec(std::vector<std::size_t> mode_dims)
    : mode_dims_(std::move(mode_dims)), total_dim_(2) {
  if (mode_dims_.empty()) {
    throw Error(ErrorKind::InvalidDimension, "at least one mode is required");
  }
  for (std::size_t d : mode_dims_) {
    if (d < 2) {
      throw Error(ErrorKind::InvalidDimension,
                  "mode dimension " + std::to_string(d) + " is below 2");
    }
    total_dim_ *= d;
  }
}

Layout HilbertSpec::layout() const {
  Layout out{2};
  out.insert(out.end(), mode_dims_.begin(), mode_dims_.end());
  return out;
}

Operator::Operator(Layout layout, Matrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {
  const std::size_t dim = layout_dim(layout_);
  if (matrix_.rows() != matrix_.cols() || static_cast<std::size_t>(matrix_.rows()) != dim) {
    throw Error(ErrorKind::InvalidDimension,
                "matrix shape " + std::to_string(matrix_.rows()) + "x" +
                    std::to_string(matrix_.cols()) + " does not match layout dimension " +
                    std::to_string(dim));
  }
}

Operator Operator::identity(Layout layout) {
  const std::size_t dim = layout_dim(layout);
  return Operator(std::move(layout), identity_matrix(dim));
}

Operator Operator::zero(Layout layout) {
  const auto n = static_cast<Eigen::Index>(layout_dim(layout));
  return Operator(std::move(layout), Matrix::Zero(n, n));
}

Operator Operator::adjoint() const { return Operator(layout_, matrix_.adjoint()); }

bool Operator::is_hermitian(double tol) const {
  return hermiticity_defect(matrix_) <= tol * std::max(1.0, max_abs(matrix_));
}

bool Operator::is_unitary(double tol) const { return unitarity_defect(matrix_) <= tol; }

Operator& Operator::operator+=(const Operator& rhs) {
  require_same_layout(*this, rhs, "operator+");
  matrix_ += rhs.matrix_;
  return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
  require_same_layout(*this, rhs, "operator-");
  matrix_ -= rhs.matrix_;
  return *this;
}

Operator& Operator::operator*=(Complex scale) {
  matrix_ *= scale;
  return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  require_same_layout(lhs, rhs, "operator*");
  return Operator(lhs.layout_, lhs.matrix_ * rhs.matrix_);
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

Operator kron(const Operator& a, const Operator& b) {
  Layout layout = a.layout();
  layout.insert(layout.end(), b.layout().begin(), b.layout().end());
  return Operator(std::move(layout), Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval());
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double hermiticity_defect(const Matrix& m) { return max_abs(m - m.adjoint()); }

double unitarity_defect(const Matrix& m) {
  return max_abs(m.adjoint() * m - Matrix::Identity(m.rows(), m.cols()));
}

Operator ladder(Ladder kind, std::size_t dim) {
  if (dim < 2) {
    throw Error(ErrorKind::InvalidDimension,
                "ladder operators need dim >= 2, got " + std::to_string(dim));
  }
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  switch (kind) {
    case Ladder::annihilate: return Operator({dim}, std::move(a));
    case Ladder::create: return Operator({dim}, a.adjoint());
    case Ladder::number: {
      // Exact integers rather than sqrt(k)^2.
      Matrix num = Matrix::Zero(n, n);
      for (Eigen::Index k = 0; k < n; ++k) num(k, k) = static_cast<double>(k);
      return Operator({dim}, std::move(num));
    }
  }
  return Operator::zero({dim});
}

Operator qubit_operator(QubitOp kind, double theta) {
  Matrix m = Matrix::Zero(2, 2);
  const double s = std::sin(theta / 2.0);
  const double c = std::cos(theta / 2.0);
  switch (kind) {
    case QubitOp::sz:
      m(0, 0) = -1.0;
      m(1, 1) = 1.0;
      break;
    case QubitOp::sx:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case QubitOp::splus:  // |e><g|
      m(1, 0) = 1.0;
      break;
    case QubitOp::sminus:  // |g><e|
      m(0, 1) = 1.0;
      break;
    case QubitOp::proj_dressed_plus: {
      Eigen::Vector2cd v(s, c);
      m = v * v.adjoint();
      break;
    }
    case QubitOp::proj_dressed_minus: {
      Eigen::Vector2cd v(c, -s);
      m = v * v.adjoint();
      break;
    }
  }
  return Operator({2}, std::move(m));
}

Operator embed(const Operator& op, Slot slot, const HilbertSpec& spec) {
  const Layout full = spec.layout();
  const std::size_t factor = slot.factor_index();
  if (factor >= full.size()) {
    throw Error(ErrorKind::EmbedMismatch,
                "slot " + std::to_string(factor) + " is outside a space of " +
                    std::to_string(full.size()) + " factors");
  }
  if (op.layout() != Layout{full[factor]}) {
    throw Error(ErrorKind::EmbedMismatch,
                "operator of dimension " + std::to_string(op.dim()) +
                    " does not fit factor of dimension " + std::to_string(full[factor]));
  }
  std::size_t before = 1;
  std::size_t after = 1;
  for (std::size_t i = 0; i < full.size(); ++i) {
    if (i < factor) before *= full[i];
    if (i > factor) after *= full[i];
  }
  Matrix m = Eigen::kroneckerProduct(
      identity_matrix(before),
      Eigen::kroneckerProduct(op.matrix(), identity_matrix(after)).eval());
  return Operator(full, std::move(m));
}

Operator embed_modes(const Operator& op, const HilbertSpec& spec) {
  if (op.layout() != spec.mode_layout()) {
    throw Error(ErrorKind::EmbedMismatch, "operator does not act on the mode space");
  }
  return kron(Operator::identity({2}), op);
}

Operator qubit_tensor_modes(const Operator& qubit_part, const Operator& mode_part,
                            const HilbertSpec& spec) {
  if (qubit_part.layout() != Layout{2} || mode_part.layout() != spec.mode_layout()) {
    throw Error(ErrorKind::EmbedMismatch, "qubit/mode factors do not match the space");
  }
  return kron(qubit_part, mode_part);
}

Operator monomial_modes(const InteractionTerm& term, const HilbertSpec& spec) {
  if (term.exponents.size() != spec.num_modes()) {
    throw Error(ErrorKind::TermShapeError,
                "term has " + std::to_string(term.exponents.size()) +
                    " exponent pairs for " + std::to_string(spec.num_modes()) + " modes");
  }
  Matrix acc = Matrix::Identity(1, 1);
  for (std::size_t k = 0; k < spec.num_modes(); ++k) {
    const ModeExponent& e = term.exponents[k];
    if (e.annihilate < 0 || e.create < 0) {
      throw Error(ErrorKind::TermShapeError, "negative exponent on mode " + std::to_string(k));
    }
    const std::size_t d = spec.mode_dim(k);
    const Matrix a = ladder(Ladder::annihilate, d).matrix();
    const Matrix ad = a.adjoint();
    Matrix factor = identity_matrix(d);
    for (int i = 0; i < e.annihilate; ++i) factor = factor * a;
    for (int i = 0; i < e.create; ++i) factor = factor * ad;
    acc = Eigen::kroneckerProduct(acc, factor).eval();
  }
  return Operator(spec.mode_layout(), std::move(acc));
}

Operator monomial_operator(const InteractionTerm& term, const HilbertSpec& spec) {
  return embed_modes(monomial_modes(term, spec), spec);
}

HermitianPropagator::HermitianPropagator(const Operator& hamiltonian)
    : layout_(hamiltonian.layout()) {
  if (!hamiltonian.is_hermitian(1e-10)) {
    throw Error(ErrorKind::NotHermitian,
                "generator deviates from Hermitian by " +
                    std::to_string(hermiticity_defect(hamiltonian.matrix())));
  }
  // Symmetrise so the solver sees an exactly Hermitian matrix.
  const Matrix h = 0.5 * (hamiltonian.matrix() + hamiltonian.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  energies_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

Operator HermitianPropagator::at(double t) const {
  if (t == 0.0) return Operator::identity(layout_);
  Vector phases(energies_.size());
  for (Eigen::Index i = 0; i < energies_.size(); ++i) {
    phases(i) = std::exp(-kI * energies_(i) * t);
  }
  return Operator(layout_, eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint());
}

Operator expm_i(const Operator& hamiltonian, double t) {
  return HermitianPropagator(hamiltonian).at(t);
}

std::size_t mode_index(std::span<const std::size_t> occupations,
                       std::span<const std::size_t> dims) {
  if (occupations.size() != dims.size()) {
    throw Error(ErrorKind::SpecMismatch, "occupation list does not match mode count");
  }
  std::size_t index = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (occupations[k] >= dims[k]) {
      throw Error(ErrorKind::InvalidDimension,
                  "occupation " + std::to_string(occupations[k]) + " exceeds truncation of mode " +
                      std::to_string(k));
    }
    index = index * dims[k] + occupations[k];
  }
  return index;
}

Vector product_state(const Vector& qubit, std::span<const std::size_t> occupations,
                     const HilbertSpec& spec) {
  if (qubit.size() != 2) {
    throw Error(ErrorKind::InvalidDimension, "qubit vector must have two components");
  }
  const std::size_t idx = mode_index(occupations, spec.mode_dims());
  const auto modes = static_cast<Eigen::Index>(spec.modes_dim());
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(spec.total_dim()));
  psi(static_cast<Eigen::Index>(idx)) = qubit(0);
  psi(modes + static_cast<Eigen::Index>(idx)) = qubit(1);
  return psi;
}

}  // namespace crossres
