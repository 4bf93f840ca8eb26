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

// Dense operators on a qubit coupled to truncated bosonic modes.
//
// Tensor ordering is fixed throughout the library: the qubit is the first
// factor with basis (|g>, |e>), followed by the modes in declaration order.
// A basis index is therefore q * prod(dims) + row-major index over modes,
// mode 0 being the most significant.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "crossres/errors.hpp"
#include "crossres/interaction_term.hpp"

namespace crossres {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

// Tensor factor dimensions an operator acts on, outermost first.
using Layout = std::vector<std::size_t>;

class HilbertSpec {
 public:
  explicit HilbertSpec(std::vector<std::size_t> mode_dims);

  const std::vector<std::size_t>& mode_dims() const { return mode_dims_; }
  std::size_t num_modes() const { return mode_dims_.size(); }
  std::size_t mode_dim(std::size_t mode) const { return mode_dims_.at(mode); }
  std::size_t total_dim() const { return total_dim_; }
  std::size_t modes_dim() const { return total_dim_ / 2; }

  // {2, d_0, d_1, ...}
  Layout layout() const;
  // {d_0, d_1, ...}
  Layout mode_layout() const { return mode_dims_; }

  friend bool operator==(const HilbertSpec&, const HilbertSpec&) = default;

 private:
  std::vector<std::size_t> mode_dims_;
  std::size_t total_dim_;
};

// Identifies one tensor factor of a HilbertSpec.
class Slot {
 public:
  static Slot qubit() { return Slot(0); }
  static Slot mode(std::size_t k) { return Slot(k + 1); }

  std::size_t factor_index() const { return index_; }
  bool is_qubit() const { return index_ == 0; }

 private:
  explicit Slot(std::size_t index) : index_(index) {}
  std::size_t index_;
};

class Operator {
 public:
  Operator(Layout layout, Matrix matrix);

  static Operator identity(Layout layout);
  static Operator zero(Layout layout);

  const Layout& layout() const { return layout_; }
  const Matrix& matrix() const { return matrix_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

  Operator adjoint() const;

  bool is_hermitian(double tol = 1e-10) const;
  bool is_unitary(double tol = 1e-9) const;

  Operator& operator+=(const Operator& rhs);
  Operator& operator-=(const Operator& rhs);
  Operator& operator*=(Complex scale);

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(const Operator& lhs, const Operator& rhs);
  friend Operator operator*(Operator op, Complex scale) { return op *= scale; }
  friend Operator operator*(Complex scale, Operator op) { return op *= scale; }

 private:
  Layout layout_;
  Matrix matrix_;
};

Operator commutator(const Operator& a, const Operator& b);
Operator kron(const Operator& a, const Operator& b);

// Largest absolute entry.
double max_abs(const Matrix& m);
double hermiticity_defect(const Matrix& m);
double unitarity_defect(const Matrix& m);

enum class Ladder { annihilate, create, number };

Operator ladder(Ladder kind, std::size_t dim);

enum class QubitOp { sz, sx, splus, sminus, proj_dressed_plus, proj_dressed_minus };

// `theta` is only read for the dressed projectors, where
// |+~> = sin(theta/2)|g> + cos(theta/2)|e> and
// |-~> = cos(theta/2)|g> - sin(theta/2)|e>.
Operator qubit_operator(QubitOp kind, double theta = 0.0);

Operator embed(const Operator& op, Slot slot, const HilbertSpec& spec);

// Lift an operator on the modes only (layout == spec.mode_layout()) to the
// full space as identity on the qubit.
Operator embed_modes(const Operator& op, const HilbertSpec& spec);

// qubit_part (2x2) tensor mode_part (modes only).
Operator qubit_tensor_modes(const Operator& qubit_part, const Operator& mode_part,
                            const HilbertSpec& spec);

// The monomial prod_k a_k^{m_k1} a_k^dagger^{m_k2} on the modes only, each
// mode's factor ordered annihilation first. The strength is not applied.
Operator monomial_modes(const InteractionTerm& term, const HilbertSpec& spec);

// monomial_modes lifted to the full space.
Operator monomial_operator(const InteractionTerm& term, const HilbertSpec& spec);

// e^{-iHt} through the Hermitian eigendecomposition of H.
Operator expm_i(const Operator& hamiltonian, double t);

// Eigendecomposition cached so that e^{-iHt} can be produced for many t.
class HermitianPropagator {
 public:
  explicit HermitianPropagator(const Operator& hamiltonian);
  Operator at(double t) const;

 private:
  Layout layout_;
  Eigen::VectorXd energies_;
  Matrix eigenvectors_;
};

// |n_0, n_1, ...> on the modes tensored with the given qubit vector.
Vector product_state(const Vector& qubit, std::span<const std::size_t> occupations,
                     const HilbertSpec& spec);

// Row-major index of a mode occupation tuple within the modes-only space.
std::size_t mode_index(std::span<const std::size_t> occupations,
                       std::span<const std::size_t> dims);

}  // namespace crossres
