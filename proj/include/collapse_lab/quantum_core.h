// Copyright 2026 The Collapse Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COLLAPSE_LAB_QUANTUM_CORE_H
#define COLLAPSE_LAB_QUANTUM_CORE_H

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace collapse_lab {

using Complex = std::complex<double>;
/// Subsystem dimensions. Subsystem 0 is the most significant (row-major) index.
using Dims = std::vector<size_t>;

/// Product of the subsystem dimensions. Throws DimensionError on an empty list or a zero entry.
size_t total_dimension(std::span<const size_t> dims);

/// Pure state over a tensor-product basis.
///
/// Joint basis index of (i_0, i_1, ..., i_{k-1}) is
/// ((i_0 * d_1 + i_1) * d_2 + i_2) ... which is the row-major convention
/// used everywhere in the library.
class StateVector {
   public:
    StateVector(Dims dims, Eigen::VectorXcd amplitudes);

    /// Computational basis vector |index> over `dims`.
    static StateVector basis(Dims dims, size_t index);

    const Dims &dims() const noexcept {
        return dims_;
    }
    const Eigen::VectorXcd &amplitudes() const noexcept {
        return amplitudes_;
    }
    size_t size() const noexcept {
        return static_cast<size_t>(amplitudes_.size());
    }
    Complex operator[](size_t i) const {
        return amplitudes_(static_cast<Eigen::Index>(i));
    }
    double norm_squared() const {
        return amplitudes_.squaredNorm();
    }

   private:
    Dims dims_;
    Eigen::VectorXcd amplitudes_;
};

/// Dense operator on the joint space of `dims`.
class LinearOperator {
   public:
    /// Throws DimensionError if the matrix side differs from the product of `dims`,
    /// InputError if `hermitian` is claimed but max|M - M^dagger| exceeds the algebraic tolerance.
    LinearOperator(Dims dims, Eigen::MatrixXcd matrix, bool hermitian = false);

    const Dims &dims() const noexcept {
        return dims_;
    }
    const Eigen::MatrixXcd &matrix() const noexcept {
        return matrix_;
    }
    bool is_hermitian() const noexcept {
        return hermitian_;
    }
    size_t side() const noexcept {
        return static_cast<size_t>(matrix_.rows());
    }

   private:
    Dims dims_;
    Eigen::MatrixXcd matrix_;
    bool hermitian_;
};

/// Hermitian idempotent operator; realizes a measurement outcome or a branch.
class Projector {
   public:
    /// Throws InputError unless P*P = P and P = P^dagger within the algebraic tolerance.
    Projector(Dims dims, Eigen::MatrixXcd matrix);

    /// |v><v| / <v|v>.
    static Projector onto(Dims dims, const Eigen::VectorXcd &v);
    static Projector identity(Dims dims);

    /// I - P.
    Projector complement() const;

    const Dims &dims() const noexcept {
        return op_.dims();
    }
    const Eigen::MatrixXcd &matrix() const noexcept {
        return op_.matrix();
    }
    const LinearOperator &as_operator() const noexcept {
        return op_;
    }

   private:
    struct Unchecked {};
    Projector(Unchecked, LinearOperator op) : op_(std::move(op)) {
    }
    LinearOperator op_;
};

/// Kronecker product of two dense matrices.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b);

StateVector tensor_product(const StateVector &a, const StateVector &b);
LinearOperator tensor_product(const LinearOperator &a, const LinearOperator &b);

/// I (x) ... (x) local (x) ... (x) I, with `local` acting on `subsystem` of `dims`.
Eigen::MatrixXcd embed(const Eigen::MatrixXcd &local, size_t subsystem, const Dims &dims);
Projector embed(const Projector &local, size_t subsystem, const Dims &dims);

/// Throws NormalizationError when the squared norm is at or below 1e-30.
StateVector normalize(const StateVector &s);

/// <s|P|s>. The state must be normalized.
double born_weight(const StateVector &s, const Projector &p);

/// P|s> / |P|s>|. Throws NullOutcomeError when the Born weight is at or below 1e-15.
StateVector project_and_renormalize(const StateVector &s, const Projector &p);

/// Outcome probabilities of a complete projector family acting on one subsystem.
///
/// Computed from the reduced density matrix of `subsystem`, not by embedding,
/// so it serves as an independent route to born_weight.
std::vector<double> marginal_distribution(const StateVector &s, size_t subsystem, std::span<const Projector> basis);

struct LocalOperator {
    size_t subsystem;
    Eigen::MatrixXcd matrix;
};

struct CommutatorReport {
    /// Largest entry magnitude of the embedded commutator.
    double max_entry;
    /// Both operators were assigned to the same subsystem.
    bool same_site;
};

CommutatorReport local_commutator_norm(const LocalOperator &a, const LocalOperator &b, const Dims &dims);

double max_abs_entry(const Eigen::MatrixXcd &m);

namespace spin {

Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_y();
Eigen::Matrix2cd pauli_z();

/// Projector onto spin +1 (or -1) along the direction at angle `theta` from z in the x-z plane.
Projector along(double theta, bool up);

/// {P_up, P_down} along `theta`.
std::vector<Projector> basis_along(double theta);

/// (|01> - |10>) / sqrt(2).
StateVector singlet();

}  // namespace spin

}  // namespace collapse_lab

#endif
