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

#include "collapse_lab/quantum_core.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "collapse_lab/errors.h"
#include "collapse_lab/tolerances.h"

namespace collapse_lab {

namespace {

Eigen::Index side_of(const Dims &dims) {
    return static_cast<Eigen::Index>(total_dimension(dims));
}

std::string dims_str(const Dims &dims) {
    std::string out = "[";
    for (size_t k = 0; k < dims.size(); k++) {
        out += (k ? "," : "") + std::to_string(dims[k]);
    }
    return out + "]";
}

void require_same_dims(const Dims &a, const Dims &b, const char *what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": dims " + dims_str(a) + " vs " + dims_str(b));
    }
}

void require_normalized(const StateVector &s, const char *what) {
    if (std::abs(s.norm_squared() - 1.0) > tol::kAccumulated) {
        throw NormalizationError(std::string(what) + ": state is not normalized");
    }
}

}  // namespace

size_t total_dimension(std::span<const size_t> dims) {
    if (dims.empty()) {
        throw DimensionError("empty subsystem dimension list");
    }
    size_t n = 1;
    for (size_t d : dims) {
        if (d == 0) {
            throw DimensionError("subsystem dimension must be positive");
        }
        n *= d;
    }
    return n;
}

StateVector::StateVector(Dims dims, Eigen::VectorXcd amplitudes) : dims_(std::move(dims)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != side_of(dims_)) {
        throw DimensionError(
            "amplitude count " + std::to_string(amplitudes_.size()) + " does not match dims " + dims_str(dims_));
    }
    if (!amplitudes_.allFinite()) {
        throw InputError("non-finite amplitude");
    }
}

StateVector StateVector::basis(Dims dims, size_t index) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(side_of(dims));
    if (static_cast<Eigen::Index>(index) >= v.size()) {
        throw DimensionError("basis index out of range");
    }
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(std::move(dims), std::move(v));
}

double max_abs_entry(const Eigen::MatrixXcd &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

LinearOperator::LinearOperator(Dims dims, Eigen::MatrixXcd matrix, bool hermitian)
    : dims_(std::move(dims)), matrix_(std::move(matrix)), hermitian_(hermitian) {
    Eigen::Index n = side_of(dims_);
    if (matrix_.rows() != n || matrix_.cols() != n) {
        throw DimensionError("operator side does not match dims " + dims_str(dims_));
    }
    if (!matrix_.allFinite()) {
        throw InputError("non-finite operator entry");
    }
    if (hermitian_ && max_abs_entry(matrix_ - matrix_.adjoint()) > tol::kAlgebraic) {
        throw InputError("operator claimed hermitian but is not");
    }
}

Projector::Projector(Dims dims, Eigen::MatrixXcd matrix) : op_(std::move(dims), std::move(matrix), true) {
    const auto &m = op_.matrix();
    if (max_abs_entry(m * m - m) > tol::kAlgebraic) {
        throw InputError("projector is not idempotent");
    }
}

Projector Projector::onto(Dims dims, const Eigen::VectorXcd &v) {
    double n2 = v.squaredNorm();
    if (n2 <= tol::kZeroNormSquared) {
        throw NormalizationError("cannot project onto the zero vector");
    }
    Eigen::MatrixXcd m = v * v.adjoint() / n2;
    // Symmetrize away rounding so the hermitian claim is exact.
    m = (0.5 * (m + m.adjoint())).eval();
    return Projector(std::move(dims), std::move(m));
}

Projector Projector::identity(Dims dims) {
    Eigen::Index n = side_of(dims);
    return Projector(Unchecked{}, LinearOperator(std::move(dims), Eigen::MatrixXcd::Identity(n, n), true));
}

Projector Projector::complement() const {
    Eigen::Index n = static_cast<Eigen::Index>(op_.side());
    return Projector(Unchecked{}, LinearOperator(dims(), Eigen::MatrixXcd::Identity(n, n) - matrix(), true));
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

StateVector tensor_product(const StateVector &a, const StateVector &b) {
    if (a.size() == 0 || b.size() == 0) {
        throw DimensionError("tensor_product of an empty state");
    }
    Dims dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    Eigen::VectorXcd v(a.amplitudes().size() * b.amplitudes().size());
    for (Eigen::Index i = 0; i < a.amplitudes().size(); i++) {
        v.segment(i * b.amplitudes().size(), b.amplitudes().size()) = a.amplitudes()(i) * b.amplitudes();
    }
    return StateVector(std::move(dims), std::move(v));
}

LinearOperator tensor_product(const LinearOperator &a, const LinearOperator &b) {
    Dims dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    return LinearOperator(std::move(dims), kron(a.matrix(), b.matrix()), a.is_hermitian() && b.is_hermitian());
}

Eigen::MatrixXcd embed(const Eigen::MatrixXcd &local, size_t subsystem, const Dims &dims) {
    if (subsystem >= dims.size()) {
        throw DimensionError("subsystem index out of range");
    }
    auto d = static_cast<Eigen::Index>(dims[subsystem]);
    if (local.rows() != d || local.cols() != d) {
        throw DimensionError("local operator does not match subsystem dimension");
    }
    size_t left = 1;
    size_t right = 1;
    for (size_t k = 0; k < subsystem; k++) {
        left *= dims[k];
    }
    for (size_t k = subsystem + 1; k < dims.size(); k++) {
        right *= dims[k];
    }
    auto l = static_cast<Eigen::Index>(left);
    auto r = static_cast<Eigen::Index>(right);
    return kron(kron(Eigen::MatrixXcd::Identity(l, l), local), Eigen::MatrixXcd::Identity(r, r));
}

Projector embed(const Projector &local, size_t subsystem, const Dims &dims) {
    if (local.dims().size() != 1) {
        throw DimensionError("embed expects a single-subsystem projector");
    }
    return Projector(dims, embed(local.matrix(), subsystem, dims));
}

StateVector normalize(const StateVector &s) {
    double n2 = s.norm_squared();
    if (!(n2 > tol::kZeroNormSquared)) {
        throw NormalizationError("cannot normalize a zero vector");
    }
    return StateVector(s.dims(), s.amplitudes() / std::sqrt(n2));
}

double born_weight(const StateVector &s, const Projector &p) {
    require_same_dims(s.dims(), p.dims(), "born_weight");
    require_normalized(s, "born_weight");
    Complex w = s.amplitudes().dot(p.matrix() * s.amplitudes());
    if (std::abs(w.imag()) > tol::kAlgebraic) {
        throw NumericalError("Born weight has an imaginary part");
    }
    double r = w.real();
    if (r < 0.0) {
        if (r < -tol::kAlgebraic) {
            throw NumericalError("negative Born weight");
        }
        r = 0.0;
    } else if (r > 1.0) {
        if (r > 1.0 + tol::kAlgebraic) {
            throw NumericalError("Born weight exceeds one");
        }
        r = 1.0;
    }
    return r;
}

StateVector project_and_renormalize(const StateVector &s, const Projector &p) {
    double w = born_weight(s, p);
    if (w <= tol::kNullOutcome) {
        throw NullOutcomeError("projection onto a branch with zero weight");
    }
    return normalize(StateVector(s.dims(), p.matrix() * s.amplitudes()));
}

std::vector<double> marginal_distribution(const StateVector &s, size_t subsystem, std::span<const Projector> basis) {
    const Dims &dims = s.dims();
    if (subsystem >= dims.size()) {
        throw DimensionError("subsystem index out of range");
    }
    require_normalized(s, "marginal_distribution");
    auto d = static_cast<Eigen::Index>(dims[subsystem]);
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
    for (const auto &p : basis) {
        if (p.dims() != Dims{dims[subsystem]}) {
            throw DimensionError("basis projector does not act on the requested subsystem");
        }
        sum += p.matrix();
    }
    if (max_abs_entry(sum - Eigen::MatrixXcd::Identity(d, d)) > tol::kAlgebraic) {
        throw CompletenessError("projector family does not sum to the identity");
    }

    size_t left = 1;
    size_t right = 1;
    for (size_t k = 0; k < subsystem; k++) {
        left *= dims[k];
    }
    for (size_t k = subsystem + 1; k < dims.size(); k++) {
        right *= dims[k];
    }
    // rho[a][b] = sum_{l,r} psi[l,a,r] conj(psi[l,b,r])
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
    const auto &psi = s.amplitudes();
    for (size_t l = 0; l < left; l++) {
        for (Eigen::Index a = 0; a < d; a++) {
            for (Eigen::Index b = 0; b < d; b++) {
                Complex acc = 0;
                for (size_t r = 0; r < right; r++) {
                    auto ia = static_cast<Eigen::Index>((l * dims[subsystem] + a) * right + r);
                    auto ib = static_cast<Eigen::Index>((l * dims[subsystem] + b) * right + r);
                    acc += psi(ia) * std::conj(psi(ib));
                }
                rho(a, b) += acc;
            }
        }
    }

    std::vector<double> probs;
    probs.reserve(basis.size());
    for (const auto &p : basis) {
        double v = (p.matrix() * rho).trace().real();
        probs.push_back(std::max(v, 0.0));
    }
    return probs;
}

CommutatorReport local_commutator_norm(const LocalOperator &a, const LocalOperator &b, const Dims &dims) {
    Eigen::MatrixXcd ea = embed(a.matrix, a.subsystem, dims);
    Eigen::MatrixXcd eb = embed(b.matrix, b.subsystem, dims);
    Eigen::MatrixXcd c = ea * eb - eb * ea;
    return {max_abs_entry(c), a.subsystem == b.subsystem};
}

namespace spin {

Eigen::Matrix2cd pauli_x() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}

Eigen::Matrix2cd pauli_y() {
    Eigen::Matrix2cd m;
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

Eigen::Matrix2cd pauli_z() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}

Projector along(double theta, bool up) {
    if (!std::isfinite(theta)) {
        throw InputError("analyzer angle must be finite");
    }
    // Eigenvector of cos(theta) Z + sin(theta) X built directly so the projector is exact rank one.
    Eigen::Vector2cd v;
    if (up) {
        v << std::cos(theta / 2), std::sin(theta / 2);
    } else {
        v << -std::sin(theta / 2), std::cos(theta / 2);
    }
    return Projector::onto({2}, v);
}

std::vector<Projector> basis_along(double theta) {
    return {along(theta, true), along(theta, false)};
}

StateVector singlet() {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    v(1) = 1.0 / std::sqrt(2.0);
    v(2) = -1.0 / std::sqrt(2.0);
    return StateVector({2, 2}, std::move(v));
}

}  // namespace spin

}  // namespace collapse_lab
