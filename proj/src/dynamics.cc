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

#include "collapse_lab/dynamics.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "collapse_lab/errors.h"
#include "collapse_lab/tolerances.h"

namespace collapse_lab {

namespace {

using RowMajorGrid = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_system_dims(const StateVector &s, const TwoParticleSystem &sys) {
    if (s.dims() != sys.dims()) {
        throw DimensionError("state dims do not match the two-particle grid");
    }
}

Eigen::MatrixXcd phase_propagator(const Eigen::MatrixXd &q, const Eigen::VectorXd &lam, double dt) {
    Eigen::VectorXcd phases(lam.size());
    for (Eigen::Index k = 0; k < lam.size(); k++) {
        phases(k) = std::polar(1.0, -lam(k) * dt);
    }
    return q.cast<Complex>() * phases.asDiagonal() * q.transpose().cast<Complex>();
}

double total_momentum_expectation(const StateVector &s, const TwoParticleSystem &sys) {
    size_t n = sys.grid.n;
    double dx = sys.grid.dx;
    const auto &psi = s.amplitudes();
    auto at = [&](size_t i, size_t j) -> Complex {
        return psi(static_cast<Eigen::Index>(i * n + j));
    };
    // Central-difference -i d/dx for each particle, zero outside the box.
    Complex acc = 0;
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < n; j++) {
            Complex d1 = (i + 1 < n ? at(i + 1, j) : 0.0) - (i > 0 ? at(i - 1, j) : 0.0);
            Complex d2 = (j + 1 < n ? at(i, j + 1) : 0.0) - (j > 0 ? at(i, j - 1) : 0.0);
            acc += std::conj(at(i, j)) * Complex(0, -1) * (d1 + d2) / (2 * dx);
        }
    }
    return acc.real();
}

}  // namespace

void GridSpec::validate() const {
    if (n < 8) {
        throw InputError("grid needs at least 8 points per axis");
    }
    if (!(dx > 0.0) || !std::isfinite(dx)) {
        throw InputError("grid spacing must be positive");
    }
}

PotentialTable::PotentialTable(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
    if (points_.empty()) {
        throw InputError("potential table is empty");
    }
    for (size_t k = 0; k < points_.size(); k++) {
        if (!std::isfinite(points_[k].first) || !std::isfinite(points_[k].second)) {
            throw InputError("potential table entry " + std::to_string(k) + " is not finite");
        }
        if (points_[k].first < 0.0) {
            throw InputError("potential table distance must be nonnegative");
        }
        if (k > 0 && !(points_[k].first > points_[k - 1].first)) {
            throw InputError("potential table distances must be strictly increasing");
        }
    }
}

PotentialTable PotentialTable::parse(std::string_view text) {
    std::vector<std::pair<double, double>> points;
    std::istringstream in{std::string(text)};
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        double d, v;
        if (!(fields >> d)) {
            continue;
        }
        std::string extra;
        if (!(fields >> v) || (fields >> extra)) {
            throw InputError("potential table line " + std::to_string(line_no) + ": expected 'distance energy'");
        }
        points.emplace_back(d, v);
    }
    return PotentialTable(std::move(points));
}

double PotentialTable::operator()(double distance) const {
    if (distance <= points_.front().first) {
        return points_.front().second;
    }
    if (distance >= points_.back().first) {
        return points_.back().second;
    }
    auto hi = std::upper_bound(points_.begin(), points_.end(), distance,
                               [](double d, const std::pair<double, double> &p) { return d < p.first; });
    auto lo = hi - 1;
    double f = (distance - lo->first) / (hi->first - lo->first);
    return lo->second + f * (hi->second - lo->second);
}

TwoParticleSystem TwoParticleSystem::make(double m1, double m2, GridSpec grid, const std::function<double(double)> &v,
                                          double rest_energy1, double rest_energy2) {
    TwoParticleSystem sys;
    sys.m1 = m1;
    sys.m2 = m2;
    sys.grid = grid;
    sys.rest_energy1 = rest_energy1;
    sys.rest_energy2 = rest_energy2;
    sys.potential.resize(grid.n);
    for (size_t k = 0; k < grid.n; k++) {
        sys.potential[k] = v(static_cast<double>(k) * grid.dx);
    }
    sys.validate();
    return sys;
}

void TwoParticleSystem::validate() const {
    grid.validate();
    if (!(m1 > 0.0) || !(m2 > 0.0)) {
        throw InputError("particle masses must be positive");
    }
    if (potential.size() != grid.n) {
        throw InputError("potential table must have one entry per grid distance");
    }
    for (double v : potential) {
        if (!std::isfinite(v)) {
            throw InputError("potential has a non-finite entry");
        }
    }
}

Eigen::MatrixXd kinetic_matrix(const GridSpec &grid, double mass) {
    grid.validate();
    auto n = static_cast<Eigen::Index>(grid.n);
    double c = 1.0 / (2.0 * mass * grid.dx * grid.dx);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; i++) {
        t(i, i) = 2 * c;
        if (i + 1 < n) {
            t(i, i + 1) = -c;
            t(i + 1, i) = -c;
        }
    }
    return t;
}

LinearOperator build_hamiltonian(const TwoParticleSystem &sys) {
    sys.validate();
    size_t n = sys.grid.n;
    Eigen::MatrixXcd t1 = kinetic_matrix(sys.grid, sys.m1).cast<Complex>();
    Eigen::MatrixXcd t2 = kinetic_matrix(sys.grid, sys.m2).cast<Complex>();
    auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXcd h = kron(t1, Eigen::MatrixXcd::Identity(ni, ni)) + kron(Eigen::MatrixXcd::Identity(ni, ni), t2);
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < n; j++) {
            auto k = static_cast<Eigen::Index>(i * n + j);
            h(k, k) += sys.v_between(i, j);
        }
    }
    return LinearOperator(sys.dims(), std::move(h), true);
}

Eigen::VectorXcd apply_hamiltonian(const TwoParticleSystem &sys, const Eigen::VectorXcd &psi) {
    size_t n = sys.grid.n;
    if (static_cast<size_t>(psi.size()) != n * n) {
        throw DimensionError("wavefunction size does not match the grid");
    }
    double c1 = 1.0 / (2.0 * sys.m1 * sys.grid.dx * sys.grid.dx);
    double c2 = 1.0 / (2.0 * sys.m2 * sys.grid.dx * sys.grid.dx);
    Eigen::VectorXcd out(psi.size());
    auto at = [&](size_t i, size_t j) -> Complex {
        return psi(static_cast<Eigen::Index>(i * n + j));
    };
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < n; j++) {
            Complex p = at(i, j);
            Complex lap1 = 2.0 * p - (i > 0 ? at(i - 1, j) : 0.0) - (i + 1 < n ? at(i + 1, j) : 0.0);
            Complex lap2 = 2.0 * p - (j > 0 ? at(i, j - 1) : 0.0) - (j + 1 < n ? at(i, j + 1) : 0.0);
            out(static_cast<Eigen::Index>(i * n + j)) = c1 * lap1 + c2 * lap2 + sys.v_between(i, j) * p;
        }
    }
    return out;
}

double energy_expectation(const StateVector &s, const TwoParticleSystem &sys) {
    require_system_dims(s, sys);
    return s.amplitudes().dot(apply_hamiltonian(sys, s.amplitudes())).real();
}

double interaction_expectation(const StateVector &s, const TwoParticleSystem &sys) {
    require_system_dims(s, sys);
    size_t n = sys.grid.n;
    double acc = 0;
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < n; j++) {
            acc += std::norm(s[i * n + j]) * sys.v_between(i, j);
        }
    }
    return acc;
}

double kinetic_expectation(const StateVector &s, const TwoParticleSystem &sys) {
    return energy_expectation(s, sys) - interaction_expectation(s, sys);
}

double energy_expectation(const StateVector &s, const LinearOperator &h) {
    if (s.dims() != h.dims()) {
        throw DimensionError("state dims do not match the operator");
    }
    return s.amplitudes().dot(h.matrix() * s.amplitudes()).real();
}

StateVector unitary_step(const StateVector &s, const LinearOperator &h, double dt) {
    if (s.dims() != h.dims()) {
        throw DimensionError("state dims do not match the Hamiltonian");
    }
    if (!(dt >= 0.0)) {
        throw InputError("time step must be nonnegative");
    }
    if (dt == 0.0) {
        return s;
    }
    return Propagator::exact(h).step(s, dt);
}

Propagator Propagator::exact(const LinearOperator &h) {
    if (!h.is_hermitian()) {
        throw InputError("propagator needs a hermitian operator");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h.matrix());
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition failed");
    }
    Propagator p;
    p.exact_ = true;
    p.dims_ = h.dims();
    p.eigenvectors_ = eig.eigenvectors();
    p.eigenvalues_ = eig.eigenvalues();
    return p;
}

Propagator Propagator::for_system(const TwoParticleSystem &sys) {
    sys.validate();
    size_t n = sys.grid.n;
    if (n * n <= kExactLimit) {
        return exact(build_hamiltonian(sys));
    }
    Propagator p;
    p.exact_ = false;
    p.dims_ = sys.dims();
    p.n_ = n;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e1(kinetic_matrix(sys.grid, sys.m1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e2(kinetic_matrix(sys.grid, sys.m2));
    if (e1.info() != Eigen::Success || e2.info() != Eigen::Success) {
        throw NumericalError("kinetic eigendecomposition failed");
    }
    p.q1_ = e1.eigenvectors();
    p.lam1_ = e1.eigenvalues();
    p.q2_ = e2.eigenvectors();
    p.lam2_ = e2.eigenvalues();
    auto ni = static_cast<Eigen::Index>(n);
    p.v_grid_.resize(ni, ni);
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < n; j++) {
            p.v_grid_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sys.v_between(i, j);
        }
    }
    return p;
}

StateVector Propagator::step(const StateVector &s, double dt) const {
    if (s.dims() != dims_) {
        throw DimensionError("state dims do not match the propagator");
    }
    if (!(dt >= 0.0)) {
        throw InputError("time step must be nonnegative");
    }
    if (dt == 0.0) {
        return s;
    }
    if (exact_) {
        Eigen::VectorXcd c = eigenvectors_.adjoint() * s.amplitudes();
        for (Eigen::Index k = 0; k < c.size(); k++) {
            c(k) *= std::polar(1.0, -eigenvalues_(k) * dt);
        }
        return StateVector(dims_, eigenvectors_ * c);
    }
    auto ni = static_cast<Eigen::Index>(n_);
    RowMajorGrid psi = Eigen::Map<const RowMajorGrid>(s.amplitudes().data(), ni, ni);
    RowMajorGrid kick(ni, ni);
    for (Eigen::Index i = 0; i < ni; i++) {
        for (Eigen::Index j = 0; j < ni; j++) {
            kick(i, j) = std::polar(1.0, -0.5 * v_grid_(i, j) * dt);
        }
    }
    psi = psi.cwiseProduct(kick);
    psi = phase_propagator(q1_, lam1_, dt) * psi * phase_propagator(q2_, lam2_, dt).transpose();
    psi = psi.cwiseProduct(kick);
    Eigen::VectorXcd out = Eigen::Map<const Eigen::VectorXcd>(psi.data(), ni * ni);
    return StateVector(dims_, std::move(out));
}

ShiftMagnitude shift_magnitude(double v_expectation, double e_total_rel) {
    if (!(e_total_rel > 0.0) || !std::isfinite(e_total_rel)) {
        throw InputError("total relativistic energy must be positive");
    }
    if (!std::isfinite(v_expectation)) {
        throw InputError("interaction energy must be finite");
    }
    double g = std::abs(v_expectation) / e_total_rel;
    return {g, g > tol::kShiftMagnitudeWarn};
}

double timing_rate(double dv_dt, double e_cm) {
    if (!(e_cm > 0.0) || !std::isfinite(e_cm)) {
        throw InputError("center-of-mass energy must be positive");
    }
    return std::abs(dv_dt) / e_cm;
}

double interaction_time_seconds(double energy_ev) {
    if (!(energy_ev > 0.0)) {
        throw InputError("energy scale must be positive");
    }
    return kHbarEvSeconds / energy_ev;
}

InteractionTrace::InteractionTrace(double tau_step) : tau_step_(tau_step) {
    if (!(tau_step > 0.0) || !std::isfinite(tau_step)) {
        throw InputError("tau_step must be positive");
    }
    samples_.push_back({0.0, 0.0, 0.0, 0.0, 0.0});
}

void InteractionTrace::start(double t0, double v, double kinetic, double rate) {
    if (!(rate >= 0.0)) {
        throw InputError("timing rate must be nonnegative");
    }
    samples_.assign(1, {t0, v, kinetic, rate, 0.0});
    reductions_due_.clear();
}

void InteractionTrace::set_observables(double v, double kinetic, double rate) {
    if (!(rate >= 0.0)) {
        throw InputError("timing rate must be nonnegative");
    }
    auto &s = samples_.back();
    s.v = v;
    s.kinetic = kinetic;
    s.rate = rate;
}

const TraceSample &InteractionTrace::last() const {
    return samples_.back();
}

InteractionTrace accumulate_tau(InteractionTrace trace, double dt) {
    if (!(dt >= 0.0)) {
        throw InputError("accumulate_tau needs a nonnegative dt");
    }
    if (dt == 0.0) {
        return trace;
    }
    TraceSample next = trace.samples_.back();
    double before = next.tau;
    next.t += dt;
    next.tau += next.rate * dt;
    auto crossed = static_cast<long long>(std::floor(next.tau / trace.tau_step_)) -
                   static_cast<long long>(std::floor(before / trace.tau_step_));
    trace.samples_.push_back(next);
    for (long long k = 0; k < crossed; k++) {
        trace.reductions_due_.push_back(trace.samples_.size() - 1);
    }
    return trace;
}

ShiftMagnitude trace_shift_magnitude(const InteractionTrace &trace, size_t index, const TwoParticleSystem &sys, double e_nr,
                                     ShiftMode mode) {
    const auto &samples = trace.samples();
    if (index >= samples.size()) {
        throw InputError("trace sample index out of range");
    }
    double v = samples[index].v;
    if (mode == ShiftMode::peak) {
        v = 0;
        for (const auto &s : samples) {
            v = std::max(v, std::abs(s.v));
        }
    }
    return shift_magnitude(v, sys.rest_energy1 + sys.rest_energy2 + e_nr);
}

TwoParticleSystem scattering_system(const ScatteringScenario &sc) {
    double height = sc.barrier_height;
    double range = sc.barrier_range;
    return TwoParticleSystem::make(
        sc.mass, sc.mass, sc.grid, [=](double d) { return height * std::exp(-d * d / (2 * range * range)); },
        sc.rest_energy, sc.rest_energy);
}

StateVector scattering_initial_state(const ScatteringScenario &sc) {
    sc.grid.validate();
    auto n = static_cast<Eigen::Index>(sc.grid.n);
    auto packet = [&](double center, double k) {
        Eigen::VectorXcd v(n);
        for (Eigen::Index i = 0; i < n; i++) {
            double x = sc.grid.position(static_cast<size_t>(i));
            double r = x - center;
            v(i) = std::exp(-r * r / (4 * sc.packet_width * sc.packet_width)) * std::polar(1.0, k * x);
        }
        return StateVector({sc.grid.n}, v.normalized());
    };
    return tensor_product(packet(sc.x1, sc.wavenumber), packet(sc.x2, -sc.wavenumber));
}

ScatteringResult simulate_scattering(const ScatteringScenario &sc) {
    if (!(sc.dt > 0.0) || !(sc.duration > 0.0)) {
        throw InputError("scattering needs positive dt and duration");
    }
    TwoParticleSystem sys = scattering_system(sc);
    StateVector psi = scattering_initial_state(sc);
    Propagator prop = Propagator::for_system(sys);

    double energy = energy_expectation(psi, sys);
    double p_total = total_momentum_expectation(psi, sys);
    double e_cm = energy - p_total * p_total / (2 * (sys.m1 + sys.m2));
    if (!(e_cm > 0.0)) {
        throw NumericalError("scattering scenario has nonpositive center-of-mass energy");
    }

    InteractionTrace trace(sc.tau_step);
    double v = interaction_expectation(psi, sys);
    trace.start(0.0, v, energy - v, 0.0);
    double peak = std::abs(v);
    auto steps = static_cast<size_t>(std::llround(sc.duration / sc.dt));
    for (size_t k = 0; k < steps; k++) {
        StateVector next = prop.step(psi, sc.dt);
        double v_next = interaction_expectation(next, sys);
        const auto &cur = trace.last();
        trace.set_observables(cur.v, cur.kinetic, timing_rate((v_next - cur.v) / sc.dt, e_cm));
        trace = accumulate_tau(std::move(trace), sc.dt);
        trace.set_observables(v_next, energy - v_next, 0.0);
        peak = std::max(peak, std::abs(v_next));
        psi = std::move(next);
    }
    double final_energy = energy_expectation(psi, sys);
    return ScatteringResult{std::move(sys), std::move(trace), e_cm, peak, psi.norm_squared(), final_energy};
}

}  // namespace collapse_lab
