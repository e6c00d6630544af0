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

#ifndef COLLAPSE_LAB_DYNAMICS_H
#define COLLAPSE_LAB_DYNAMICS_H

#include <functional>
#include <string_view>
#include <utility>
#include <vector>

#include "collapse_lab/quantum_core.h"

namespace collapse_lab {

/// One particle axis with fixed (zero) boundaries at x = 0 and x = (n + 1) dx.
/// Natural units, hbar = 1.
struct GridSpec {
    size_t n = 64;
    double dx = 1.0;

    void validate() const;
    double position(size_t i) const noexcept {
        return static_cast<double>(i + 1) * dx;
    }
    double box_length() const noexcept {
        return static_cast<double>(n + 1) * dx;
    }
};

/// V(d) as a piecewise-linear function of interparticle distance.
///
/// Text form: one "distance energy" pair per line, '#' starts a comment.
/// Distances must be strictly increasing; beyond the table the end values are held.
class PotentialTable {
   public:
    explicit PotentialTable(std::vector<std::pair<double, double>> points);
    static PotentialTable parse(std::string_view text);

    double operator()(double distance) const;
    const std::vector<std::pair<double, double>> &points() const noexcept {
        return points_;
    }

   private:
    std::vector<std::pair<double, double>> points_;
};

struct TwoParticleSystem {
    double m1 = 1.0;
    double m2 = 1.0;
    GridSpec grid;
    /// V at grid distances k * dx, k = 0 .. n - 1.
    std::vector<double> potential;
    /// Rest energies (same energy unit as the model).
    double rest_energy1 = 0.0;
    double rest_energy2 = 0.0;

    static TwoParticleSystem make(double m1, double m2, GridSpec grid, const std::function<double(double)> &v,
                                  double rest_energy1 = 0.0, double rest_energy2 = 0.0);

    /// Throws InputError for a bad grid, nonpositive masses, or a non-finite potential.
    void validate() const;

    Dims dims() const {
        return {grid.n, grid.n};
    }
    double v_between(size_t i, size_t j) const {
        return potential[i > j ? i - j : j - i];
    }
};

/// Tridiagonal central-difference kinetic matrix for one particle.
Eigen::MatrixXd kinetic_matrix(const GridSpec &grid, double mass);

/// H = T1 (x) I + I (x) T2 + V(|x1 - x2|) as a dense operator over dims {n, n}.
LinearOperator build_hamiltonian(const TwoParticleSystem &sys);

/// H|psi> without forming the dense matrix.
Eigen::VectorXcd apply_hamiltonian(const TwoParticleSystem &sys, const Eigen::VectorXcd &psi);

double energy_expectation(const StateVector &s, const TwoParticleSystem &sys);
double kinetic_expectation(const StateVector &s, const TwoParticleSystem &sys);
double interaction_expectation(const StateVector &s, const TwoParticleSystem &sys);

/// <H> over a dense operator.
double energy_expectation(const StateVector &s, const LinearOperator &h);

/// exp(-i H dt) by eigendecomposition of `h`. Recomputes the decomposition on every call.
StateVector unitary_step(const StateVector &s, const LinearOperator &h, double dt);

/// Reusable time-evolution operator.
///
/// Exact (eigendecomposition) up to kExactLimit joint dimensions; beyond that a
/// two-particle system uses second-order split-step: half potential kick, exact
/// kinetic propagation factorized per particle, half potential kick.
class Propagator {
   public:
    static constexpr size_t kExactLimit = 1024;

    static Propagator exact(const LinearOperator &h);
    static Propagator for_system(const TwoParticleSystem &sys);

    StateVector step(const StateVector &s, double dt) const;
    bool is_exact() const noexcept {
        return exact_;
    }

   private:
    Propagator() = default;

    bool exact_ = true;
    Dims dims_;
    // Exact route.
    Eigen::MatrixXcd eigenvectors_;
    Eigen::VectorXd eigenvalues_;
    // Split-step route.
    size_t n_ = 0;
    Eigen::MatrixXd q1_, q2_;
    Eigen::VectorXd lam1_, lam2_;
    Eigen::MatrixXd v_grid_;
};

struct ShiftMagnitude {
    double g;
    /// g exceeded the 1e-3 calibration gate.
    bool calibration_warning;
};

/// |<V>| / E_total_rel. Throws InputError unless e_total_rel > 0.
ShiftMagnitude shift_magnitude(double v_expectation, double e_total_rel);

/// |d<V>/dt| / E_cm. Throws InputError unless e_cm > 0.
double timing_rate(double dv_dt, double e_cm);

/// Planck constant over 2 pi in eV s.
inline constexpr double kHbarEvSeconds = 6.582119569e-16;

/// hbar / E: the time over which an interaction of energy scale E (eV) acts.
double interaction_time_seconds(double energy_ev);

struct TraceSample {
    double t;
    double v;
    double kinetic;
    /// dtau/dt in effect from this sample onward.
    double rate;
    double tau;
};

/// Time series of interaction observables and the accumulated timing parameter.
class InteractionTrace {
   public:
    explicit InteractionTrace(double tau_step = 1.0 / 64.0);

    /// Resets to a single sample at t0 with tau = 0.
    void start(double t0, double v, double kinetic, double rate);
    /// Overwrites the observables of the newest sample (tau and t unchanged).
    void set_observables(double v, double kinetic, double rate);

    const std::vector<TraceSample> &samples() const noexcept {
        return samples_;
    }
    const TraceSample &last() const;
    double tau() const {
        return last().tau;
    }
    double tau_step() const noexcept {
        return tau_step_;
    }
    /// Sample index at which each reduction step became due, one entry per tau_step crossed.
    const std::vector<size_t> &reductions_due() const noexcept {
        return reductions_due_;
    }

   private:
    friend InteractionTrace accumulate_tau(InteractionTrace trace, double dt);

    double tau_step_;
    std::vector<TraceSample> samples_;
    std::vector<size_t> reductions_due_;
};

/// Advances the trace by dt at the newest sample's rate, flagging any tau_step crossings.
/// Throws InputError on negative dt; dt == 0 returns the trace unchanged.
InteractionTrace accumulate_tau(InteractionTrace trace, double dt);

enum class ShiftMode { instantaneous, peak };

/// Shift magnitude for trace sample `index` (or for the peak |<V>| of the whole trace),
/// using rest energies plus the nonrelativistic energy `e_nr` as the total relativistic energy.
ShiftMagnitude trace_shift_magnitude(const InteractionTrace &trace, size_t index, const TwoParticleSystem &sys, double e_nr,
                                     ShiftMode mode = ShiftMode::instantaneous);

/// Head-on collision of two Gaussian packets against a Gaussian repulsive barrier.
///
/// The defaults are the calibrated model event: barrier height 0.6 (about
/// 1.23 times the center-of-mass energy) and range 2.5 grid units produce an
/// integrated timing parameter near 1 once the packets have separated.
struct ScatteringScenario {
    GridSpec grid{64, 1.0};
    double mass = 1.0;
    double barrier_height = 0.6;
    double barrier_range = 2.5;
    double packet_width = 3.5;
    double wavenumber = 0.7;
    double x1 = 20.0;
    double x2 = 45.0;
    double dt = 0.05;
    double duration = 40.0;
    double tau_step = 1.0 / 64.0;
    /// Rest energy of each particle, in model energy units.
    double rest_energy = 0.0;
};

struct ScatteringResult {
    TwoParticleSystem system;
    InteractionTrace trace;
    /// Center-of-mass nonrelativistic energy (<H> with zero total momentum).
    double e_cm;
    double peak_v;
    double final_norm;
    double final_energy;
};

TwoParticleSystem scattering_system(const ScatteringScenario &scenario);
StateVector scattering_initial_state(const ScatteringScenario &scenario);
ScatteringResult simulate_scattering(const ScatteringScenario &scenario);

}  // namespace collapse_lab

#endif
