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

#ifndef COLLAPSE_LAB_EXPERIMENTS_H
#define COLLAPSE_LAB_EXPERIMENTS_H

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "collapse_lab/collapse_engine.h"
#include "collapse_lab/dynamics.h"
#include "collapse_lab/global_stream.h"
#include "collapse_lab/report.h"

namespace collapse_lab {

/// Analyzer angles (radians) for the two settings of each party.
struct SettingsQuartet {
    double a = 0;
    double a_prime = 0;
    double b = 0;
    double b_prime = 0;

    /// a = 0, a' = pi/2, b = pi/4, b' = 3 pi/4.
    static SettingsQuartet standard();

    void validate() const;
    double alice(int index) const {
        return index == 0 ? a : a_prime;
    }
    double bob(int index) const {
        return index == 0 ? b : b_prime;
    }
};

/// Outcome tallies N[A][B][a setting][b setting] with A, B in {+1, -1}.
/// Setting index 0 is the unprimed setting, 1 the primed one.
class CountTable {
   public:
    uint64_t count(int outcome_a, int outcome_b, int a_setting, int b_setting) const;
    void add(int outcome_a, int outcome_b, int a_setting, int b_setting, uint64_t n = 1);
    uint64_t total(int a_setting, int b_setting) const;

    /// Pr(A = outcome | a setting, b setting). Throws InsufficientDataError on an empty pair.
    double alice_marginal(int outcome_a, int a_setting, int b_setting) const;
    double bob_marginal(int outcome_b, int a_setting, int b_setting) const;

    CountTable &operator+=(const CountTable &other);
    bool operator==(const CountTable &) const = default;

   private:
    static size_t index(int outcome_a, int outcome_b, int a_setting, int b_setting);
    std::array<uint64_t, 16> n_{};
};

/// Joint probabilities [A][B], index 0 = +1, 1 = -1.
using JointTable = std::array<std::array<double, 2>, 2>;

/// Pr(A, B) = Pr(A) Pr(B) from Pr(A = +1) = p_a and Pr(B = +1) = p_b.
JointTable factorized_joint(double p_a, double p_b);

/// Local hidden-variable model: a shared lambda and local response functions.
struct LhvModel {
    std::string name;
    std::function<double(GlobalStream &)> sample_lambda;
    std::function<int(double setting, double lambda)> response_a;
    std::function<int(double setting, double lambda)> response_b;
    /// Shared experimental context; descriptive only.
    std::string context = "common source";
};

namespace lhv {

/// A = sign(cos(a - lambda)), B = -sign(cos(b - lambda)), lambda uniform on [0, 2 pi).
LhvModel sign_cos();
/// A = B = +1.
LhvModel constant();
/// Independent fair coins for A and B carried in lambda.
LhvModel fair_coin();
/// A randomized smooth-threshold model drawn from `seed`.
LhvModel random_model(uint64_t seed);

}  // namespace lhv

/// Runs `n_per_pair` trials on every setting pair. Trial i of pair p uses substream p * n + i.
/// Throws ModelError when a response is not +1 or -1.
CountTable lhv_run(const LhvModel &model, const SettingsQuartet &quartet, uint64_t n_per_pair, uint64_t seed,
                   size_t workers = 0);

/// (N++ + N-- - N+- - N-+) / N for one setting pair.
double correlator(const CountTable &counts, int a_setting, int b_setting);

/// E(a,b) + E(a,b') + E(a',b) + E(a',b') - 2 E(minus pair).
double chsh_combination(const CountTable &counts, int minus_a_setting, int minus_b_setting);

/// CHSH value: the largest |chsh_combination| over the four placements of the minus sign.
/// Every placement obeys the local bound of 2, so the maximum does too.
double chsh_statistic(const CountTable &counts, const SettingsQuartet &quartet);

/// Standard error of the CHSH value: sqrt(sum over pairs of (1 - E^2) / N).
double chsh_sigma(const CountTable &counts);

/// max over parties, settings and outcomes of |Pr(A | a, b) - Pr(A | a, b')| (and the Bob analogue).
double no_signaling_check(const CountTable &counts);

enum class Sampler {
    /// Measurement events reduced by the collapse engine on the foliation.
    engine,
    /// One uniform draw against the Born weights; oracle fast path.
    direct_born,
};

struct QuantumRunOptions {
    CollapseParams params;
    Sampler sampler = Sampler::engine;
    size_t workers = 0;
};

/// Singlet trials; per trial two simultaneous spacelike measurement events
/// are placed on the foliation and reduced jointly.
CountTable quantum_counts(const SettingsQuartet &quartet, uint64_t n_per_pair, const QuantumRunOptions &options,
                          uint64_t seed);

ExperimentReport quantum_chsh_run(const SettingsQuartet &quartet, uint64_t n_per_pair, const QuantumRunOptions &options,
                                  uint64_t seed);

ExperimentReport lhv_chsh_report(const LhvModel &model, const SettingsQuartet &quartet, uint64_t n_per_pair,
                                 uint64_t seed, size_t workers = 0);

enum class Preparation { singlet, product };

struct OrderInvarianceConfig {
    Preparation preparation = Preparation::singlet;
    double a = 0;
    double b = 0;
    CollapseParams params;
    size_t workers = 0;
};

struct OrderInvarianceResult {
    /// Joint outcome counts [A][B] for the A-first and B-first orderings.
    std::array<std::array<uint64_t, 2>, 2> a_first{};
    std::array<std::array<uint64_t, 2>, 2> b_first{};
    double tvd;
    double threshold;
    bool pass;
};

/// Two-event schedule: source at t = 0, Alice's measurement at t = 1, Bob's at t = 2.
FoliationSchedule two_party_schedule(double a, double b);

/// Total variation distance between two count tables of equal total.
double total_variation_distance(const std::array<std::array<uint64_t, 2>, 2> &p,
                                const std::array<std::array<uint64_t, 2>, 2> &q);

/// Runs both orderings with identical per-run substreams and compares the joint distributions.
/// Threshold is 3 sqrt(k / N) with k = 4 outcome cells.
OrderInvarianceResult order_invariance_test(const OrderInvarianceConfig &config, uint64_t n_runs, uint64_t seed,
                                            const ContestRule *rule = nullptr);

ExperimentReport order_invariance_report(const OrderInvarianceConfig &config, uint64_t n_runs, uint64_t seed);

struct ConservationConfig {
    double reflectivity = 0.5;
    /// Apparatus recoil entangled with the photon branch. False builds the mutant.
    bool entangled = true;
    CollapseParams params;
    size_t workers = 0;
};

/// Photon momentum label for the transmitted (+1) and reflected (-1) branch,
/// apparatus recoil 0 or +2, in units of the incoming photon momentum.
inline constexpr int kInitialMomentum = 1;

ExperimentReport conservation_experiment(uint64_t n_runs, const ConservationConfig &config, uint64_t seed);

ExperimentReport born_convergence_experiment(const std::vector<double> &weights, uint64_t n_runs, double delta,
                                             uint64_t seed, size_t workers = 0);

struct CollapseTraceConfig {
    double w0 = 0.3;
    CollapseParams params;
    /// Drive reduction steps from the simulated scattering event (physical shift magnitudes).
    bool physical = false;
    ScatteringScenario scenario;
    /// Energy unit of the scattering model in eV (for the physical shift magnitude).
    double energy_unit_ev = 10.0;
    /// Rest energy per particle in eV.
    double rest_energy_ev = 5.11e5;
};

ExperimentReport collapse_trace_experiment(uint64_t n_runs, const CollapseTraceConfig &config, uint64_t seed);

/// Count-derived statistics for `report.experiment`, computed from `counts` and `trajectory` alone.
NamedValues recompute_statistics(const ExperimentReport &report);

/// Count rows for a CHSH table in canonical order (a setting, b setting, A, B with + first).
std::vector<CountRow> chsh_rows(const CountTable &counts, const SettingsQuartet &quartet, const std::string &group = "");

/// Inverse of chsh_rows for the rows of `group`.
CountTable chsh_table(const std::vector<CountRow> &rows, const std::string &group = "");

}  // namespace collapse_lab

#endif
