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

#include "collapse_lab/experiments.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "collapse_lab/ensemble.h"
#include "collapse_lab/errors.h"
#include "collapse_lab/tolerances.h"

namespace collapse_lab {

namespace {

int outcome_index(int outcome) {
    if (outcome == +1) {
        return 0;
    }
    if (outcome == -1) {
        return 1;
    }
    throw InputError("outcome must be +1 or -1");
}

int setting_index(int s) {
    if (s != 0 && s != 1) {
        throw InputError("setting index must be 0 or 1");
    }
    return s;
}

/// Exact |x/a - y/b| for integer counts: one rounding.
double abs_rate_difference(uint64_t x, uint64_t a, uint64_t y, uint64_t b) {
    long double num = static_cast<long double>(x) * b - static_cast<long double>(y) * a;
    return static_cast<double>(std::fabs(num) / (static_cast<long double>(a) * b));
}

double binomial_bound(double p, double n) {
    return tol::kSigmas * std::sqrt(p * (1 - p) / n);
}

}  // namespace

SettingsQuartet SettingsQuartet::standard() {
    using std::numbers::pi;
    return {0.0, pi / 2, pi / 4, 3 * pi / 4};
}

void SettingsQuartet::validate() const {
    if (!std::isfinite(a) || !std::isfinite(a_prime) || !std::isfinite(b) || !std::isfinite(b_prime)) {
        throw InputError("analyzer angles must be finite");
    }
}

size_t CountTable::index(int outcome_a, int outcome_b, int a_setting, int b_setting) {
    return static_cast<size_t>(outcome_index(outcome_a) * 8 + outcome_index(outcome_b) * 4 + setting_index(a_setting) * 2 +
                               setting_index(b_setting));
}

uint64_t CountTable::count(int outcome_a, int outcome_b, int a_setting, int b_setting) const {
    return n_[index(outcome_a, outcome_b, a_setting, b_setting)];
}

void CountTable::add(int outcome_a, int outcome_b, int a_setting, int b_setting, uint64_t n) {
    n_[index(outcome_a, outcome_b, a_setting, b_setting)] += n;
}

uint64_t CountTable::total(int a_setting, int b_setting) const {
    uint64_t t = 0;
    for (int x : {+1, -1}) {
        for (int y : {+1, -1}) {
            t += count(x, y, a_setting, b_setting);
        }
    }
    return t;
}

double CountTable::alice_marginal(int outcome_a, int a_setting, int b_setting) const {
    uint64_t t = total(a_setting, b_setting);
    if (t == 0) {
        throw InsufficientDataError("empty setting pair");
    }
    return static_cast<double>(count(outcome_a, +1, a_setting, b_setting) + count(outcome_a, -1, a_setting, b_setting)) /
           static_cast<double>(t);
}

double CountTable::bob_marginal(int outcome_b, int a_setting, int b_setting) const {
    uint64_t t = total(a_setting, b_setting);
    if (t == 0) {
        throw InsufficientDataError("empty setting pair");
    }
    return static_cast<double>(count(+1, outcome_b, a_setting, b_setting) + count(-1, outcome_b, a_setting, b_setting)) /
           static_cast<double>(t);
}

CountTable &CountTable::operator+=(const CountTable &other) {
    for (size_t k = 0; k < n_.size(); k++) {
        n_[k] += other.n_[k];
    }
    return *this;
}

JointTable factorized_joint(double p_a, double p_b) {
    if (!(p_a >= 0.0 && p_a <= 1.0) || !(p_b >= 0.0 && p_b <= 1.0)) {
        throw InputError("probabilities must lie in [0, 1]");
    }
    JointTable t;
    double pa[2] = {p_a, 1 - p_a};
    double pb[2] = {p_b, 1 - p_b};
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            t[i][j] = pa[i] * pb[j];
        }
    }
    return t;
}

namespace lhv {

LhvModel sign_cos() {
    return LhvModel{
        "sign-cos",
        [](GlobalStream &s) { return 2 * std::numbers::pi * s.next_uniform(); },
        [](double a, double lambda) { return std::cos(a - lambda) >= 0 ? +1 : -1; },
        [](double b, double lambda) { return std::cos(b - lambda) >= 0 ? -1 : +1; },
    };
}

LhvModel constant() {
    return LhvModel{
        "constant",
        [](GlobalStream &) { return 0.0; },
        [](double, double) { return +1; },
        [](double, double) { return +1; },
    };
}

LhvModel fair_coin() {
    return LhvModel{
        "fair-coin",
        [](GlobalStream &s) { return s.next_uniform(); },
        [](double, double lambda) { return (static_cast<int>(lambda * 4) & 1) ? -1 : +1; },
        [](double, double lambda) { return (static_cast<int>(lambda * 4) & 2) ? -1 : +1; },
    };
}

LhvModel random_model(uint64_t seed) {
    GlobalStream params(seed, 0x4c4856);  // "LHV"
    auto pick = [&](double lo, double hi) { return lo + (hi - lo) * params.next_uniform(); };
    double freq_a = std::floor(pick(1, 4));
    double freq_b = std::floor(pick(1, 4));
    double phase_a = pick(0, 2 * std::numbers::pi);
    double phase_b = pick(0, 2 * std::numbers::pi);
    double noise_a = pick(0, 1.5);
    double noise_b = pick(0, 1.5);
    double sign_b = params.next_bit() ? 1.0 : -1.0;
    // Two hidden coordinates packed in one lambda: integer part and fraction.
    auto unpack = [](double lambda) {
        double whole = std::floor(lambda);
        return std::pair{2 * std::numbers::pi * whole / 4096.0, lambda - whole};
    };
    return LhvModel{
        "random-" + std::to_string(seed),
        [](GlobalStream &s) { return std::floor(4096 * s.next_uniform()) + s.next_uniform(); },
        [=](double a, double lambda) {
            auto [angle, jitter] = unpack(lambda);
            return std::cos(freq_a * a - angle + phase_a) + noise_a * (jitter - 0.5) >= 0 ? +1 : -1;
        },
        [=](double b, double lambda) {
            auto [angle, jitter] = unpack(lambda);
            double v = sign_b * (std::cos(freq_b * b - angle + phase_b) - noise_b * (jitter - 0.5));
            return v >= 0 ? +1 : -1;
        },
    };
}

}  // namespace lhv

CountTable lhv_run(const LhvModel &model, const SettingsQuartet &quartet, uint64_t n_per_pair, uint64_t seed,
                   size_t workers) {
    quartet.validate();
    if (!model.sample_lambda || !model.response_a || !model.response_b) {
        throw ModelError("LHV model is missing a sampler or response function");
    }
    std::vector<uint8_t> codes(4 * n_per_pair);
    for_each_run(codes.size(), workers, [&](size_t run) {
        int pair = static_cast<int>(run / n_per_pair);
        int sa = pair >> 1;
        int sb = pair & 1;
        GlobalStream stream = GlobalStream::for_run(seed, run);
        double lambda = model.sample_lambda(stream);
        int x = model.response_a(quartet.alice(sa), lambda);
        int y = model.response_b(quartet.bob(sb), lambda);
        if ((x != 1 && x != -1) || (y != 1 && y != -1)) {
            throw ModelError("LHV response outside {+1, -1}");
        }
        codes[run] = static_cast<uint8_t>(outcome_index(x) * 2 + outcome_index(y));
    });
    CountTable table;
    for (size_t run = 0; run < codes.size(); run++) {
        int pair = static_cast<int>(run / n_per_pair);
        table.add(codes[run] & 2 ? -1 : +1, codes[run] & 1 ? -1 : +1, pair >> 1, pair & 1);
    }
    return table;
}

double correlator(const CountTable &counts, int a_setting, int b_setting) {
    uint64_t t = counts.total(a_setting, b_setting);
    if (t == 0) {
        throw InsufficientDataError("setting pair (" + std::to_string(a_setting) + "," + std::to_string(b_setting) +
                                    ") has no trials");
    }
    auto same = static_cast<int64_t>(counts.count(+1, +1, a_setting, b_setting) + counts.count(-1, -1, a_setting, b_setting));
    auto diff = static_cast<int64_t>(counts.count(+1, -1, a_setting, b_setting) + counts.count(-1, +1, a_setting, b_setting));
    return static_cast<double>(same - diff) / static_cast<double>(t);
}

double chsh_combination(const CountTable &counts, int minus_a_setting, int minus_b_setting) {
    double s = 0;
    for (int sa = 0; sa < 2; sa++) {
        for (int sb = 0; sb < 2; sb++) {
            double e = correlator(counts, sa, sb);
            s += (sa == minus_a_setting && sb == minus_b_setting) ? -e : e;
        }
    }
    return s;
}

double chsh_statistic(const CountTable &counts, const SettingsQuartet &quartet) {
    quartet.validate();
    double best = 0;
    for (int sa = 0; sa < 2; sa++) {
        for (int sb = 0; sb < 2; sb++) {
            best = std::max(best, std::abs(chsh_combination(counts, sa, sb)));
        }
    }
    return best;
}

double chsh_sigma(const CountTable &counts) {
    double var = 0;
    for (int sa = 0; sa < 2; sa++) {
        for (int sb = 0; sb < 2; sb++) {
            double e = correlator(counts, sa, sb);
            var += (1 - e * e) / static_cast<double>(counts.total(sa, sb));
        }
    }
    return std::sqrt(var);
}

double no_signaling_check(const CountTable &counts) {
    double worst = 0;
    bool compared = false;
    // Alice's marginal at fixed a across Bob's settings.
    for (int sa = 0; sa < 2; sa++) {
        uint64_t t0 = counts.total(sa, 0);
        uint64_t t1 = counts.total(sa, 1);
        if (t0 == 0 || t1 == 0) {
            continue;
        }
        compared = true;
        uint64_t plus0 = counts.count(+1, +1, sa, 0) + counts.count(+1, -1, sa, 0);
        uint64_t plus1 = counts.count(+1, +1, sa, 1) + counts.count(+1, -1, sa, 1);
        worst = std::max(worst, abs_rate_difference(plus0, t0, plus1, t1));
    }
    for (int sb = 0; sb < 2; sb++) {
        uint64_t t0 = counts.total(0, sb);
        uint64_t t1 = counts.total(1, sb);
        if (t0 == 0 || t1 == 0) {
            continue;
        }
        compared = true;
        uint64_t plus0 = counts.count(+1, +1, 0, sb) + counts.count(-1, +1, 0, sb);
        uint64_t plus1 = counts.count(+1, +1, 1, sb) + counts.count(-1, +1, 1, sb);
        worst = std::max(worst, abs_rate_difference(plus0, t0, plus1, t1));
    }
    if (!compared) {
        throw InsufficientDataError("no-signaling check needs two settings of one party at a fixed setting of the other");
    }
    return worst;
}

namespace {

FoliationSchedule joint_measurement_schedule(double a, double b) {
    FoliationSchedule s;
    s.add({0, 0.0, 0, EventKind::unitary, UnitaryPayload{0, Eigen::MatrixXcd::Identity(2, 2)}, {}, false});
    s.add({1, 1.0, 0, EventKind::measurement, MeasurementPayload{0, a}, {0}, true});
    s.add({2, 1.0, 1, EventKind::measurement, MeasurementPayload{1, b}, {0}, true});
    return s;
}

std::vector<Projector> joint_outcome_projectors(double a, double b) {
    std::vector<Projector> out;
    Dims dims{2, 2};
    for (bool up_a : {true, false}) {
        for (bool up_b : {true, false}) {
            out.emplace_back(dims, kron(spin::along(a, up_a).matrix(), spin::along(b, up_b).matrix()));
        }
    }
    return out;
}

/// Outcome code A_index * 2 + B_index from execute_schedule outcomes.
uint8_t code_of(const std::vector<MeasurementRecord> &outcomes) {
    int x = 0;
    int y = 0;
    for (const auto &m : outcomes) {
        (m.subsystem == 0 ? x : y) = m.outcome;
    }
    return static_cast<uint8_t>(outcome_index(x) * 2 + outcome_index(y));
}

void add_chsh_statistics(ExperimentReport &report) {
    report.statistics = recompute_statistics(report);
}

}  // namespace

CountTable quantum_counts(const SettingsQuartet &quartet, uint64_t n_per_pair, const QuantumRunOptions &options,
                          uint64_t seed) {
    quartet.validate();
    options.params.validate();
    GamblersRuinRule rule(options.params);
    StateVector singlet = spin::singlet();

    std::vector<FoliationSchedule> schedules;
    std::vector<std::vector<double>> born;
    for (int pair = 0; pair < 4; pair++) {
        double a = quartet.alice(pair >> 1);
        double b = quartet.bob(pair & 1);
        schedules.push_back(joint_measurement_schedule(a, b));
        std::vector<double> w;
        for (const auto &p : joint_outcome_projectors(a, b)) {
            w.push_back(born_weight(singlet, p));
        }
        born.push_back(std::move(w));
    }

    std::vector<uint8_t> codes(4 * n_per_pair);
    for_each_run(codes.size(), options.workers, [&](size_t run) {
        size_t pair = run / n_per_pair;
        GlobalStream stream = GlobalStream::for_run(seed, run);
        if (options.sampler == Sampler::engine) {
            codes[run] = code_of(execute_schedule(schedules[pair], singlet, rule, stream).outcomes);
        } else {
            double u = stream.next_uniform();
            uint8_t k = 0;
            double acc = born[pair][0];
            while (k < 3 && u >= acc) {
                k++;
                acc += born[pair][k];
            }
            codes[run] = k;
        }
    });
    CountTable table;
    for (size_t run = 0; run < codes.size(); run++) {
        int pair = static_cast<int>(run / n_per_pair);
        table.add(codes[run] & 2 ? -1 : +1, codes[run] & 1 ? -1 : +1, pair >> 1, pair & 1);
    }
    return table;
}

std::vector<CountRow> chsh_rows(const CountTable &counts, const SettingsQuartet &quartet, const std::string &group) {
    std::vector<CountRow> rows;
    for (int sa = 0; sa < 2; sa++) {
        for (int sb = 0; sb < 2; sb++) {
            for (int x : {+1, -1}) {
                for (int y : {+1, -1}) {
                    rows.push_back({group, quartet.alice(sa), quartet.bob(sb), x, y, counts.count(x, y, sa, sb)});
                }
            }
        }
    }
    return rows;
}

CountTable chsh_table(const std::vector<CountRow> &rows, const std::string &group) {
    CountTable table;
    size_t k = 0;
    for (const auto &r : rows) {
        if (r.group != group) {
            continue;
        }
        if (k >= 16) {
            throw InputError("CHSH count group has more than 16 rows");
        }
        table.add(r.outcome_a, r.outcome_b, static_cast<int>(k / 8), static_cast<int>((k / 4) % 2), r.count);
        k++;
    }
    if (k != 16) {
        throw InsufficientDataError("CHSH count group needs 16 rows");
    }
    return table;
}

ExperimentReport quantum_chsh_run(const SettingsQuartet &quartet, uint64_t n_per_pair, const QuantumRunOptions &options,
                                  uint64_t seed) {
    CountTable table = quantum_counts(quartet, n_per_pair, options, seed);
    ExperimentReport report;
    report.experiment = "chsh-quantum";
    report.seed = seed;
    report.counts = chsh_rows(table, quartet);
    add_chsh_statistics(report);

    // Closed-form singlet value E(a, b) = -cos(a - b) for the same quartet.
    double best = 0;
    for (int sa = 0; sa < 2; sa++) {
        for (int sb = 0; sb < 2; sb++) {
            double s = 0;
            for (int i = 0; i < 2; i++) {
                for (int j = 0; j < 2; j++) {
                    double e = -std::cos(quartet.alice(i) - quartet.bob(j));
                    s += (i == sa && j == sb) ? -e : e;
                }
            }
            best = std::max(best, std::abs(s));
        }
    }
    report.diagnostics = {
        {"n_per_pair", static_cast<double>(n_per_pair)},
        {"delta", options.params.delta},
        {"sampler_engine", options.sampler == Sampler::engine ? 1.0 : 0.0},
        {"oracle_S", best},
    };
    return report;
}

ExperimentReport lhv_chsh_report(const LhvModel &model, const SettingsQuartet &quartet, uint64_t n_per_pair,
                                 uint64_t seed, size_t workers) {
    CountTable table = lhv_run(model, quartet, n_per_pair, seed, workers);
    ExperimentReport report;
    report.experiment = "chsh-lhv";
    report.seed = seed;
    report.counts = chsh_rows(table, quartet);
    add_chsh_statistics(report);
    report.diagnostics = {{"n_per_pair", static_cast<double>(n_per_pair)}};
    return report;
}

FoliationSchedule two_party_schedule(double a, double b) {
    FoliationSchedule s;
    s.add({0, 0.0, 0, EventKind::unitary, UnitaryPayload{0, Eigen::MatrixXcd::Identity(2, 2)}, {}, false});
    s.add({1, 1.0, 0, EventKind::measurement, MeasurementPayload{0, a}, {0}, true});
    s.add({2, 2.0, 1, EventKind::measurement, MeasurementPayload{1, b}, {0}, true});
    return s;
}

double total_variation_distance(const std::array<std::array<uint64_t, 2>, 2> &p,
                                const std::array<std::array<uint64_t, 2>, 2> &q) {
    uint64_t np = 0;
    uint64_t nq = 0;
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            np += p[i][j];
            nq += q[i][j];
        }
    }
    if (np == 0 || nq == 0) {
        throw InsufficientDataError("total variation distance of an empty table");
    }
    double sum = 0;
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            sum += abs_rate_difference(p[i][j], np, q[i][j], nq);
        }
    }
    return 0.5 * sum;
}

namespace {

StateVector order_preparation(Preparation prep) {
    if (prep == Preparation::singlet) {
        return spin::singlet();
    }
    Eigen::VectorXcd a = spin::along(2 * std::numbers::pi / 5, true).matrix().col(0);
    Eigen::VectorXcd b = spin::along(-std::numbers::pi / 3, true).matrix().col(0);
    return tensor_product(normalize(StateVector({2}, a)), normalize(StateVector({2}, b)));
}

}  // namespace

OrderInvarianceResult order_invariance_test(const OrderInvarianceConfig &config, uint64_t n_runs, uint64_t seed,
                                            const ContestRule *rule) {
    if (n_runs == 0) {
        throw InsufficientDataError("order invariance needs at least one run");
    }
    GamblersRuinRule default_rule(config.params);
    const ContestRule &active = rule ? *rule : default_rule;
    StateVector initial = order_preparation(config.preparation);

    FoliationSchedule a_first = two_party_schedule(config.a, config.b);
    const uint64_t swapped[] = {2, 1};
    FoliationSchedule b_first = reorder_schedule(a_first, swapped);

    OrderInvarianceResult result{};
    for (const auto *sched : {&a_first, &b_first}) {
        std::vector<uint8_t> codes(n_runs);
        for_each_run(n_runs, config.workers, [&](size_t run) {
            GlobalStream stream = GlobalStream::for_run(seed, run);
            codes[run] = code_of(execute_schedule(*sched, initial, active, stream).outcomes);
        });
        auto &table = sched == &a_first ? result.a_first : result.b_first;
        for (uint8_t c : codes) {
            table[c >> 1][c & 1]++;
        }
    }
    result.tvd = total_variation_distance(result.a_first, result.b_first);
    result.threshold = tol::kSigmas * std::sqrt(4.0 / static_cast<double>(n_runs));
    result.pass = result.tvd <= result.threshold;
    return result;
}

ExperimentReport order_invariance_report(const OrderInvarianceConfig &config, uint64_t n_runs, uint64_t seed) {
    OrderInvarianceResult r = order_invariance_test(config, n_runs, seed);
    ExperimentReport report;
    report.experiment = "order-invariance";
    report.seed = seed;
    for (const auto &[group, table] : {std::pair{"a-first", &r.a_first}, std::pair{"b-first", &r.b_first}}) {
        for (int i = 0; i < 2; i++) {
            for (int j = 0; j < 2; j++) {
                report.counts.push_back({group, config.a, config.b, i == 0 ? +1 : -1, j == 0 ? +1 : -1, (*table)[i][j]});
            }
        }
    }
    report.statistics = recompute_statistics(report);
    report.diagnostics = {
        {"runs_per_ordering", static_cast<double>(n_runs)},
        {"delta", config.params.delta},
        {"singlet", config.preparation == Preparation::singlet ? 1.0 : 0.0},
    };
    return report;
}

ExperimentReport conservation_experiment(uint64_t n_runs, const ConservationConfig &config, uint64_t seed) {
    double r = config.reflectivity;
    if (!(r >= 0.0 && r <= 1.0)) {
        throw InputError("reflectivity must lie in [0, 1]");
    }
    if (n_runs == 0) {
        throw InsufficientDataError("conservation experiment needs at least one run");
    }
    config.params.validate();
    // Subsystem 0: photon, basis {transmitted (+1), reflected (-1)}.
    // Subsystem 1: beam-splitter recoil, basis {0, +2}.
    constexpr int kPhotonMomentum[2] = {+1, -1};
    constexpr int kRecoilMomentum[2] = {0, +2};
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(4);
    if (config.entangled) {
        amps(0) = std::sqrt(1 - r);  // |transmitted, 0>
        amps(3) = std::sqrt(r);      // |reflected, +2>
    } else {
        amps(0) = std::sqrt(1 - r);  // |transmitted, 0>
        amps(2) = std::sqrt(r);      // |reflected, 0>
    }
    StateVector state({2, 2}, amps);
    Eigen::Matrix2cd reflected = Eigen::Matrix2cd::Zero();
    reflected(1, 1) = 1;
    BranchPair pair = branch_decompose(state, Projector({2, 2}, embed(reflected, 0, {2, 2})), "reflected", "transmitted");

    std::vector<std::pair<int8_t, int8_t>> results(n_runs);
    for_each_run(n_runs, config.workers, [&](size_t run) {
        GlobalStream stream = GlobalStream::for_run(seed, run);
        CollapseResult c = run_collapse(state, pair, config.params, stream, false);
        int photon = 0;
        int total = 0;
        bool first = true;
        for (size_t k = 0; k < 4; k++) {
            if (std::norm(c.state[k]) <= tol::kAlgebraic) {
                continue;
            }
            int p = kPhotonMomentum[k >> 1];
            int t = p + kRecoilMomentum[k & 1];
            if (!first && (t != total || p != photon)) {
                throw NumericalError("collapsed state has indefinite momentum");
            }
            photon = p;
            total = t;
            first = false;
        }
        results[run] = {static_cast<int8_t>(photon), static_cast<int8_t>(total)};
    });

    ExperimentReport report;
    report.experiment = "conservation";
    report.seed = seed;
    std::vector<std::pair<std::pair<int, int>, uint64_t>> tally;
    for (const auto &[photon, total] : results) {
        auto key = std::pair<int, int>{photon, total};
        auto it = std::find_if(tally.begin(), tally.end(), [&](const auto &e) { return e.first == key; });
        if (it == tally.end()) {
            tally.push_back({key, 1});
        } else {
            it->second++;
        }
    }
    std::sort(tally.begin(), tally.end(), [](const auto &x, const auto &y) { return x.first > y.first; });
    for (const auto &[key, n] : tally) {
        report.counts.push_back({"", r, 0.0, key.first, key.second, n});
    }
    report.statistics = recompute_statistics(report);
    report.diagnostics = {
        {"reflectivity", r},
        {"entangled", config.entangled ? 1.0 : 0.0},
        {"initial_momentum", kInitialMomentum},
    };
    return report;
}

ExperimentReport born_convergence_experiment(const std::vector<double> &weights, uint64_t n_runs, double delta,
                                             uint64_t seed, size_t workers) {
    if (weights.empty()) {
        throw InputError("born experiment needs at least one weight");
    }
    if (n_runs == 0) {
        throw InsufficientDataError("born experiment needs at least one run");
    }
    CollapseParams params;
    params.delta = delta;
    params.validate();
    ExperimentReport report;
    report.experiment = "born";
    report.seed = seed;
    Eigen::Matrix2cd up = Eigen::Matrix2cd::Zero();
    up(1, 1) = 1;
    Projector interacting({2}, up);
    for (size_t wi = 0; wi < weights.size(); wi++) {
        double w0 = weights[wi];
        if (!(w0 > 0.0 && w0 < 1.0)) {
            throw InputError("born weights must lie in (0, 1)");
        }
        Eigen::Vector2cd amps(std::sqrt(1 - w0), std::sqrt(w0));
        StateVector state({2}, amps);
        BranchPair pair = branch_decompose(state, interacting);
        std::vector<uint8_t> wins(n_runs);
        for_each_run(n_runs, workers, [&](size_t run) {
            GlobalStream stream = GlobalStream::for_run(seed, wi * n_runs + run);
            wins[run] = walk_to_collapse(pair.w, params, stream).interacting_wins ? 1 : 0;
        });
        uint64_t k = 0;
        for (uint8_t v : wins) {
            k += v;
        }
        report.counts.push_back({"", w0, 0.0, +1, 0, k});
        report.counts.push_back({"", w0, 0.0, -1, 0, n_runs - k});
    }
    report.statistics = recompute_statistics(report);
    report.diagnostics = {{"delta", delta}, {"runs_per_weight", static_cast<double>(n_runs)}};
    return report;
}

ExperimentReport collapse_trace_experiment(uint64_t n_runs, const CollapseTraceConfig &config, uint64_t seed) {
    if (!(config.w0 >= 0.0 && config.w0 <= 1.0)) {
        throw InputError("trace w0 must lie in [0, 1]");
    }
    config.params.validate();
    ExperimentReport report;
    report.experiment = "collapse-trace";
    report.seed = seed;

    if (!config.physical) {
        std::vector<std::vector<double>> trajectories(n_runs);
        std::vector<uint8_t> wins(n_runs);
        for_each_run(n_runs, 1, [&](size_t run) {
            GlobalStream stream = GlobalStream::for_run(seed, run);
            wins[run] = walk_to_collapse(config.w0, config.params, stream, &trajectories[run]).interacting_wins;
        });
        uint64_t k = 0;
        for (size_t run = 0; run < n_runs; run++) {
            k += wins[run];
            for (size_t step = 0; step < trajectories[run].size(); step++) {
                report.trajectory.push_back({run, step, trajectories[run][step]});
            }
        }
        report.counts.push_back({"", config.w0, 0.0, +1, 0, k});
        report.counts.push_back({"", config.w0, 0.0, -1, 0, n_runs - k});
        report.statistics = recompute_statistics(report);
        report.diagnostics = {{"w0", config.w0}, {"delta", config.params.delta}, {"physical", 0.0}};
        return report;
    }

    // Physical mode: reduction steps fall where the scattering event's timing
    // parameter crosses tau_step, each moving the weight by the physical shift
    // magnitude at that moment.
    ScatteringScenario scenario = config.scenario;
    scenario.tau_step = config.params.tau_step;
    ScatteringResult scatter = simulate_scattering(scenario);
    double e_total = 2 * config.rest_energy_ev + scatter.e_cm * config.energy_unit_ev;
    std::vector<double> deltas;
    for (size_t index : scatter.trace.reductions_due()) {
        double v = scatter.trace.samples()[index].v * config.energy_unit_ev;
        deltas.push_back(shift_magnitude(v, e_total).g);
    }
    double mean_delta = 0;
    for (double d : deltas) {
        mean_delta += d;
    }
    mean_delta = deltas.empty() ? 0.0 : mean_delta / static_cast<double>(deltas.size());

    for (uint64_t run = 0; run < n_runs; run++) {
        GlobalStream stream = GlobalStream::for_run(seed, run);
        double w = config.w0;
        report.trajectory.push_back({run, 0, w});
        for (size_t step = 0; step < deltas.size(); step++) {
            if (w > deltas[step] && w < 1 - deltas[step]) {
                w = stochastic_step(w, deltas[step], stream.next_bit());
            }
            report.trajectory.push_back({run, step + 1, w});
        }
    }
    report.statistics = recompute_statistics(report);
    report.diagnostics = {
        {"w0", config.w0},
        {"physical", 1.0},
        {"tau_final", scatter.trace.tau()},
        {"reduction_steps", static_cast<double>(deltas.size())},
        {"mean_delta", mean_delta},
        {"e_cm", scatter.e_cm},
        {"peak_v", scatter.peak_v},
    };
    return report;
}

namespace {

NamedValues chsh_statistics(const ExperimentReport &report, bool lhv) {
    CountTable t = chsh_table(report.counts);
    SettingsQuartet q{report.counts[0].a_setting, report.counts[8].a_setting, report.counts[0].b_setting,
                      report.counts[4].b_setting};
    double s = chsh_statistic(t, q);
    double sigma = chsh_sigma(t);
    NamedValues out = {
        {"E(a,b)", correlator(t, 0, 0)},
        {"E(a,b')", correlator(t, 0, 1)},
        {"E(a',b)", correlator(t, 1, 0)},
        {"E(a',b')", correlator(t, 1, 1)},
        {"S", s},
        {"sigma_S", sigma},
        {"marginal_deviation", no_signaling_check(t)},
    };
    if (lhv) {
        double ceiling = 2 + tol::kSigmas * sigma;
        out.push_back({"lhv_ceiling", ceiling});
        out.push_back({"within_ceiling", s <= ceiling ? 1.0 : 0.0});
    }
    return out;
}

NamedValues born_statistics(const ExperimentReport &report) {
    NamedValues out;
    bool all = true;
    if (report.counts.size() % 2 != 0) {
        throw InputError("born counts must come in (+1, -1) pairs");
    }
    for (size_t i = 0; i < report.counts.size() / 2; i++) {
        const auto &win = report.counts[2 * i];
        const auto &lose = report.counts[2 * i + 1];
        double n = static_cast<double>(win.count + lose.count);
        double w0 = win.a_setting;
        double freq = static_cast<double>(win.count) / n;
        double bound = binomial_bound(w0, n);
        bool pass = std::abs(freq - w0) <= bound;
        all = all && pass;
        std::string suffix = "_" + std::to_string(i);
        out.push_back({"w0" + suffix, w0});
        out.push_back({"frequency" + suffix, freq});
        out.push_back({"bound" + suffix, bound});
        out.push_back({"pass" + suffix, pass ? 1.0 : 0.0});
    }
    out.push_back({"all_pass", all ? 1.0 : 0.0});
    return out;
}

NamedValues order_statistics(const ExperimentReport &report) {
    std::array<std::array<uint64_t, 2>, 2> p{}, q{};
    for (const auto &r : report.counts) {
        auto &t = r.group == "a-first" ? p : q;
        t[outcome_index(r.outcome_a)][outcome_index(r.outcome_b)] += r.count;
    }
    uint64_t n = p[0][0] + p[0][1] + p[1][0] + p[1][1];
    double tvd = total_variation_distance(p, q);
    double threshold = tol::kSigmas * std::sqrt(4.0 / static_cast<double>(n));
    return {{"tvd", tvd}, {"threshold", threshold}, {"pass", tvd <= threshold ? 1.0 : 0.0}};
}

NamedValues conservation_statistics(const ExperimentReport &report) {
    uint64_t n = 0;
    uint64_t reflected = 0;
    int64_t momentum_sum = 0;
    int max_violation = 0;
    double r = report.counts.empty() ? 0.0 : report.counts[0].a_setting;
    for (const auto &row : report.counts) {
        n += row.count;
        if (row.outcome_a == -1) {
            reflected += row.count;
        }
        momentum_sum += static_cast<int64_t>(row.outcome_b) * static_cast<int64_t>(row.count);
        if (row.count > 0) {
            max_violation = std::max(max_violation, std::abs(row.outcome_b - kInitialMomentum));
        }
    }
    if (n == 0) {
        throw InsufficientDataError("conservation report has no runs");
    }
    double dn = static_cast<double>(n);
    return {
        {"reflected_frequency", static_cast<double>(reflected) / dn},
        {"reflected_bound", binomial_bound(r, dn)},
        {"mean_total_momentum", static_cast<double>(momentum_sum) / dn},
        {"max_violation", static_cast<double>(max_violation)},
    };
}

NamedValues trace_statistics(const ExperimentReport &report) {
    NamedValues out;
    uint64_t runs = 0;
    uint64_t steps = 0;
    double final_sum = 0;
    for (size_t k = 0; k < report.trajectory.size(); k++) {
        const auto &row = report.trajectory[k];
        if (row.step_index == 0) {
            runs++;
        } else {
            steps++;
        }
        bool last = k + 1 == report.trajectory.size() || report.trajectory[k + 1].run_index != row.run_index;
        if (last) {
            final_sum += row.w;
        }
    }
    if (runs == 0) {
        throw InsufficientDataError("trace report has no runs");
    }
    double dr = static_cast<double>(runs);
    out.push_back({"runs", dr});
    out.push_back({"mean_steps", static_cast<double>(steps) / dr});
    out.push_back({"mean_final_w", final_sum / dr});
    if (report.counts.size() == 2) {
        uint64_t n = report.counts[0].count + report.counts[1].count;
        out.push_back({"interacting_frequency", static_cast<double>(report.counts[0].count) / static_cast<double>(n)});
    }
    return out;
}

}  // namespace

NamedValues recompute_statistics(const ExperimentReport &report) {
    const std::string &e = report.experiment;
    if (e == "chsh-quantum" || e == "nosignal") {
        NamedValues out = chsh_statistics(report, false);
        if (e == "nosignal") {
            double dev = out.back().second;
            out.push_back({"no_signaling_limit", tol::kNoSignalingMax});
            out.push_back({"pass", dev <= tol::kNoSignalingMax ? 1.0 : 0.0});
        }
        return out;
    }
    if (e == "chsh-lhv") {
        return chsh_statistics(report, true);
    }
    if (e == "born") {
        return born_statistics(report);
    }
    if (e == "order-invariance") {
        return order_statistics(report);
    }
    if (e == "conservation") {
        return conservation_statistics(report);
    }
    if (e == "collapse-trace") {
        return trace_statistics(report);
    }
    throw InputError("no statistics defined for experiment '" + e + "'");
}

}  // namespace collapse_lab
