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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Every tolerance is pinned below.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "collapse_lab/config.h"
#include "collapse_lab/dispatch.h"
#include "collapse_lab/dynamics.h"
#include "collapse_lab/experiments.h"
#include "collapse_lab/report_io.h"
#include "mutants.h"
#include "oracles.h"

using namespace collapse_lab;

namespace {

constexpr double kPi = std::numbers::pi;

// Criterion 1
constexpr uint64_t kBornRuns = 10000;
constexpr double kBornDelta = 0.01;
constexpr double kBornSeconds = 60.0;
// Criterion 2
constexpr uint64_t kChshRuns = 100000;
constexpr double kChshLow = 2.80;
constexpr double kChshHigh = 2.86;
constexpr int kLhvModels = 10;
constexpr double kChshSeconds = 300.0;
// Criterion 3
constexpr double kNoSignalingMax = 0.01;
constexpr double kInjected = 0.2;
// Criterion 4
constexpr uint64_t kOrderRuns = 10000;
// Criterion 6
constexpr double kHydrogenV = 10.0;
constexpr double kElectronRest = 5.11e5;
constexpr double kShiftExpected = 1.957e-5;
constexpr double kShiftRelTol = 1e-3;
constexpr double kShiftGate = 1e-3;
// Criterion 7
constexpr double kHarmonicTauTol = 1e-9;
constexpr double kTauLow = 0.5;
constexpr double kTauHigh = 2.0;
// Criterion 8
constexpr uint64_t kOracleRuns = 10000;
// Criterion 9
constexpr size_t kAltWorkers = 3;

int failures = 0;

void report(int id, const char *name, bool pass, const std::string &detail) {
    std::printf("%s  criterion %d  %-22s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    failures += pass ? 0 : 1;
}

std::string fmt(const char *f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char *f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Configs run here, keyed by label, for the worker-count comparison.
std::vector<std::pair<std::string, std::string>> configs;
std::map<std::string, std::string> first_reports;

ExperimentReport run_config(const std::string &label, const std::string &text) {
    RunConfig c = parse_config("threads = 1\n" + text);
    ExperimentReport r = dispatch(c);
    configs.emplace_back(label, text);
    first_reports[label] = report_json(r);
    return r;
}

void criterion_born() {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentReport r = run_config("born", fmt("experiment = born\nseed = 1001\nruns = %llu\n[engine]\ndelta = %g\n"
                                                "[born]\nweights = [0.1, 0.25, 0.5, 0.75, 0.9]\n",
                                                static_cast<unsigned long long>(kBornRuns), kBornDelta));
    double secs = seconds_since(t0);
    bool all = true;
    double worst = 0;
    for (int i = 0; i < 5; i++) {
        std::string k = std::to_string(i);
        double w0 = r.statistic("w0_" + k);
        double f = r.statistic("frequency_" + k);
        double bound = 3 * std::sqrt(w0 * (1 - w0) / static_cast<double>(kBornRuns));
        all = all && std::abs(f - w0) <= bound;
        worst = std::max(worst, std::abs(f - w0) / bound);
    }
    report(1, "born-emergence", all && secs < kBornSeconds,
           fmt("worst |f-w0|/3sigma=%.3f  runtime=%.1fs (<%.0fs)", worst, secs, kBornSeconds));
}

CountTable chsh_engine_counts;

void criterion_chsh() {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentReport q = run_config("chsh-quantum", fmt("experiment = chsh-quantum\nseed = 2002\nruns = %llu\n",
                                                        static_cast<unsigned long long>(kChshRuns)));
    chsh_engine_counts = chsh_table(q.counts);
    double s = q.statistic("S");
    bool quantum_ok = s >= kChshLow && s <= kChshHigh;

    bool lhv_ok = true;
    double worst_margin = -1e9;
    for (int m = 1; m <= kLhvModels; m++) {
        ExperimentReport l =
            run_config("chsh-lhv-" + std::to_string(m),
                       fmt("experiment = chsh-lhv\nseed = %d\nruns = %llu\n[lhv]\nmodel = random\nmodel_seed = %d\n",
                           3000 + m, static_cast<unsigned long long>(kChshRuns), m));
        double ls = l.statistic("S");
        double ceiling = 2 + 3 * l.statistic("sigma_S");
        lhv_ok = lhv_ok && ls <= ceiling;
        worst_margin = std::max(worst_margin, ls - ceiling);
    }
    double secs = seconds_since(t0);
    report(2, "chsh-violation", quantum_ok && lhv_ok && secs < kChshSeconds,
           fmt("S=%.4f in [%.2f,%.2f] (oracle %.4f); %d LHV models max(S-ceiling)=%.4f<=0; runtime=%.1fs", s, kChshLow,
               kChshHigh, 2 * std::sqrt(2.0), kLhvModels, worst_margin, secs));
}

void criterion_no_signaling() {
    double dev = no_signaling_check(chsh_engine_counts);
    CountTable injected;
    for (int sa = 0; sa < 2; sa++) {
        for (int sb = 0; sb < 2; sb++) {
            double pa = sa == 0 ? (sb == 0 ? 0.6 : 0.4) : 0.5;
            JointTable j = factorized_joint(pa, 0.5);
            for (int x = 0; x < 2; x++) {
                for (int y = 0; y < 2; y++) {
                    injected.add(x ? -1 : +1, y ? -1 : +1, sa, sb,
                                 static_cast<uint64_t>(std::llround(j[x][y] * static_cast<double>(kChshRuns))));
                }
            }
        }
    }
    double inj = no_signaling_check(injected);
    report(3, "no-signaling", dev <= kNoSignalingMax && std::abs(inj - kInjected) <= 1e-12,
           fmt("engine deviation=%.5f (<=%.2f); injected deviation=%.6f detected", dev, kNoSignalingMax, inj));
}

void criterion_order() {
    ExperimentReport eq = run_config("order-equal", fmt("experiment = order-invariance\nseed = 4001\nruns = %llu\n",
                                                        static_cast<unsigned long long>(kOrderRuns)));
    ExperimentReport off =
        run_config("order-offset", fmt("experiment = order-invariance\nseed = 4002\nruns = %llu\n[order]\nb = %.17g\n",
                                       static_cast<unsigned long long>(kOrderRuns), kPi / 3));
    OrderInvarianceConfig mc;
    mc.b = kPi / 3;
    mc.workers = 1;
    collapse_lab::testing::LateSiteBiasRule mutant(mc.params);
    OrderInvarianceResult m = order_invariance_test(mc, kOrderRuns, 4002, &mutant);
    bool ok = eq.statistic("pass") == 1.0 && off.statistic("pass") == 1.0 && !m.pass;
    report(4, "order-undetectability", ok,
           fmt("tvd equal=%.4f offset=%.4f <= %.4f; mutant tvd=%.4f > threshold", eq.statistic("tvd"),
               off.statistic("tvd"), eq.statistic("threshold"), m.tvd));
}

void criterion_conservation() {
    ExperimentReport good = run_config("conservation", "experiment = conservation\nseed = 5001\nruns = 10000\n");
    ExperimentReport bad = run_config(
        "conservation-mutant", "experiment = conservation\nseed = 5002\nruns = 10000\n[conservation]\nentangled = false\n");
    // Integer bookkeeping straight from the rows.
    int good_violation = 0, bad_violation = 0;
    for (const auto &row : good.counts) {
        good_violation = std::max(good_violation, std::abs(row.outcome_b - kInitialMomentum));
    }
    for (const auto &row : bad.counts) {
        bad_violation = std::max(bad_violation, std::abs(row.outcome_b - kInitialMomentum));
    }
    report(5, "conservation", good_violation == 0 && bad_violation == 2 * kInitialMomentum,
           fmt("entangled max violation=%d; unentangled mutant max violation=%d (2p)", good_violation, bad_violation));
}

void criterion_shift() {
    ShiftMagnitude g = shift_magnitude(kHydrogenV, kElectronRest);
    bool ok = std::abs(g.g - kShiftExpected) / kShiftExpected <= kShiftRelTol && g.g <= kShiftGate &&
              !g.calibration_warning;
    report(6, "shift-magnitude", ok, fmt("g=%.6e (expect %.3e), gate g<=%.0e held", g.g, kShiftExpected, kShiftGate));
}

void criterion_timing() {
    const double e0 = 1.0, omega = 2.0;
    const int steps = 100000;
    const double dt = kPi / (2 * omega) / steps;
    auto rate_at = [&](double t) { return timing_rate(e0 * omega * std::sin(2 * omega * t), e0); };
    InteractionTrace trace;
    trace.start(0.0, 0.0, e0, rate_at(0.5 * dt));
    for (int i = 0; i < steps; i++) {
        trace = accumulate_tau(std::move(trace), dt);
        trace.set_observables(0.0, 0.0, rate_at((i + 1.5) * dt));
    }
    double harmonic = trace.tau();
    ScatteringResult sc = simulate_scattering(ScatteringScenario{});
    double tau = sc.trace.tau();
    bool ok = std::abs(harmonic - 1.0) <= kHarmonicTauTol && tau >= kTauLow && tau <= kTauHigh;
    report(7, "timing-calibration", ok,
           fmt("harmonic tau=%.12f; scattering tau=%.4f in [%.1f,%.1f]", harmonic, tau, kTauLow, kTauHigh));
}

void criterion_oracles() {
    bool ok = true;
    double worst = 0;
    uint64_t seed = 8000;
    for (double delta : {0.25, 0.1}) {
        CollapseParams params{delta};
        for (double w0 : {0.1, 0.3, 0.5, 0.65, 0.9}) {
            double p = collapse_lab::testing::absorption_oracle(w0, delta).p_interacting;
            uint64_t wins = 0;
            for (uint64_t i = 0; i < kOracleRuns; i++) {
                GlobalStream s = GlobalStream::for_run(seed, i);
                wins += walk_to_collapse(w0, params, s).interacting_wins;
            }
            seed++;
            double f = static_cast<double>(wins) / static_cast<double>(kOracleRuns);
            double bound = collapse_lab::testing::binomial_3sigma(p, static_cast<double>(kOracleRuns));
            ok = ok && std::abs(f - p) <= bound;
            worst = std::max(worst, std::abs(f - p) / bound);
        }
    }
    // Martingale identity on every interior step of engine walks: each recorded
    // weight sits on the lattice w0 + k * delta and consecutive levels differ
    // by exactly one, so both successors average to the current level.
    uint64_t checked = 0;
    bool martingale = true;
    const double w0 = 0.37, delta = 0.01;
    for (uint64_t run = 0; run < 200; run++) {
        GlobalStream s = GlobalStream::for_run(8100, run);
        std::vector<double> traj;
        walk_to_collapse(w0, CollapseParams{delta}, s, &traj);
        int64_t prev = 0;
        for (size_t i = 0; i < traj.size(); i++) {
            auto k = static_cast<int64_t>(std::llround((traj[i] - w0) / delta));
            WeightLattice lat{w0, delta, k};
            martingale = martingale && lat.weight() == traj[i];
            if (i > 0) {
                martingale = martingale && std::abs(k - prev) == 1 && (prev + 1) + (prev - 1) == 2 * prev;
                checked++;
            }
            prev = k;
        }
    }
    report(8, "exact-oracles", ok && martingale,
           fmt("delta {0.25,0.1}: worst |f-p|/3sigma=%.3f; martingale exact on %llu steps", worst,
               static_cast<unsigned long long>(checked)));
}

void criterion_determinism() {
    size_t same = 0;
    std::string mismatched;
    for (const auto &[label, text] : configs) {
        RunConfig c = parse_config(fmt("threads = %zu\n", kAltWorkers) + text);
        if (report_json(dispatch(c)) == first_reports[label]) {
            same++;
        } else {
            mismatched += " " + label;
        }
    }
    report(9, "determinism", same == configs.size(),
           fmt("%zu/%zu reports byte-identical at 1 vs %zu workers%s", same, configs.size(), kAltWorkers,
               mismatched.c_str()));
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> criteria{criterion_born,     criterion_chsh,   criterion_no_signaling,
                                                      criterion_order,    criterion_conservation, criterion_shift,
                                                      criterion_timing,   criterion_oracles, criterion_determinism};
    int id = 1;
    for (const auto &c : criteria) {
        try {
            c();
        } catch (const std::exception &e) {
            report(id, "error", false, e.what());
        }
        id++;
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
