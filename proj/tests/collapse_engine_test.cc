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

#include "collapse_lab/collapse_engine.h"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gtest/gtest.h"

#include "collapse_lab/errors.h"
#include "oracles.h"

using namespace collapse_lab;
using collapse_lab::testing::absorption_oracle;
using collapse_lab::testing::binomial_3sigma;

namespace {

double win_frequency(double w0, double delta, int n, uint64_t seed) {
    CollapseParams params;
    params.delta = delta;
    int wins = 0;
    for (int i = 0; i < n; i++) {
        GlobalStream stream = GlobalStream::for_run(seed, static_cast<uint64_t>(i));
        wins += walk_to_collapse(w0, params, stream).interacting_wins;
    }
    return static_cast<double>(wins) / n;
}

StateVector pointer_state() {
    // sqrt(0.3)|L>|L> + sqrt(0.7)|R>|R>, system first, apparatus second.
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    v(0) = std::sqrt(0.3);
    v(3) = std::sqrt(0.7);
    return StateVector({2, 2}, v);
}

Projector apparatus_left() {
    return embed(Projector::onto({2}, Eigen::Vector2cd(1, 0)), 1, {2, 2});
}

}  // namespace

TEST(branch_decompose, identity_is_single_branch) {
    BranchPair p = branch_decompose(spin::singlet(), Projector::identity({2, 2}));
    EXPECT_NEAR(p.w, 1.0, 1e-12);
    EXPECT_LE(max_abs_entry(p.noninteracting.matrix()), 1e-12);
}

TEST(branch_decompose, singlet_z_up_on_first_factor) {
    BranchPair p = branch_decompose(spin::singlet(), embed(spin::along(0, true), 0, {2, 2}), "up", "down");
    EXPECT_NEAR(p.w, 0.5, 1e-12);
    EXPECT_EQ(p.interacting_label, "up");
    EXPECT_EQ(p.noninteracting_label, "down");
}

TEST(branch_decompose, random_states_match_born_weight_and_are_orthogonal) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 100; trial++) {
        Eigen::VectorXcd v(6);
        for (int k = 0; k < 6; k++) {
            v(k) = Complex(g(rng), g(rng));
        }
        StateVector s = normalize(StateVector({2, 3}, v));
        Eigen::VectorXcd dir(2);
        dir << Complex(g(rng), g(rng)), Complex(g(rng), g(rng));
        Projector p = embed(Projector::onto({2}, dir.normalized()), 0, {2, 3});
        BranchPair pair = branch_decompose(s, p);
        EXPECT_NEAR(pair.w, born_weight(s, p), 1e-12);
        EXPECT_LE(max_abs_entry(pair.interacting.matrix() * pair.noninteracting.matrix()), 1e-12);
        EXPECT_LE(max_abs_entry(pair.interacting.matrix() + pair.noninteracting.matrix() - Eigen::MatrixXcd::Identity(6, 6)),
                  1e-12);
    }
}

TEST(stochastic_step, examples) {
    EXPECT_DOUBLE_EQ(stochastic_step(0.5, 0.01, true), 0.51);
    EXPECT_DOUBLE_EQ(stochastic_step(0.5, 0.01, false), 0.49);
    EXPECT_EQ((stochastic_step(0.5, 0.01, true) + stochastic_step(0.5, 0.01, false)) / 2, 0.5);
}

TEST(stochastic_step, outside_interior_is_rejected) {
    EXPECT_THROW(stochastic_step(0.005, 0.01, true), InputError);
    EXPECT_THROW(stochastic_step(0.01, 0.01, true), InputError);
    EXPECT_THROW(stochastic_step(0.995, 0.01, false), InputError);
}

TEST(stochastic_step, martingale_on_the_level_lattice_is_exact) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; trial++) {
        double delta = 0.001 + 0.2 * u(rng);
        WeightLattice at{u(rng), delta, static_cast<int64_t>(trial % 7) - 3};
        WeightLattice up = at, down = at;
        up.level++;
        down.level--;
        ASSERT_EQ((up.level + down.level) / 2, at.level);
        // The affine weight map carries the identity over up to rounding of w itself.
        ASSERT_NEAR((up.weight() + down.weight()) / 2, at.weight(), 4 * std::numeric_limits<double>::epsilon());
    }
}

TEST(terminal_resolution, certain_weights_consume_nothing) {
    GlobalStream s(1);
    for (int i = 0; i < 100; i++) {
        EXPECT_EQ(terminal_resolution(0.0, s), Resolution::noninteracting);
        EXPECT_EQ(terminal_resolution(1.0, s), Resolution::interacting);
    }
    EXPECT_EQ(s.draws(), 0u);
}

TEST(terminal_resolution, out_of_range_is_rejected) {
    GlobalStream s(1);
    EXPECT_THROW(terminal_resolution(-0.1, s), InputError);
    EXPECT_THROW(terminal_resolution(1.1, s), InputError);
    EXPECT_THROW(terminal_resolution(std::nan(""), s), InputError);
}

TEST(terminal_resolution, small_weight_frequency) {
    const int n = 100000;
    GlobalStream s(2024);
    int hits = 0;
    for (int i = 0; i < n; i++) {
        hits += terminal_resolution(0.005, s) == Resolution::interacting;
    }
    EXPECT_EQ(s.draws(), static_cast<uint64_t>(n));
    EXPECT_NEAR(static_cast<double>(hits) / n, 0.005, binomial_3sigma(0.005, n));
}

TEST(run_collapse, certain_branch_wins_without_draws) {
    StateVector up = StateVector::basis({2}, 0);
    BranchPair pair = branch_decompose(up, Projector::onto({2}, Eigen::Vector2cd(1, 0)));
    ASSERT_EQ(pair.w, 1.0);
    GlobalStream s(3);
    CollapseResult r = run_collapse(up, pair, CollapseParams{}, s);
    EXPECT_TRUE(r.interacting_won);
    EXPECT_EQ(r.winner, "interacting");
    EXPECT_EQ(s.draws(), 0u);
    EXPECT_EQ(r.trajectory, std::vector<double>{1.0});
}

TEST(run_collapse, weight_point_three_frequency) {
    const int n = 10000;
    double f = win_frequency(0.3, 0.01, n, 17);
    EXPECT_NEAR(f, 0.3, binomial_3sigma(0.3, n));
}

TEST(run_collapse, entangled_pointer_collapses_whole_branch) {
    StateVector s = pointer_state();
    BranchPair pair = branch_decompose(s, apparatus_left(), "app:L", "app:R");
    ASSERT_NEAR(pair.w, 0.3, 1e-12);
    Projector system_left = embed(Projector::onto({2}, Eigen::Vector2cd(1, 0)), 0, {2, 2});
    int left = 0;
    for (uint64_t run = 0; run < 200; run++) {
        GlobalStream stream = GlobalStream::for_run(5, run);
        CollapseResult r = run_collapse(s, pair, CollapseParams{0.05}, stream, false);
        double sys_left = born_weight(r.state, system_left);
        if (r.interacting_won) {
            left++;
            EXPECT_EQ(r.winner, "app:L");
            EXPECT_NEAR(sys_left, 1.0, 1e-12);
        } else {
            EXPECT_EQ(r.winner, "app:R");
            EXPECT_NEAR(sys_left, 0.0, 1e-12);
        }
        // Whole-branch consistency: the loser has no weight left.
        const Projector &loser = r.interacting_won ? pair.noninteracting : pair.interacting;
        EXPECT_LE(born_weight(r.state, loser), 1e-12);
    }
    EXPECT_GT(left, 0);
    EXPECT_LT(left, 200);
}

TEST(run_collapse, trajectory_moves_by_delta_and_ends_outside_interior) {
    CollapseParams params{0.05};
    GlobalStream s(8);
    std::vector<double> traj;
    WalkOutcome out = walk_to_collapse(0.4, params, s, &traj);
    ASSERT_EQ(traj.size(), out.steps + 1);
    EXPECT_EQ(traj.front(), 0.4);
    for (size_t i = 1; i < traj.size(); i++) {
        EXPECT_NEAR(std::abs(traj[i] - traj[i - 1]), 0.05, 1e-12);
    }
    double last = traj.back();
    EXPECT_TRUE(last <= 0.05 + 1e-12 || last >= 0.95 - 1e-12);
    // One bit per step plus one uniform at the boundary.
    EXPECT_EQ(s.draws(), out.steps + 1);
}

TEST(run_collapse, invalid_parameters) {
    GlobalStream s(1);
    EXPECT_THROW(walk_to_collapse(0.5, CollapseParams{0.0}, s), InputError);
    EXPECT_THROW(walk_to_collapse(0.5, CollapseParams{0.5}, s), InputError);
    EXPECT_THROW(walk_to_collapse(1.5, CollapseParams{}, s), InputError);
    EXPECT_THROW(GamblersRuinRule(CollapseParams{-1.0}), InputError);
}

TEST(collapse_properties, born_emergence) {
    const int n = 10000;
    for (double w0 : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        double f = win_frequency(w0, 0.01, n, 101);
        EXPECT_NEAR(f, w0, binomial_3sigma(w0, n)) << "w0=" << w0;
    }
}

TEST(collapse_properties, determinism) {
    for (uint64_t run = 0; run < 20; run++) {
        GlobalStream a = GlobalStream::for_run(31, run), b = GlobalStream::for_run(31, run);
        std::vector<double> ta, tb;
        WalkOutcome oa = walk_to_collapse(0.37, CollapseParams{}, a, &ta);
        WalkOutcome ob = walk_to_collapse(0.37, CollapseParams{}, b, &tb);
        ASSERT_EQ(oa.interacting_wins, ob.interacting_wins);
        ASSERT_EQ(oa.steps, ob.steps);
        ASSERT_EQ(ta, tb);
    }
}

TEST(collapse_properties, step_size_robustness) {
    // Fine steps are ~100x slower per run, so the comparison uses fewer runs;
    // the tolerance is the combined 3 sigma of the two samples.
    const int coarse_n = 10000, fine_n = 1000;
    for (double w0 : {0.1, 0.5, 0.9}) {
        double coarse = win_frequency(w0, 0.01, coarse_n, 201);
        double fine = win_frequency(w0, 0.001, fine_n, 202);
        double sigma = std::sqrt(w0 * (1 - w0) / coarse_n + w0 * (1 - w0) / fine_n);
        EXPECT_LE(std::abs(coarse - fine), 3 * sigma) << "w0=" << w0;
    }
}

TEST(absorption_oracle, hand_solved_chain) {
    // delta 0.25 from 0.3: interior {0.3, 0.55}; exits 0.05 and 0.8.
    auto a = absorption_oracle(0.3, 0.25);
    EXPECT_NEAR(a.p_interacting, 0.3, 1e-15);
    // E0 = 1 + E1/2, E1 = 1 + E0/2 -> E0 = 2.
    EXPECT_NEAR(a.expected_steps, 2.0, 1e-14);
    EXPECT_EQ(absorption_oracle(0.2, 0.25).expected_steps, 0.0);
}

TEST(collapse_properties, engine_matches_exact_chain) {
    const int n = 10000;
    for (double delta : {0.25, 0.1, 0.05}) {
        for (double w0 : {0.12, 0.3, 0.5, 0.77}) {
            auto oracle = absorption_oracle(w0, delta);
            CollapseParams params{delta};
            int wins = 0;
            double steps = 0, steps_sq = 0;
            for (int i = 0; i < n; i++) {
                GlobalStream s = GlobalStream::for_run(303, static_cast<uint64_t>(i));
                WalkOutcome o = walk_to_collapse(w0, params, s);
                wins += o.interacting_wins;
                steps += static_cast<double>(o.steps);
                steps_sq += static_cast<double>(o.steps * o.steps);
            }
            double f = static_cast<double>(wins) / n;
            EXPECT_NEAR(f, oracle.p_interacting, binomial_3sigma(oracle.p_interacting, n)) << delta << " " << w0;
            double mean = steps / n;
            double var = steps_sq / n - mean * mean;
            EXPECT_NEAR(mean, oracle.expected_steps, 3 * std::sqrt(var / n) + 1e-12) << delta << " " << w0;
        }
    }
}

TEST(multiway_collapse, certain_branch) {
    std::vector<WeightedBranch> b{{"a", 1}, {"b", 0}, {"c", 0}};
    for (uint64_t run = 0; run < 100; run++) {
        GlobalStream s = GlobalStream::for_run(1, run);
        EXPECT_EQ(multiway_collapse(b, CollapseParams{}, s), 0u);
    }
    std::vector<WeightedBranch> last{{"a", 0}, {"b", 0}, {"c", 1}};
    GlobalStream s(2);
    EXPECT_EQ(multiway_collapse(last, CollapseParams{}, s), 2u);
    EXPECT_EQ(s.draws(), 0u);
}

TEST(multiway_collapse, uniform_four_branches) {
    const int n = 10000;
    std::vector<WeightedBranch> b{{"0", 0.25}, {"1", 0.25}, {"2", 0.25}, {"3", 0.25}};
    std::array<int, 4> hits{};
    for (int i = 0; i < n; i++) {
        GlobalStream s = GlobalStream::for_run(44, static_cast<uint64_t>(i));
        hits[multiway_collapse(b, CollapseParams{0.02}, s)]++;
    }
    for (int k = 0; k < 4; k++) {
        EXPECT_NEAR(hits[k] / static_cast<double>(n), 0.25, binomial_3sigma(0.25, n)) << k;
    }
}

TEST(multiway_collapse, contest_order_does_not_change_distribution) {
    // Law of total probability: branch i wins overall with probability p_i under
    // every permutation; check all six orders on two weight vectors.
    const int n = 10000;
    std::vector<std::vector<WeightedBranch>> cases{
        {{"x", 0.2}, {"y", 0.3}, {"z", 0.5}},
        {{"x", 0.05}, {"y", 0.15}, {"z", 0.8}},
    };
    std::array<std::array<size_t, 3>, 6> orders{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    uint64_t seed = 500;
    for (const auto &branches : cases) {
        for (const auto &order : orders) {
            std::array<int, 3> hits{};
            for (int i = 0; i < n; i++) {
                GlobalStream s = GlobalStream::for_run(seed, static_cast<uint64_t>(i));
                hits[multiway_collapse(branches, CollapseParams{0.05}, s, order)]++;
            }
            seed++;
            for (size_t k = 0; k < 3; k++) {
                double p = branches[k].weight;
                EXPECT_NEAR(hits[k] / static_cast<double>(n), p, binomial_3sigma(p, n))
                    << "order " << order[0] << order[1] << order[2] << " branch " << k;
            }
        }
    }
}

TEST(multiway_collapse, input_errors) {
    GlobalStream s(1);
    std::vector<WeightedBranch> negative{{"a", 1.2}, {"b", -0.2}};
    EXPECT_THROW(multiway_collapse(negative, CollapseParams{}, s), InputError);
    std::vector<WeightedBranch> short_sum{{"a", 0.5}, {"b", 0.4}};
    EXPECT_THROW(multiway_collapse(short_sum, CollapseParams{}, s), InputError);
    std::vector<WeightedBranch> empty;
    EXPECT_THROW(multiway_collapse(empty, CollapseParams{}, s), InputError);
    std::vector<WeightedBranch> ok{{"a", 0.5}, {"b", 0.5}};
    std::vector<size_t> bad_order{0, 0};
    EXPECT_THROW(multiway_collapse(ok, CollapseParams{}, s, bad_order), InputError);
}

TEST(execute_schedule, singlet_same_axis_is_anticorrelated) {
    GamblersRuinRule rule(CollapseParams{0.05});
    for (bool simultaneous : {false, true}) {
        FoliationSchedule sched;
        EventRecord a, b;
        a.id = 1;
        a.t = 1.0;
        a.site = 0;
        a.kind = EventKind::measurement;
        a.payload = MeasurementPayload{0, 0.3};
        b = a;
        b.id = 2;
        b.t = simultaneous ? 1.0 : 2.0;
        b.site = 1;
        b.payload = MeasurementPayload{1, 0.3};
        sched.add(a);
        sched.add(b);
        for (uint64_t run = 0; run < 100; run++) {
            GlobalStream s = GlobalStream::for_run(12, run);
            ExecutionResult r = execute_schedule(sched, spin::singlet(), rule, s);
            ASSERT_EQ(r.outcomes.size(), 2u);
            EXPECT_EQ(r.outcomes[0].event_id, 1u);
            EXPECT_EQ(r.outcomes[1].event_id, 2u);
            EXPECT_EQ(r.outcomes[0].outcome, -r.outcomes[1].outcome);
            EXPECT_NEAR(r.state.norm_squared(), 1.0, 1e-12);
        }
    }
}

TEST(execute_schedule, reduction_event_selects_a_whole_branch) {
    FoliationSchedule sched;
    EventRecord e;
    e.id = 1;
    e.t = 0.5;
    e.kind = EventKind::reduction;
    e.payload = ReductionPayload{apparatus_left()};
    sched.add(e);
    GamblersRuinRule rule(CollapseParams{0.05});
    Projector system_left = embed(Projector::onto({2}, Eigen::Vector2cd(1, 0)), 0, {2, 2});
    for (uint64_t run = 0; run < 50; run++) {
        GlobalStream s = GlobalStream::for_run(13, run);
        ExecutionResult r = execute_schedule(sched, pointer_state(), rule, s);
        EXPECT_TRUE(r.outcomes.empty());
        double app = born_weight(r.state, apparatus_left());
        double sys = born_weight(r.state, system_left);
        EXPECT_NEAR(app, sys, 1e-12);
        EXPECT_TRUE(std::abs(app) < 1e-12 || std::abs(app - 1) < 1e-12);
    }
}

TEST(execute_schedule, same_seed_same_outcomes) {
    FoliationSchedule sched;
    EventRecord a;
    a.id = 1;
    a.t = 1.0;
    a.kind = EventKind::measurement;
    a.payload = MeasurementPayload{0, 0.0};
    EventRecord b = a;
    b.id = 2;
    b.t = 2.0;
    b.site = 1;
    b.payload = MeasurementPayload{1, std::numbers::pi / 3};
    sched.add(a);
    sched.add(b);
    GamblersRuinRule rule(CollapseParams{});
    for (uint64_t run = 0; run < 20; run++) {
        GlobalStream s1 = GlobalStream::for_run(77, run), s2 = GlobalStream::for_run(77, run);
        auto r1 = execute_schedule(sched, spin::singlet(), rule, s1);
        auto r2 = execute_schedule(sched, spin::singlet(), rule, s2);
        ASSERT_EQ(r1.outcomes[0].outcome, r2.outcomes[0].outcome);
        ASSERT_EQ(r1.outcomes[1].outcome, r2.outcomes[1].outcome);
        ASSERT_EQ(s1.draws(), s2.draws());
    }
}
