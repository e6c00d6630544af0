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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "collapse_lab/errors.h"
#include "collapse_lab/tolerances.h"

namespace collapse_lab {

void CollapseParams::validate() const {
    if (!(delta > 0.0 && delta < 0.5)) {
        throw InputError("collapse delta must lie in (0, 0.5)");
    }
    if (!(tau_step > 0.0) || !std::isfinite(tau_step)) {
        throw InputError("tau_step must be positive");
    }
}

BranchPair branch_decompose(const StateVector &s, const Projector &interacting, std::string interacting_label,
                            std::string noninteracting_label) {
    const auto &m = interacting.matrix();
    if (max_abs_entry(m * m - m) > tol::kAlgebraic) {
        throw InputError("interacting projector is not idempotent");
    }
    double w = born_weight(s, interacting);
    return BranchPair{std::move(interacting_label), std::move(noninteracting_label), interacting,
                      interacting.complement(), w};
}

double stochastic_step(double w, double delta, bool up) {
    if (!(w > delta && w < 1.0 - delta)) {
        throw InputError("stochastic_step outside the interior; use terminal_resolution");
    }
    return up ? w + delta : w - delta;
}

Resolution terminal_resolution(double w, GlobalStream &stream) {
    if (!(w >= 0.0 && w <= 1.0)) {
        throw InputError("terminal_resolution weight outside [0, 1]");
    }
    if (w == 0.0) {
        return Resolution::noninteracting;
    }
    if (w == 1.0) {
        return Resolution::interacting;
    }
    return stream.next_uniform() < w ? Resolution::interacting : Resolution::noninteracting;
}

WalkOutcome walk_to_collapse(double w0, const CollapseParams &params, GlobalStream &stream, std::vector<double> *trajectory) {
    params.validate();
    if (!(w0 >= 0.0 && w0 <= 1.0)) {
        throw InputError("initial branch weight outside [0, 1]");
    }
    WeightLattice lattice{w0, params.delta};
    if (trajectory) {
        trajectory->push_back(w0);
    }
    uint64_t steps = 0;
    while (lattice.interior()) {
        lattice.level += stream.next_bit() ? 1 : -1;
        steps++;
        if (trajectory) {
            trajectory->push_back(lattice.weight());
        }
    }
    double w = std::clamp(lattice.weight(), 0.0, 1.0);
    return {terminal_resolution(w, stream) == Resolution::interacting, steps};
}

CollapseResult run_collapse(const StateVector &s, const BranchPair &pair, const CollapseParams &params, GlobalStream &stream,
                            bool record_trajectory) {
    std::vector<double> trajectory;
    WalkOutcome walk = walk_to_collapse(pair.w, params, stream, record_trajectory ? &trajectory : nullptr);
    const Projector &winner = walk.interacting_wins ? pair.interacting : pair.noninteracting;
    try {
        StateVector collapsed = project_and_renormalize(s, winner);
        return CollapseResult{walk.interacting_wins ? pair.interacting_label : pair.noninteracting_label,
                              walk.interacting_wins, std::move(collapsed), std::move(trajectory)};
    } catch (const NullOutcomeError &) {
        throw InternalInvariantError("a zero-weight branch won the collapse");
    }
}

GamblersRuinRule::GamblersRuinRule(CollapseParams params) : params_(params) {
    params_.validate();
}

bool GamblersRuinRule::challenger_wins(double w, const Context &, GlobalStream &stream) const {
    return walk_to_collapse(w, params_, stream).interacting_wins;
}

size_t multiway_collapse(std::span<const WeightedBranch> branches, const ContestRule &rule, GlobalStream &stream,
                         std::span<const size_t> order, ContestRule::Context ctx) {
    if (branches.empty()) {
        throw InputError("multiway_collapse needs at least one branch");
    }
    double total = 0;
    for (const auto &b : branches) {
        if (!(b.weight >= 0.0) || !std::isfinite(b.weight)) {
            throw InputError("branch '" + b.label + "' has a negative weight");
        }
        total += b.weight;
    }
    if (std::abs(total - 1.0) > tol::kAccumulated) {
        throw InputError("branch weights do not sum to one");
    }

    std::vector<size_t> sequence;
    if (order.empty()) {
        sequence.resize(branches.size());
        std::iota(sequence.begin(), sequence.end(), size_t{0});
    } else {
        sequence.assign(order.begin(), order.end());
        std::vector<size_t> sorted = sequence;
        std::sort(sorted.begin(), sorted.end());
        for (size_t k = 0; k < sorted.size(); k++) {
            if (sorted[k] != k || sorted.size() != branches.size()) {
                throw InputError("contest order is not a permutation of the branches");
            }
        }
    }

    size_t champion = sequence[0];
    double mass = branches[champion].weight;
    for (size_t k = 1; k < sequence.size(); k++) {
        size_t challenger = sequence[k];
        double w = branches[challenger].weight;
        double combined = mass + w;
        if (w == 0.0) {
            continue;
        }
        bool wins;
        if (mass == 0.0) {
            wins = true;
        } else {
            wins = rule.challenger_wins(w / combined, ctx, stream);
        }
        if (wins) {
            champion = challenger;
        }
        mass = combined;
    }
    if (branches[champion].weight == 0.0) {
        throw InternalInvariantError("zero-weight branch won a multiway collapse");
    }
    return champion;
}

size_t multiway_collapse(std::span<const WeightedBranch> branches, const CollapseParams &params, GlobalStream &stream,
                         std::span<const size_t> order) {
    return multiway_collapse(branches, GamblersRuinRule(params), stream, order);
}

namespace {

struct Executor {
    const ContestRule &rule;
    GlobalStream &stream;
    StateVector state;
    std::vector<MeasurementRecord> outcomes;
    size_t ordinal = 0;

    void reduce_binary(const Projector &interacting, const EventRecord &event, bool record, size_t subsystem) {
        double w = born_weight(state, interacting);
        bool wins;
        if (w == 0.0) {
            wins = false;
        } else if (w == 1.0) {
            wins = true;
        } else {
            wins = rule.challenger_wins(w, {event.site, ordinal}, stream);
        }
        ordinal++;
        try {
            state = project_and_renormalize(state, wins ? interacting : interacting.complement());
        } catch (const NullOutcomeError &) {
            throw InternalInvariantError("a zero-weight branch won the reduction");
        }
        if (record) {
            outcomes.push_back({event.id, subsystem, wins ? +1 : -1});
        }
    }

    void measure_jointly(std::span<const EventRecord *const> group) {
        const Dims &dims = state.dims();
        size_t k = group.size();
        size_t combos = size_t{1} << k;
        std::vector<Projector> joint;
        std::vector<WeightedBranch> branches;
        joint.reserve(combos);
        for (size_t c = 0; c < combos; c++) {
            Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(state.size(), state.size());
            std::string label;
            for (size_t j = 0; j < k; j++) {
                const auto &mp = std::get<MeasurementPayload>(group[j]->payload);
                bool up = ((c >> (k - 1 - j)) & 1) == 0;
                m = m * embed(spin::along(mp.angle, up).matrix(), mp.subsystem, dims);
                label += up ? '+' : '-';
            }
            joint.emplace_back(dims, std::move(m));
            branches.push_back({label, born_weight(state, joint.back())});
        }
        size_t winner = multiway_collapse(branches, rule, stream, {}, {group[0]->site, ordinal});
        ordinal++;
        state = project_and_renormalize(state, joint[winner]);
        for (size_t j = 0; j < k; j++) {
            const auto &mp = std::get<MeasurementPayload>(group[j]->payload);
            bool up = ((winner >> (k - 1 - j)) & 1) == 0;
            outcomes.push_back({group[j]->id, mp.subsystem, up ? +1 : -1});
        }
    }
};

}  // namespace

ExecutionResult execute_schedule(const FoliationSchedule &schedule, StateVector initial, const ContestRule &rule,
                                 GlobalStream &stream) {
    schedule.check_causal_order();
    Executor ex{rule, stream, std::move(initial), {}};
    auto events = schedule.events();
    for (size_t i = 0; i < events.size();) {
        const EventRecord &e = events[i];
        switch (e.kind) {
            case EventKind::unitary: {
                const auto *p = std::get_if<UnitaryPayload>(&e.payload);
                if (p == nullptr) {
                    throw InputError("unitary event without a unitary payload");
                }
                Eigen::MatrixXcd u = embed(p->local, p->subsystem, ex.state.dims());
                ex.state = StateVector(ex.state.dims(), u * ex.state.amplitudes());
                i++;
                break;
            }
            case EventKind::reduction: {
                const auto *p = std::get_if<ReductionPayload>(&e.payload);
                if (p == nullptr) {
                    throw InputError("reduction event without a projector payload");
                }
                ex.reduce_binary(p->interacting, e, false, 0);
                i++;
                break;
            }
            case EventKind::measurement: {
                std::vector<const EventRecord *> group;
                size_t j = i;
                while (j < events.size() && events[j].kind == EventKind::measurement && events[j].t == e.t) {
                    if (!std::holds_alternative<MeasurementPayload>(events[j].payload)) {
                        throw InputError("measurement event without a measurement payload");
                    }
                    group.push_back(&events[j]);
                    j++;
                }
                if (group.size() == 1) {
                    const auto &mp = std::get<MeasurementPayload>(e.payload);
                    Projector up = embed(spin::along(mp.angle, true), mp.subsystem, ex.state.dims());
                    ex.reduce_binary(up, e, true, mp.subsystem);
                } else {
                    ex.measure_jointly(group);
                }
                i = j;
                break;
            }
        }
    }
    return ExecutionResult{std::move(ex.state), std::move(ex.outcomes)};
}

}  // namespace collapse_lab
