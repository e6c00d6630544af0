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

#ifndef COLLAPSE_LAB_COLLAPSE_ENGINE_H
#define COLLAPSE_LAB_COLLAPSE_ENGINE_H

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "collapse_lab/foliation.h"
#include "collapse_lab/global_stream.h"
#include "collapse_lab/quantum_core.h"

namespace collapse_lab {

enum class BoundaryRule {
    /// Leaving (delta, 1 - delta) ends the walk with one Bernoulli(w) draw.
    exact_bernoulli,
};

struct CollapseParams {
    /// Weight transferred per reduction step.
    double delta = 0.01;
    /// Accumulated timing parameter between reduction steps.
    double tau_step = 1.0 / 64.0;
    BoundaryRule absorb = BoundaryRule::exact_bernoulli;

    /// Throws InputError unless 0 < delta < 0.5 and tau_step > 0.
    void validate() const;
};

/// Orthogonal split of a state into an interacting branch and its complement.
struct BranchPair {
    std::string interacting_label;
    std::string noninteracting_label;
    Projector interacting;
    Projector noninteracting;
    /// Born weight of the interacting branch at decomposition time.
    double w;
};

BranchPair branch_decompose(const StateVector &s, const Projector &interacting, std::string interacting_label = "interacting",
                            std::string noninteracting_label = "noninteracting");

/// One interior transfer: w + delta on an up bit, w - delta otherwise.
/// Throws InputError unless delta < w < 1 - delta.
double stochastic_step(double w, double delta, bool up);

enum class Resolution { interacting, noninteracting };

/// Boundary rule: interacting with probability exactly w using one uniform draw.
/// w == 0 and w == 1 are decided without consuming a draw.
Resolution terminal_resolution(double w, GlobalStream &stream);

/// Position of a weight walk on the lattice w0 + level * delta.
///
/// The engine moves on integer levels so each step is an exact martingale
/// (the two successors average to the current level in integer arithmetic);
/// the weight is an affine function of the level.
struct WeightLattice {
    double origin;
    double delta;
    int64_t level = 0;

    double weight() const noexcept {
        return origin + static_cast<double>(level) * delta;
    }
    bool interior() const noexcept {
        double w = weight();
        return w > delta && w < 1.0 - delta;
    }
};

struct WalkOutcome {
    bool interacting_wins;
    /// Interior steps taken (excludes the terminal draw).
    uint64_t steps;
};

/// Symmetric +-delta walk from w0 until it leaves (delta, 1 - delta), then terminal_resolution.
/// If `trajectory` is non-null every visited weight (starting with w0) is appended.
WalkOutcome walk_to_collapse(double w0, const CollapseParams &params, GlobalStream &stream,
                             std::vector<double> *trajectory = nullptr);

struct CollapseResult {
    std::string winner;
    bool interacting_won;
    /// The whole winning branch, renormalized.
    StateVector state;
    std::vector<double> trajectory;
};

CollapseResult run_collapse(const StateVector &s, const BranchPair &pair, const CollapseParams &params, GlobalStream &stream,
                            bool record_trajectory = true);

struct WeightedBranch {
    std::string label;
    double weight;
};

/// Decides one pairwise contest. Returns true when the challenger wins given its relative weight.
/// The default is walk_to_collapse; test fixtures substitute other rules.
class ContestRule {
   public:
    virtual ~ContestRule() = default;

    struct Context {
        /// Site of the event being reduced (-1 when not tied to an event).
        int site = -1;
        /// Index of this reduction event among those already executed in the run.
        size_t ordinal = 0;
    };

    virtual bool challenger_wins(double w, const Context &ctx, GlobalStream &stream) const = 0;
};

class GamblersRuinRule : public ContestRule {
   public:
    explicit GamblersRuinRule(CollapseParams params);
    bool challenger_wins(double w, const Context &ctx, GlobalStream &stream) const override;
    const CollapseParams &params() const noexcept {
        return params_;
    }

   private:
    CollapseParams params_;
};

/// Winner among several branches via sequential pairwise contests.
///
/// The running champion carries the accumulated mass of every branch it has
/// beaten; the challenger wins with its weight relative to that mass, which
/// leaves each branch's marginal win probability equal to its weight.
/// `order` lists branch indices in contest order (defaults to listing order).
size_t multiway_collapse(std::span<const WeightedBranch> branches, const ContestRule &rule, GlobalStream &stream,
                         std::span<const size_t> order = {}, ContestRule::Context ctx = {});

size_t multiway_collapse(std::span<const WeightedBranch> branches, const CollapseParams &params, GlobalStream &stream,
                         std::span<const size_t> order = {});

struct MeasurementRecord {
    uint64_t event_id;
    size_t subsystem;
    /// +1 or -1.
    int outcome;
};

struct ExecutionResult {
    StateVector state;
    std::vector<MeasurementRecord> outcomes;
};

/// Runs a schedule on `initial`, consuming `stream` strictly in foliation order.
///
/// Measurement events sharing a global time form one joint reduction over their
/// product outcomes (multiway_collapse, branches in site order, + before -).
/// A measurement alone on its time slice is a binary reduction whose
/// interacting branch is the + outcome.
ExecutionResult execute_schedule(const FoliationSchedule &schedule, StateVector initial, const ContestRule &rule,
                                 GlobalStream &stream);

}  // namespace collapse_lab

#endif
