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

#ifndef COLLAPSE_LAB_REPORT_H
#define COLLAPSE_LAB_REPORT_H

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace collapse_lab {

inline constexpr int kReportSchemaVersion = 1;

/// One cell of a count table. `group` separates tables that share a report
/// (for example the two orderings of the order-invariance experiment).
struct CountRow {
    std::string group;
    double a_setting = 0;
    double b_setting = 0;
    int outcome_a = 0;
    int outcome_b = 0;
    uint64_t count = 0;

    bool operator==(const CountRow &) const = default;
};

/// Branch weight after a reduction step.
struct TrajectoryRow {
    uint64_t run_index = 0;
    uint64_t step_index = 0;
    double w = 0;

    bool operator==(const TrajectoryRow &) const = default;
};

using NamedValues = std::vector<std::pair<std::string, double>>;

struct ExperimentReport {
    std::string experiment;
    uint64_t seed = 0;
    std::string fingerprint;
    /// Derived from `counts` (and `trajectory`) only; see recompute_statistics.
    NamedValues statistics;
    /// Inputs and side computations that are not derivable from counts.
    NamedValues diagnostics;
    std::vector<CountRow> counts;
    std::vector<TrajectoryRow> trajectory;

    /// Throws InputError for an unknown key.
    double statistic(std::string_view key) const;
    double diagnostic(std::string_view key) const;
    bool has_statistic(std::string_view key) const;
};

}  // namespace collapse_lab

#endif
