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

#ifndef COLLAPSE_LAB_FOLIATION_H
#define COLLAPSE_LAB_FOLIATION_H

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "collapse_lab/quantum_core.h"

namespace collapse_lab {

enum class EventKind { unitary, reduction, measurement };

const char *to_string(EventKind kind);

/// Local unitary applied to one subsystem.
struct UnitaryPayload {
    size_t subsystem;
    Eigen::MatrixXcd local;
};

/// Whole-branch reduction: `interacting` acts on the joint space.
struct ReductionPayload {
    Projector interacting;
};

/// Spin measurement along `angle` (x-z plane) on one subsystem.
struct MeasurementPayload {
    size_t subsystem;
    double angle;
};

using EventPayload = std::variant<std::monostate, UnitaryPayload, ReductionPayload, MeasurementPayload>;

struct EventRecord {
    uint64_t id = 0;
    double t = 0;
    int site = 0;
    EventKind kind = EventKind::unitary;
    EventPayload payload;
    /// Ids of events that must precede this one (causal dependency edges).
    std::vector<uint64_t> depends_on;
    /// Event may be reordered against other spacelike-tagged events it has no dependency path to.
    bool spacelike = false;
};

/// Globally time-ordered event list on the preferred foliation.
///
/// Ordering is by global time, then ascending site, then insertion order.
class FoliationSchedule {
   public:
    FoliationSchedule() = default;

    /// Inserts keeping the order. Throws InputError for a duplicate id or a non-finite time.
    void add(EventRecord event);

    std::span<const EventRecord> events() const noexcept {
        return events_;
    }
    size_t size() const noexcept {
        return events_.size();
    }
    const EventRecord *find(uint64_t id) const;

    /// True if `later` transitively depends on `earlier`.
    bool depends(uint64_t later, uint64_t earlier) const;

    /// Throws CausalityError if some event precedes one of its dependencies.
    void check_causal_order() const;

    bool operator==(const FoliationSchedule &other) const;

   private:
    std::vector<EventRecord> events_;
};

/// Reassigns the global times of a set of mutually spacelike events.
///
/// `new_order` lists the ids of the set in the order they should occur; the
/// set's existing times (sorted) are handed out in that order. Throws
/// CausalityError when any two events of the set are connected by a
/// dependency path, when an event is not spacelike-tagged, or when the result
/// would break a dependency with events outside the set.
FoliationSchedule reorder_schedule(const FoliationSchedule &schedule, std::span<const uint64_t> new_order);

}  // namespace collapse_lab

#endif
