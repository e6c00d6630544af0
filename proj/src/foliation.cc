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

#include "collapse_lab/foliation.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "collapse_lab/errors.h"

namespace collapse_lab {

const char *to_string(EventKind kind) {
    switch (kind) {
        case EventKind::unitary:
            return "unitary";
        case EventKind::reduction:
            return "reduction";
        case EventKind::measurement:
            return "measurement";
    }
    return "?";
}

void FoliationSchedule::add(EventRecord event) {
    if (!std::isfinite(event.t)) {
        throw InputError("event time must be finite");
    }
    if (find(event.id) != nullptr) {
        throw InputError("duplicate event id " + std::to_string(event.id));
    }
    size_t pos = 0;
    while (pos < events_.size()) {
        const auto &e = events_[pos];
        if (e.t > event.t || (e.t == event.t && e.site > event.site)) {
            break;
        }
        pos++;
    }
    events_.insert(events_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(event));
}

const EventRecord *FoliationSchedule::find(uint64_t id) const {
    for (const auto &e : events_) {
        if (e.id == id) {
            return &e;
        }
    }
    return nullptr;
}

bool FoliationSchedule::depends(uint64_t later, uint64_t earlier) const {
    std::vector<uint64_t> stack{later};
    std::unordered_set<uint64_t> seen;
    while (!stack.empty()) {
        uint64_t cur = stack.back();
        stack.pop_back();
        const EventRecord *e = find(cur);
        if (e == nullptr) {
            continue;
        }
        for (uint64_t dep : e->depends_on) {
            if (dep == earlier) {
                return true;
            }
            if (seen.insert(dep).second) {
                stack.push_back(dep);
            }
        }
    }
    return false;
}

void FoliationSchedule::check_causal_order() const {
    std::unordered_map<uint64_t, size_t> position;
    for (size_t k = 0; k < events_.size(); k++) {
        position[events_[k].id] = k;
    }
    for (size_t k = 0; k < events_.size(); k++) {
        for (uint64_t dep : events_[k].depends_on) {
            auto it = position.find(dep);
            if (it == position.end()) {
                throw CausalityError("event " + std::to_string(events_[k].id) + " depends on unknown event " + std::to_string(dep));
            }
            if (it->second >= k || events_[it->second].t >= events_[k].t) {
                throw CausalityError(
                    "event " + std::to_string(events_[k].id) + " is not after its dependency " + std::to_string(dep));
            }
        }
    }
}

bool FoliationSchedule::operator==(const FoliationSchedule &other) const {
    if (events_.size() != other.events_.size()) {
        return false;
    }
    for (size_t k = 0; k < events_.size(); k++) {
        const auto &a = events_[k];
        const auto &b = other.events_[k];
        if (a.id != b.id || a.t != b.t || a.site != b.site || a.kind != b.kind || a.depends_on != b.depends_on ||
            a.spacelike != b.spacelike) {
            return false;
        }
    }
    return true;
}

FoliationSchedule reorder_schedule(const FoliationSchedule &schedule, std::span<const uint64_t> new_order) {
    std::vector<const EventRecord *> members;
    for (uint64_t id : new_order) {
        const EventRecord *e = schedule.find(id);
        if (e == nullptr) {
            throw InputError("reorder_schedule: unknown event id " + std::to_string(id));
        }
        if (std::find(members.begin(), members.end(), e) != members.end()) {
            throw InputError("reorder_schedule: repeated event id " + std::to_string(id));
        }
        members.push_back(e);
    }
    for (const auto *a : members) {
        for (const auto *b : members) {
            if (a != b && schedule.depends(a->id, b->id)) {
                throw CausalityError(
                    "events " + std::to_string(b->id) + " and " + std::to_string(a->id) + " are causally connected");
            }
        }
        if (!a->spacelike) {
            throw CausalityError("event " + std::to_string(a->id) + " is not tagged spacelike");
        }
    }

    // Times of the set in their current foliation order.
    std::vector<double> times;
    for (const auto &e : schedule.events()) {
        if (std::find(members.begin(), members.end(), &e) != members.end()) {
            times.push_back(e.t);
        }
    }
    std::unordered_map<uint64_t, double> new_time;
    for (size_t k = 0; k < members.size(); k++) {
        new_time[members[k]->id] = times[k];
    }

    std::vector<EventRecord> rewritten;
    for (const auto &e : schedule.events()) {
        EventRecord copy = e;
        if (auto it = new_time.find(e.id); it != new_time.end()) {
            copy.t = it->second;
        }
        rewritten.push_back(std::move(copy));
    }
    FoliationSchedule out;
    for (auto &e : rewritten) {
        out.add(std::move(e));
    }
    out.check_causal_order();
    return out;
}

}  // namespace collapse_lab
