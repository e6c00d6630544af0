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

#include <cmath>
#include <limits>
#include <vector>

#include "gtest/gtest.h"

#include "collapse_lab/errors.h"

using namespace collapse_lab;

namespace {

EventRecord measurement(uint64_t id, double t, int site, bool spacelike = true, std::vector<uint64_t> deps = {}) {
    EventRecord e;
    e.id = id;
    e.t = t;
    e.site = site;
    e.kind = EventKind::measurement;
    e.payload = MeasurementPayload{static_cast<size_t>(site), 0.0};
    e.spacelike = spacelike;
    e.depends_on = std::move(deps);
    return e;
}

EventRecord preparation(uint64_t id, double t) {
    EventRecord e;
    e.id = id;
    e.t = t;
    e.site = 0;
    e.kind = EventKind::unitary;
    e.payload = UnitaryPayload{0, Eigen::MatrixXcd::Identity(2, 2)};
    return e;
}

FoliationSchedule two_party() {
    FoliationSchedule s;
    s.add(preparation(1, 0.0));
    s.add(measurement(2, 1.0, 0, true, {1}));
    s.add(measurement(3, 2.0, 1, true, {1}));
    return s;
}

std::vector<uint64_t> ids(const FoliationSchedule &s) {
    std::vector<uint64_t> out;
    for (const auto &e : s.events()) {
        out.push_back(e.id);
    }
    return out;
}

}  // namespace

TEST(foliation_schedule, orders_by_time_then_site_then_insertion) {
    FoliationSchedule s;
    s.add(measurement(10, 2.0, 0));
    s.add(measurement(11, 1.0, 3));
    s.add(measurement(12, 1.0, 1));
    s.add(measurement(13, 1.0, 1));
    EXPECT_EQ(ids(s), (std::vector<uint64_t>{12, 13, 11, 10}));
    for (size_t i = 1; i < s.size(); i++) {
        const auto &a = s.events()[i - 1];
        const auto &b = s.events()[i];
        EXPECT_TRUE(a.t < b.t || (a.t == b.t && a.site <= b.site));
    }
}

TEST(foliation_schedule, rejects_duplicates_and_non_finite_times) {
    FoliationSchedule s;
    s.add(measurement(1, 0.0, 0));
    EXPECT_THROW(s.add(measurement(1, 1.0, 1)), InputError);
    EXPECT_THROW(s.add(measurement(2, std::numeric_limits<double>::quiet_NaN(), 1)), InputError);
    EXPECT_THROW(s.add(measurement(3, std::numeric_limits<double>::infinity(), 1)), InputError);
}

TEST(foliation_schedule, dependency_closure) {
    FoliationSchedule s = two_party();
    EXPECT_TRUE(s.depends(2, 1));
    EXPECT_TRUE(s.depends(3, 1));
    EXPECT_FALSE(s.depends(3, 2));
    EXPECT_FALSE(s.depends(1, 2));
    EXPECT_NO_THROW(s.check_causal_order());

    FoliationSchedule bad;
    bad.add(measurement(5, 0.0, 0, false, {6}));
    bad.add(preparation(6, 1.0));
    EXPECT_THROW(bad.check_causal_order(), CausalityError);
}

TEST(reorder_schedule, identity_permutation) {
    FoliationSchedule s = two_party();
    std::vector<uint64_t> order{2, 3};
    EXPECT_TRUE(reorder_schedule(s, order) == s);
}

TEST(reorder_schedule, swap_of_spacelike_measurements) {
    FoliationSchedule s = two_party();
    std::vector<uint64_t> order{3, 2};
    FoliationSchedule r = reorder_schedule(s, order);
    EXPECT_EQ(ids(r), (std::vector<uint64_t>{1, 3, 2}));
    EXPECT_EQ(r.find(3)->t, 1.0);
    EXPECT_EQ(r.find(2)->t, 2.0);
    EXPECT_NO_THROW(r.check_causal_order());
    // Swapping back restores the original.
    std::vector<uint64_t> back{2, 3};
    EXPECT_TRUE(reorder_schedule(r, back) == s);
}

TEST(reorder_schedule, preparation_before_measurement_is_causality_error) {
    FoliationSchedule s = two_party();
    std::vector<uint64_t> order{2, 1};
    EXPECT_THROW(reorder_schedule(s, order), CausalityError);
}

TEST(reorder_schedule, dependent_measurements_cannot_swap) {
    FoliationSchedule s;
    s.add(measurement(1, 1.0, 0));
    s.add(measurement(2, 2.0, 1, true, {1}));
    std::vector<uint64_t> order{2, 1};
    EXPECT_THROW(reorder_schedule(s, order), CausalityError);
}

TEST(reorder_schedule, untagged_events_cannot_move) {
    FoliationSchedule s;
    s.add(measurement(1, 1.0, 0, false));
    s.add(measurement(2, 2.0, 1, true));
    std::vector<uint64_t> order{2, 1};
    EXPECT_THROW(reorder_schedule(s, order), CausalityError);
}

TEST(reorder_schedule, unknown_id_is_rejected) {
    FoliationSchedule s = two_party();
    std::vector<uint64_t> order{3, 99};
    EXPECT_ANY_THROW(reorder_schedule(s, order));
}

TEST(event_kind, names) {
    EXPECT_STREQ(to_string(EventKind::unitary), "unitary");
    EXPECT_STREQ(to_string(EventKind::reduction), "reduction");
    EXPECT_STREQ(to_string(EventKind::measurement), "measurement");
}
