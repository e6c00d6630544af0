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

#include "collapse_lab/report.h"

#include <string>

#include "collapse_lab/errors.h"

namespace collapse_lab {

namespace {

const double *lookup(const NamedValues &values, std::string_view key) {
    for (const auto &[k, v] : values) {
        if (k == key) {
            return &v;
        }
    }
    return nullptr;
}

}  // namespace

double ExperimentReport::statistic(std::string_view key) const {
    if (const double *v = lookup(statistics, key)) {
        return *v;
    }
    throw InputError("report has no statistic '" + std::string(key) + "'");
}

double ExperimentReport::diagnostic(std::string_view key) const {
    if (const double *v = lookup(diagnostics, key)) {
        return *v;
    }
    throw InputError("report has no diagnostic '" + std::string(key) + "'");
}

bool ExperimentReport::has_statistic(std::string_view key) const {
    return lookup(statistics, key) != nullptr;
}

}  // namespace collapse_lab
