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

#ifndef COLLAPSE_LAB_REPORT_IO_H
#define COLLAPSE_LAB_REPORT_IO_H

#include <string>
#include <string_view>

#include "collapse_lab/report.h"

namespace collapse_lab {

/// 12 significant digits, shortest form ("%.12g"); negative zero prints as 0.
std::string format_real(double x);

/// Counts as CSV with header `a_setting,b_setting,outcome_a,outcome_b,count`.
/// Rows of a named group are preceded by a `# group=<name>` line.
std::string counts_csv(const ExperimentReport &report);

/// Trajectory as CSV with header `run_index,step_index,w`.
std::string trajectory_csv(const ExperimentReport &report);

/// {schemaVersion, experiment, seed, fingerprint, statistics, diagnostics, counts, trajectory?}, 2-space indent.
std::string report_json(const ExperimentReport &report);

/// Inverse of report_json (reals come back rounded to 12 significant digits).
ExperimentReport parse_report_json(std::string_view text);

/// Writes `report` as "csv" or "json" to `path` ("" or "-" for stdout). In csv
/// format a nonempty trajectory goes to `<path>.trajectory.csv`.
/// Throws IoError when a file cannot be written, InputError for an unknown format.
void emit_report(const ExperimentReport &report, const std::string &format, const std::string &path);

}  // namespace collapse_lab

#endif
