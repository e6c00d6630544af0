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

#ifndef COLLAPSE_LAB_DISPATCH_H
#define COLLAPSE_LAB_DISPATCH_H

#include <exception>

#include "collapse_lab/config.h"
#include "collapse_lab/report.h"

namespace collapse_lab {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitSuccess = 0,
    kExitConfig = 2,
    kExitNumerical = 3,
    kExitIo = 4,
};

/// Exit code for an exception escaping a run: config and input errors 2,
/// IO errors 4, anything else 3.
int exit_code_for(const std::exception &e);

/// Runs the configured experiment. Identical configs give identical reports
/// regardless of the worker count.
ExperimentReport dispatch(const RunConfig &config);

}  // namespace collapse_lab

#endif
