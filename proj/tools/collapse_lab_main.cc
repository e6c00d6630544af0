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

// collapse_lab: run one experiment and write its report.
//
//   collapse_lab <experiment> [--config FILE] [--seed N] [--runs N]
//                [--out PATH] [--format csv|json] [--threads N]
//
// Flags override the config file. Exit codes: 0 ok, 2 config or unknown
// experiment, 3 numerical failure, 4 IO failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "collapse_lab/config.h"
#include "collapse_lab/dispatch.h"
#include "collapse_lab/errors.h"
#include "collapse_lab/report_io.h"

using namespace collapse_lab;

namespace {

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read config '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Stochastic collapse experiment runner"};
    std::string experiment;
    std::string config_path;
    std::optional<uint64_t> seed;
    std::optional<uint64_t> runs;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<uint64_t> threads;
    bool print_config = false;

    std::string names;
    for (const auto &n : experiment_names()) {
        names += (names.empty() ? "" : ", ") + n;
    }
    app.add_option("experiment", experiment, "One of: " + names)->required();
    app.add_option("--config", config_path, "Key-value configuration file");
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--runs", runs, "Runs (per setting pair for CHSH experiments)");
    app.add_option("--out", out, "Output path, '-' for stdout");
    app.add_option("--format", format, "csv or json");
    app.add_option("--threads", threads, "Ensemble workers (default: COLLAPSE_LAB_THREADS or hardware count)");
    app.add_flag("--print-config", print_config, "Print the canonical config and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitSuccess : kExitConfig;
    }

    try {
        ConfigDocument doc;
        if (!config_path.empty()) {
            doc = parse_config_document(read_file(config_path));
        }
        if (auto it = doc.find("experiment"); it != doc.end() && it->second != experiment) {
            throw ConfigError("experiment", "config file names " + it->second.dump() + " but the command is '" + experiment + "'");
        }
        doc["experiment"] = experiment;
        if (seed) {
            doc["seed"] = *seed;
        }
        if (runs) {
            doc["runs"] = *runs;
        }
        if (out) {
            doc["output.path"] = *out;
        }
        if (format) {
            doc["output.format"] = *format;
        }
        if (threads) {
            doc["threads"] = *threads;
        }
        RunConfig config = validate_config(doc);
        if (print_config) {
            std::cout << config.canonical_form();
            return kExitSuccess;
        }
        ExperimentReport report = dispatch(config);
        emit_report(report, config.output_format(), config.output_path());
        return kExitSuccess;
    } catch (const std::exception &e) {
        int code = exit_code_for(e);
        const char *kind = code == kExitConfig ? "config error" : code == kExitIo ? "io error" : "numerical failure";
        std::cerr << kind << ": " << e.what() << "\n";
        return code;
    }
}
