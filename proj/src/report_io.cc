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

#include "collapse_lab/report_io.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "json.hpp"

#include "collapse_lab/errors.h"

namespace collapse_lab {

namespace {

using nlohmann::ordered_json;

double round12(double x) {
    return std::strtod(format_real(x).c_str(), nullptr);
}

ordered_json real_json(double x) {
    if (!std::isfinite(x)) {
        return nullptr;
    }
    return round12(x);
}

ordered_json named_json(const NamedValues &values) {
    ordered_json out = ordered_json::object();
    for (const auto &[k, v] : values) {
        out[k] = real_json(v);
    }
    return out;
}

NamedValues named_from(const ordered_json &j) {
    NamedValues out;
    for (const auto &[k, v] : j.items()) {
        out.emplace_back(k, v.is_null() ? std::nan("") : v.get<double>());
    }
    return out;
}

void write_file(const std::string &path, const std::string &content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        if (!std::cout) {
            throw IoError("failed writing to stdout");
        }
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << content;
    out.close();
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

}  // namespace

std::string format_real(double x) {
    if (x == 0) {
        x = 0;  // drops the sign of -0
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string counts_csv(const ExperimentReport &report) {
    std::string out = "a_setting,b_setting,outcome_a,outcome_b,count\n";
    const std::string *group = nullptr;
    for (const auto &r : report.counts) {
        if (!r.group.empty() && (group == nullptr || *group != r.group)) {
            out += "# group=" + r.group + "\n";
        }
        group = &r.group;
        out += format_real(r.a_setting) + "," + format_real(r.b_setting) + "," + std::to_string(r.outcome_a) + "," +
               std::to_string(r.outcome_b) + "," + std::to_string(r.count) + "\n";
    }
    return out;
}

std::string trajectory_csv(const ExperimentReport &report) {
    std::string out = "run_index,step_index,w\n";
    for (const auto &r : report.trajectory) {
        out += std::to_string(r.run_index) + "," + std::to_string(r.step_index) + "," + format_real(r.w) + "\n";
    }
    return out;
}

std::string report_json(const ExperimentReport &report) {
    ordered_json j;
    j["schemaVersion"] = kReportSchemaVersion;
    j["experiment"] = report.experiment;
    j["seed"] = report.seed;
    j["fingerprint"] = report.fingerprint;
    j["statistics"] = named_json(report.statistics);
    j["diagnostics"] = named_json(report.diagnostics);
    ordered_json counts = ordered_json::array();
    for (const auto &r : report.counts) {
        ordered_json row;
        if (!r.group.empty()) {
            row["group"] = r.group;
        }
        row["a_setting"] = real_json(r.a_setting);
        row["b_setting"] = real_json(r.b_setting);
        row["outcome_a"] = r.outcome_a;
        row["outcome_b"] = r.outcome_b;
        row["count"] = r.count;
        counts.push_back(std::move(row));
    }
    j["counts"] = std::move(counts);
    if (!report.trajectory.empty()) {
        ordered_json traj = ordered_json::array();
        for (const auto &r : report.trajectory) {
            traj.push_back(ordered_json::array({r.run_index, r.step_index, real_json(r.w)}));
        }
        j["trajectory"] = std::move(traj);
    }
    return j.dump(2) + "\n";
}

ExperimentReport parse_report_json(std::string_view text) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw InputError("report is not a JSON object");
    }
    try {
        if (j.at("schemaVersion").get<int>() != kReportSchemaVersion) {
            throw InputError("unsupported report schemaVersion");
        }
        ExperimentReport r;
        r.experiment = j.at("experiment").get<std::string>();
        r.seed = j.at("seed").get<uint64_t>();
        r.fingerprint = j.at("fingerprint").get<std::string>();
        r.statistics = named_from(j.at("statistics"));
        if (j.contains("diagnostics")) {
            r.diagnostics = named_from(j.at("diagnostics"));
        }
        for (const auto &row : j.at("counts")) {
            CountRow c;
            c.group = row.value("group", "");
            c.a_setting = row.at("a_setting").get<double>();
            c.b_setting = row.at("b_setting").get<double>();
            c.outcome_a = row.at("outcome_a").get<int>();
            c.outcome_b = row.at("outcome_b").get<int>();
            c.count = row.at("count").get<uint64_t>();
            r.counts.push_back(std::move(c));
        }
        if (j.contains("trajectory")) {
            for (const auto &row : j.at("trajectory")) {
                r.trajectory.push_back({row.at(0).get<uint64_t>(), row.at(1).get<uint64_t>(), row.at(2).get<double>()});
            }
        }
        return r;
    } catch (const nlohmann::json::exception &e) {
        throw InputError(std::string("malformed report: ") + e.what());
    }
}

void emit_report(const ExperimentReport &report, const std::string &format, const std::string &path) {
    if (format == "json") {
        write_file(path, report_json(report));
    } else if (format == "csv") {
        write_file(path, counts_csv(report));
        if (!report.trajectory.empty()) {
            bool to_stdout = path.empty() || path == "-";
            write_file(to_stdout ? path : path + ".trajectory.csv", (to_stdout ? "\n" : "") + trajectory_csv(report));
        }
    } else {
        throw InputError("unknown output format '" + format + "'");
    }
}

}  // namespace collapse_lab
