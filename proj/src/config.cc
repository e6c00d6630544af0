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

#include "collapse_lab/config.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "collapse_lab/errors.h"

namespace collapse_lab {

namespace {

using nlohmann::json;

enum class Kind { integer, real, text, flag, real_list };

struct KeySpec {
    Kind kind;
    json fallback;
    bool required = false;
    std::vector<std::string> choices = {};
    /// Part of the fingerprint. Output location and worker count do not change results.
    bool fingerprinted = true;
};

using Schema = std::map<std::string, KeySpec>;

std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return "";
    }
    size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string strip_comment(const std::string &line) {
    bool quoted = false;
    for (size_t k = 0; k < line.size(); k++) {
        char c = line[k];
        if (c == '"' && (k == 0 || line[k - 1] != '\\')) {
            quoted = !quoted;
        } else if (c == '#' && !quoted) {
            return line.substr(0, k);
        }
    }
    return line;
}

bool valid_key(const std::string &key) {
    if (key.empty() || key.front() == '.' || key.back() == '.') {
        return false;
    }
    return std::all_of(key.begin(), key.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
    });
}

Schema schema_for(const std::string &experiment) {
    using std::numbers::pi;
    Schema s = {
        {"experiment", {Kind::text, json(), true}},
        {"seed", {Kind::integer, json(), true}},
        {"runs", {Kind::integer, json(10000)}},
        {"threads", {Kind::integer, json(0), false, {}, false}},
        {"output.path", {Kind::text, json(""), false, {}, false}},
        {"output.format", {Kind::text, json("json"), false, {"csv", "json"}, false}},
        {"engine.delta", {Kind::real, json(0.01)}},
        {"engine.tau_step", {Kind::real, json(1.0 / 64.0)}},
    };
    auto quartet = [&] {
        s["chsh.a"] = {Kind::real, json(0.0)};
        s["chsh.a_prime"] = {Kind::real, json(pi / 2)};
        s["chsh.b"] = {Kind::real, json(pi / 4)};
        s["chsh.b_prime"] = {Kind::real, json(3 * pi / 4)};
    };
    if (experiment == "born") {
        s["born.weights"] = {Kind::real_list, json::array({0.1, 0.25, 0.5, 0.75, 0.9})};
    } else if (experiment == "chsh-quantum" || experiment == "nosignal") {
        s["runs"].fallback = 100000;
        quartet();
        s["chsh.sampler"] = {Kind::text, json("engine"), false, {"engine", "born"}};
    } else if (experiment == "chsh-lhv") {
        s["runs"].fallback = 100000;
        quartet();
        s["lhv.model"] = {Kind::text, json("sign-cos"), false, {"sign-cos", "constant", "fair-coin", "random"}};
        s["lhv.model_seed"] = {Kind::integer, json(1)};
    } else if (experiment == "order-invariance") {
        s["order.a"] = {Kind::real, json(0.0)};
        s["order.b"] = {Kind::real, json(0.0)};
        s["order.preparation"] = {Kind::text, json("singlet"), false, {"singlet", "product"}};
    } else if (experiment == "conservation") {
        s["conservation.reflectivity"] = {Kind::real, json(0.5)};
        s["conservation.entangled"] = {Kind::flag, json(true)};
    } else if (experiment == "collapse-trace") {
        s["runs"].fallback = 10;
        s["trace.w0"] = {Kind::real, json(0.3)};
        s["trace.physical"] = {Kind::flag, json(false)};
    }
    return s;
}

json coerce(const std::string &key, const KeySpec &spec, const json &v) {
    auto mismatch = [&](const char *want) { return ConfigError(key, std::string("expected ") + want + ", got " + v.dump()); };
    switch (spec.kind) {
        case Kind::integer:
            if (v.is_number_unsigned()) {
                return v;
            }
            if (v.is_number_integer()) {
                if (v.get<int64_t>() < 0) {
                    throw mismatch("a nonnegative integer");
                }
                return json(v.get<uint64_t>());
            }
            if (v.is_number_float()) {
                double d = v.get<double>();
                if (d >= 0 && d == std::floor(d) && d < 1.8e19) {
                    return json(static_cast<uint64_t>(d));
                }
            }
            throw mismatch("a nonnegative integer");
        case Kind::real:
            if (v.is_number()) {
                double d = v.get<double>();
                if (!std::isfinite(d)) {
                    throw mismatch("a finite number");
                }
                return json(d);
            }
            throw mismatch("a number");
        case Kind::text:
            if (!v.is_string()) {
                throw mismatch("a string");
            }
            if (!spec.choices.empty() &&
                std::find(spec.choices.begin(), spec.choices.end(), v.get<std::string>()) == spec.choices.end()) {
                std::string options;
                for (const auto &c : spec.choices) {
                    options += (options.empty() ? "" : "|") + c;
                }
                throw ConfigError(key, "expected one of " + options + ", got " + v.dump());
            }
            return v;
        case Kind::flag:
            if (!v.is_boolean()) {
                throw mismatch("true or false");
            }
            return v;
        case Kind::real_list: {
            if (!v.is_array() || v.empty()) {
                throw mismatch("a nonempty list of numbers");
            }
            json out = json::array();
            for (const auto &e : v) {
                if (!e.is_number()) {
                    throw mismatch("a nonempty list of numbers");
                }
                out.push_back(e.get<double>());
            }
            return out;
        }
    }
    throw ConfigError(key, "unsupported key kind");
}

}  // namespace

ConfigDocument parse_config_document(std::string_view text) {
    ConfigDocument doc;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::string section;
    size_t line_no = 0;
    while (std::getline(in, raw)) {
        line_no++;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) {
            continue;
        }
        std::string where = "line " + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(where, "unterminated section header");
            }
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (!section.empty() && !valid_key(section)) {
                throw ConfigError(where, "bad section name '" + section + "'");
            }
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where, "expected 'key = value'");
        }
        std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (!section.empty()) {
            key = section + "." + key;
        }
        if (!valid_key(key)) {
            throw ConfigError(key.empty() ? where : key, "bad key name");
        }
        if (value.empty()) {
            throw ConfigError(key, "missing value");
        }
        json parsed = json::parse(value, nullptr, false);
        if (parsed.is_discarded()) {
            parsed = value;
        }
        if (!doc.emplace(key, std::move(parsed)).second) {
            throw ConfigError(key, "duplicate key");
        }
    }
    return doc;
}

const std::vector<std::string> &experiment_names() {
    static const std::vector<std::string> names = {"born",         "chsh-quantum", "chsh-lhv",      "nosignal",
                                                   "order-invariance", "conservation", "collapse-trace"};
    return names;
}

RunConfig validate_config(const ConfigDocument &doc) {
    auto exp_it = doc.find("experiment");
    if (exp_it == doc.end()) {
        throw ConfigError("experiment", "missing required key");
    }
    if (!exp_it->second.is_string()) {
        throw ConfigError("experiment", "expected a string, got " + exp_it->second.dump());
    }
    std::string experiment = exp_it->second.get<std::string>();
    const auto &names = experiment_names();
    if (std::find(names.begin(), names.end(), experiment) == names.end()) {
        throw ConfigError("experiment", "unknown experiment '" + experiment + "'");
    }

    Schema schema = schema_for(experiment);
    for (const auto &[key, value] : doc) {
        if (schema.find(key) == schema.end()) {
            throw ConfigError(key, "unknown key");
        }
    }
    RunConfig config;
    config.experiment_ = experiment;
    for (const auto &[key, spec] : schema) {
        auto it = doc.find(key);
        if (it == doc.end()) {
            if (spec.required) {
                throw ConfigError(key, "missing required key");
            }
            config.values_[key] = spec.fallback;
        } else {
            config.values_[key] = coerce(key, spec, it->second);
        }
    }
    std::string identity;
    for (const auto &[key, value] : config.values_) {
        if (schema[key].fingerprinted) {
            identity += key + " = " + value.dump() + "\n";
        }
    }
    config.fingerprint_ = fnv1a_hex(identity);
    return config;
}

RunConfig parse_config(std::string_view text) {
    return validate_config(parse_config_document(text));
}

const nlohmann::json &RunConfig::at(const std::string &key) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError(key, "not defined for experiment '" + experiment_ + "'");
    }
    return it->second;
}

uint64_t RunConfig::integer(const std::string &key) const {
    return at(key).get<uint64_t>();
}

double RunConfig::real(const std::string &key) const {
    return at(key).get<double>();
}

std::string RunConfig::text(const std::string &key) const {
    return at(key).get<std::string>();
}

bool RunConfig::flag(const std::string &key) const {
    return at(key).get<bool>();
}

std::vector<double> RunConfig::reals(const std::string &key) const {
    return at(key).get<std::vector<double>>();
}

std::string RunConfig::canonical_form() const {
    std::string out;
    for (const auto &[key, value] : values_) {
        out += key + " = " + value.dump() + "\n";
    }
    return out;
}

std::string fnv1a_hex(std::string_view data) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace collapse_lab
