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

#ifndef COLLAPSE_LAB_CONFIG_H
#define COLLAPSE_LAB_CONFIG_H

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace collapse_lab {

/// Raw key/value pairs of a configuration document, keyed by dotted path.
using ConfigDocument = std::map<std::string, nlohmann::json>;

/// Parses the key-value format:
///
///     # comment
///     experiment = chsh-quantum
///     seed = 42
///     [chsh]
///     a = 0.0            # becomes chsh.a
///     sampler = engine   # bare words are strings
///     [born]
///     weights = [0.1, 0.5]
///
/// Values are JSON literals where they parse as one, otherwise bare strings.
/// Throws ConfigError naming the key for duplicates and malformed lines.
ConfigDocument parse_config_document(std::string_view text);

/// Names accepted by dispatch.
const std::vector<std::string> &experiment_names();

/// Validated configuration with every default filled in.
class RunConfig {
   public:
    const std::string &experiment() const noexcept {
        return experiment_;
    }
    const std::string &fingerprint() const noexcept {
        return fingerprint_;
    }
    const ConfigDocument &values() const noexcept {
        return values_;
    }

    uint64_t seed() const {
        return integer("seed");
    }
    uint64_t runs() const {
        return integer("runs");
    }
    size_t threads() const {
        return static_cast<size_t>(integer("threads"));
    }
    std::string output_path() const {
        return text("output.path");
    }
    std::string output_format() const {
        return text("output.format");
    }

    uint64_t integer(const std::string &key) const;
    double real(const std::string &key) const;
    std::string text(const std::string &key) const;
    bool flag(const std::string &key) const;
    std::vector<double> reals(const std::string &key) const;

    /// Sorted "key = value" lines; parse_config(canonical_form()) reproduces this config.
    std::string canonical_form() const;

   private:
    friend RunConfig validate_config(const ConfigDocument &doc);
    const nlohmann::json &at(const std::string &key) const;

    std::string experiment_;
    ConfigDocument values_;
    std::string fingerprint_;
};

/// Checks keys and types against the experiment's schema and fills defaults.
/// Throws ConfigError with the key path on unknown keys, missing required keys,
/// type mismatches, or an unknown experiment.
RunConfig validate_config(const ConfigDocument &doc);

RunConfig parse_config(std::string_view text);

/// 64-bit FNV-1a of `data` as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace collapse_lab

#endif
