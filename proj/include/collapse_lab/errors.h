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

#ifndef COLLAPSE_LAB_ERRORS_H
#define COLLAPSE_LAB_ERRORS_H

#include <stdexcept>
#include <string>

namespace collapse_lab {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
    using Error::Error;
};
struct NormalizationError : Error {
    using Error::Error;
};
/// A projection onto a branch whose Born weight is (numerically) zero.
struct NullOutcomeError : Error {
    using Error::Error;
};
struct CompletenessError : Error {
    using Error::Error;
};
/// Invalid argument value (out of range, non-finite, malformed operator).
struct InputError : Error {
    using Error::Error;
};
/// A schedule edit would move an event ahead of one it depends on.
struct CausalityError : Error {
    using Error::Error;
};
struct InsufficientDataError : Error {
    using Error::Error;
};
/// A hidden-variable model produced a response outside {+1, -1}.
struct ModelError : Error {
    using Error::Error;
};
/// Something the engine guarantees by construction did not hold.
struct InternalInvariantError : Error {
    using Error::Error;
};
struct NumericalError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

/// Configuration problem. `key_path()` names the offending dotted key.
class ConfigError : public Error {
   public:
    ConfigError(std::string key_path, const std::string &message)
        : Error(key_path.empty() ? message : key_path + ": " + message), key_path_(std::move(key_path)) {
    }
    const std::string &key_path() const noexcept {
        return key_path_;
    }

   private:
    std::string key_path_;
};

}  // namespace collapse_lab

#endif
