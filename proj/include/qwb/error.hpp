// Copyright 2026 The qwb Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qwb {

enum class ErrorCode {
    InvalidArgument,   // precondition on a value or shape
    Malformed,         // document could not be parsed
    NotFound,          // unknown id of any kind
    Capacity,          // request exceeds a desk-scale limit
    Numerical,         // non-finite value or divergence
    Precondition,      // incompatible artifact kind / state
    VersionMismatch,
    CorruptFile,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the library. `context()` carries the offending
/// identifier (node id, entity id, line/field, point) when one exists.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &message, std::string context = {})
        : std::runtime_error(message), code_(code), context_(std::move(context)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string &context() const noexcept { return context_; }

  private:
    ErrorCode code_;
    std::string context_;
};

}  // namespace qwb
