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

#include "qwb/error.hpp"

namespace qwb {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::Malformed: return "malformed";
        case ErrorCode::NotFound: return "not_found";
        case ErrorCode::Capacity: return "capacity";
        case ErrorCode::Numerical: return "numerical";
        case ErrorCode::Precondition: return "precondition";
        case ErrorCode::VersionMismatch: return "version_mismatch";
        case ErrorCode::CorruptFile: return "corrupt_file";
    }
    return "unknown";
}

}  // namespace qwb
