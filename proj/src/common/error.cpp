// Copyright 2026 The prefdiff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prefdiff/common/error.h"

namespace prefdiff {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kLengthExceeded: return "LengthExceeded";
    case ErrorCode::kCapability: return "CapabilityError";
    case ErrorCode::kDegenerateSource: return "DegenerateSource";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kAlignment: return "AlignmentError";
    case ErrorCode::kShape: return "ShapeError";
    case ErrorCode::kDimension: return "DimensionError";
    case ErrorCode::kDegenerate: return "DegenerateError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace prefdiff
