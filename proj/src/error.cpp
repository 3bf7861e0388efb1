// Copyright 2026 The autoscore Authors
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

#include "autoscore/error.hpp"

namespace autoscore {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidRange: return "InvalidRange";
    case ErrorCode::kInvalidValue: return "InvalidValue";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kInvalidSchema: return "InvalidSchema";
    case ErrorCode::kDuplicateField: return "DuplicateField";
    case ErrorCode::kDanglingDerivation: return "DanglingDerivation";
    case ErrorCode::kEmptySchema: return "EmptySchema";
    case ErrorCode::kNoJsonFound: return "NoJsonFound";
    case ErrorCode::kMissingField: return "MissingField";
    case ErrorCode::kTypeMismatch: return "TypeMismatch";
    case ErrorCode::kTransport: return "Transport";
    case ErrorCode::kRateLimited: return "RateLimited";
    case ErrorCode::kReplayMiss: return "ReplayMiss";
    case ErrorCode::kInvalidRequest: return "InvalidRequest";
    case ErrorCode::kUnboundPlaceholder: return "UnboundPlaceholder";
    case ErrorCode::kNonInteger: return "NonInteger";
    case ErrorCode::kExtractionFailed: return "ExtractionFailed";
    case ErrorCode::kScoringFailed: return "ScoringFailed";
    case ErrorCode::kManifestMismatch: return "ManifestMismatch";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNoGold: return "NoGold";
    case ErrorCode::kAlignmentError: return "AlignmentError";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kZeroBase: return "ZeroBase";
    case ErrorCode::kNotFound: return "NotFound";
  }
  return "Unknown";
}

}  // namespace autoscore
