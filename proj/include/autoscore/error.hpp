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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace autoscore {

// Every failure the library reports carries one of these codes so callers
// (the pipeline, the CLI exit-code mapping, tests) can branch on the kind
// without parsing messages.
enum class ErrorCode {
  // core_model
  kInvalidRange,
  kInvalidValue,
  kOutOfRange,
  // schema
  kInvalidSchema,
  kDuplicateField,
  kDanglingDerivation,
  kEmptySchema,
  kNoJsonFound,
  kMissingField,
  kTypeMismatch,
  // backend
  kTransport,
  kRateLimited,
  kReplayMiss,
  kInvalidRequest,
  // agents
  kUnboundPlaceholder,
  kNonInteger,
  kExtractionFailed,
  kScoringFailed,
  // pipeline
  kManifestMismatch,
  kConfig,
  kIo,
  // ingest
  kMissingColumn,
  kMalformedRow,
  kEmptySelection,
  // metrics
  kLengthMismatch,
  kEmptyInput,
  kNoGold,
  kAlignmentError,
  kSchemaMismatch,
  // report
  kZeroBase,
  kNotFound,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace autoscore
