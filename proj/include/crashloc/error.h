// Copyright 2026 The crashloc Authors
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

#ifndef CRASHLOC_ERROR_H_
#define CRASHLOC_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace crashloc {

enum class ErrorCode {
  kIoError,
  kUnsupportedLanguage,
  kStaleSite,
  kMalformedRow,
  kBaselineFailed,
  kEmptyPlan,
  kWorkspaceDirty,
  kRevertFailed,
  kJournalCorrupt,
  kConfigError,
  kNoFramesFound,
  kBudgetTooSmall,
  kEmptyDataset,
  kNotDeduplicated,
  kEmptyBatch,
  kMissingFilePart,
  kEmptyTrainSet,
  kUnknownSampleId,
  kParseError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception. The code is
// stable and meant for programmatic dispatch; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

  // Hygiene failures are fatal for a campaign; the CLI maps them to exit 2.
  bool IsHygieneFatal() const {
    return code_ == ErrorCode::kRevertFailed ||
           code_ == ErrorCode::kWorkspaceDirty ||
           code_ == ErrorCode::kBaselineFailed;
  }

 private:
  ErrorCode code_;
};

}  // namespace crashloc

#endif  // CRASHLOC_ERROR_H_
