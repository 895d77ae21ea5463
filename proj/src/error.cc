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

#include "crashloc/error.h"

namespace crashloc {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kUnsupportedLanguage: return "UnsupportedLanguage";
    case ErrorCode::kStaleSite: return "StaleSite";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kBaselineFailed: return "BaselineFailed";
    case ErrorCode::kEmptyPlan: return "EmptyPlan";
    case ErrorCode::kWorkspaceDirty: return "WorkspaceDirty";
    case ErrorCode::kRevertFailed: return "RevertFailed";
    case ErrorCode::kJournalCorrupt: return "JournalCorrupt";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kNoFramesFound: return "NoFramesFound";
    case ErrorCode::kBudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kNotDeduplicated: return "NotDeduplicated";
    case ErrorCode::kEmptyBatch: return "EmptyBatch";
    case ErrorCode::kMissingFilePart: return "MissingFilePart";
    case ErrorCode::kEmptyTrainSet: return "EmptyTrainSet";
    case ErrorCode::kUnknownSampleId: return "UnknownSampleId";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace crashloc
