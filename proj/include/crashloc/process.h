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

#ifndef CRASHLOC_PROCESS_H_
#define CRASHLOC_PROCESS_H_

#include <optional>
#include <string>
#include <vector>

namespace crashloc {

struct ProcessResult {
  // Set when the process exited normally.
  std::optional<int> exit_code;
  // Set when the process was killed by a signal (e.g. 11).
  std::optional<int> term_signal;
  bool timed_out = false;
  // stdout and stderr, interleaved.
  std::string output;
  double elapsed_secs = 0.0;
};

// Runs `argv` in `cwd` as leader of a new session with stdin on /dev/null.
// On timeout every process of that session is killed. A non-positive
// timeout waits indefinitely. Throws kIoError if the process cannot start.
ProcessResult RunProcess(const std::vector<std::string>& argv,
                         const std::string& cwd, double timeout_secs);

// "SIGSEGV" for 11 and so on; "SIG<n>" for unknown numbers.
std::string SignalName(int signal);

}  // namespace crashloc

#endif  // CRASHLOC_PROCESS_H_
