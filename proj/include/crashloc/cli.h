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

#ifndef CRASHLOC_CLI_H_
#define CRASHLOC_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace crashloc {

// Exit codes: 0 success, 1 usage or data error, 2 workspace hygiene failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitHygiene = 2;

// Runs one `crashloc` invocation. `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace crashloc

#endif  // CRASHLOC_CLI_H_
