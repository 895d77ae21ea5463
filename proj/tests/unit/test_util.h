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

#ifndef CRASHLOC_TESTS_UNIT_TEST_UTIL_H_
#define CRASHLOC_TESTS_UNIT_TEST_UTIL_H_

#include <string>

namespace crashloc::testing {

// A fresh, empty directory under the system temp dir. Not removed
// automatically so failures can be inspected.
std::string MakeTempDir(const std::string& stem);

// Copies the bundled toy project to a fresh temp dir and returns its path.
std::string CopyToy();

std::string SourceDir();
std::string TestData(const std::string& relative);
std::string CliPath();

}  // namespace crashloc::testing

#endif  // CRASHLOC_TESTS_UNIT_TEST_UTIL_H_
