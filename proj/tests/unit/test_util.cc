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

#include "test_util.h"

#include <unistd.h>

#include <atomic>
#include <filesystem>

namespace crashloc::testing {

namespace fs = std::filesystem;

std::string MakeTempDir(const std::string& stem) {
  static std::atomic<int> counter{0};
  const fs::path dir = fs::temp_directory_path() /
                       ("crashloc-" + stem + "-" + std::to_string(::getpid()) +
                        "-" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string CopyToy() {
  const fs::path dir = fs::path(MakeTempDir("toy")) / "toy";
  fs::copy(fs::path(SourceDir()) / "toy", dir, fs::copy_options::recursive);
  fs::remove_all(dir / "out");
  return dir.string();
}

std::string SourceDir() { return CRASHLOC_SOURCE_DIR; }

std::string TestData(const std::string& relative) {
  return (fs::path(CRASHLOC_TEST_DATA) / relative).string();
}

std::string CliPath() { return CRASHLOC_CLI_PATH; }

}  // namespace crashloc::testing
