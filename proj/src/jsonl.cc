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

#include "crashloc/jsonl.h"

#include <sstream>

#include "crashloc/error.h"
#include "crashloc/syntax.h"

namespace crashloc {

std::vector<Json> ParseJsonl(const std::string& text,
                             const std::string& source_name) {
  std::vector<Json> values;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      values.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kParseError, source_name + ":" +
                                              std::to_string(number) + ": " +
                                              e.what());
    }
  }
  return values;
}

std::vector<Json> ReadJsonl(const std::string& path) {
  return ParseJsonl(ReadFileBytes(path), path);
}

std::string ToJsonl(const std::vector<Json>& values) {
  std::string out;
  for (const Json& v : values) {
    out += v.dump();
    out += '\n';
  }
  return out;
}

void WriteJsonl(const std::string& path, const std::vector<Json>& values) {
  WriteFileBytes(path, ToJsonl(values));
}

std::string RequireString(const Json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::kParseError,
                std::string("missing string field '") + field + "'");
  }
  return it->get<std::string>();
}

std::size_t RequireSize(const Json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_number_unsigned()) {
    throw Error(ErrorCode::kParseError,
                std::string("missing non-negative integer field '") + field +
                    "'");
  }
  return it->get<std::size_t>();
}

}  // namespace crashloc
