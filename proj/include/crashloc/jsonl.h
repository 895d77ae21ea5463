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

#ifndef CRASHLOC_JSONL_H_
#define CRASHLOC_JSONL_H_

#include <string>
#include <vector>

#include "json.hpp"

namespace crashloc {

using Json = nlohmann::json;

// One JSON value per non-blank line. Throws kParseError naming the line.
std::vector<Json> ParseJsonl(const std::string& text,
                             const std::string& source_name);
std::vector<Json> ReadJsonl(const std::string& path);

std::string ToJsonl(const std::vector<Json>& values);
void WriteJsonl(const std::string& path, const std::vector<Json>& values);

// Field access with a kParseError naming the field on absence or type clash.
std::string RequireString(const Json& j, const char* field);
std::size_t RequireSize(const Json& j, const char* field);

}  // namespace crashloc

#endif  // CRASHLOC_JSONL_H_
