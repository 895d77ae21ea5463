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

#ifndef CRASHLOC_PROMPTING_H_
#define CRASHLOC_PROMPTING_H_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crashloc/dataset.h"
#include "crashloc/jsonl.h"
#include "crashloc/stacktrace.h"
#include "crashloc/syntax.h"

namespace crashloc {

inline constexpr std::string_view kEndOfText = "<|endoftext|>";

struct ProjectMeta {
  std::string name;            // "SQLite"
  std::string language_short;  // "C"
  std::string language_label;  // "C programming language"
  std::string description = "open-source Database project";
};

// Metadata for a C or C++ project with the given display name.
ProjectMeta MetaFor(const std::string& name, Language language);

struct FinetuneExample {
  std::string prompt;
  std::string completion;
};

// Prompt is the rendered trace; completion is `<file> <function>` followed by
// the end marker. Throws kParseError for an empty trace or one that already
// holds the marker.
FinetuneExample MakeFinetuneExample(const Sample& sample);
Json FinetuneToJson(const FinetuneExample& e);
// prompt, newline, completion.
std::string FinetuneText(const FinetuneExample& e);

// The canonical zero-shot template. Placeholders: {PROJECT}, {LANGUAGE},
// {LANGUAGE_SHORT}, {DESCRIPTION}, {STACK}.
const std::string& DefaultZeroShotTemplate();

std::string RenderTemplate(std::string_view tmpl, const ProjectMeta& meta,
                           std::string_view stack);

std::string ZeroShotPrompt(const Sample& sample, const ProjectMeta& meta,
                           std::string_view tmpl = DefaultZeroShotTemplate());

using FunctionSource = std::pair<std::string, std::string>;

// Inserts a function definitions block before the OUTPUT section (or at the
// end when the prompt has none). An empty list leaves the prompt unchanged.
std::string AugmentWithFunctions(std::string_view prompt,
                                 const std::vector<FunctionSource>& sources);

// Like AugmentWithFunctions, dropping sources from the end of the list until
// the result fits `token_budget` tokens.
std::string AugmentWithinBudget(std::string_view prompt,
                                std::vector<FunctionSource> sources,
                                std::size_t token_budget,
                                const TokenCounter& counter = {});

struct SourceFile {
  std::string path;
  std::string text;
  SyntaxIndex index;
};

// Definitions of the trace's frame functions, in frame order, skipping
// duplicates, functions that cannot be found, and functions whose file or
// name matches `exclude` (an ECMAScript regex; empty excludes nothing).
std::vector<FunctionSource> CollectFunctionSources(
    std::string_view rendered_trace, const std::vector<SourceFile>& files,
    const std::string& exclude = {});

}  // namespace crashloc

#endif  // CRASHLOC_PROMPTING_H_
