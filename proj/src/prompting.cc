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

#include "crashloc/prompting.h"

#include <regex>
#include <set>

#include "crashloc/error.h"

namespace crashloc {

namespace {

// True when one path is a suffix of the other at a component boundary, so
// `/build/src/a.c` matches `src/a.c`.
bool SameFile(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty() || !a.ends_with(b)) return false;
  return a.size() == b.size() || a[a.size() - b.size() - 1] == '/';
}

}  // namespace

ProjectMeta MetaFor(const std::string& name, Language language) {
  ProjectMeta meta;
  meta.name = name;
  meta.language_short = language == Language::kC ? "C" : "C++";
  meta.language_label = meta.language_short + " programming language";
  return meta;
}

FinetuneExample MakeFinetuneExample(const Sample& sample) {
  if (sample.trace.empty()) {
    throw Error(ErrorCode::kParseError, "sample " + sample.id + " has no trace");
  }
  if (sample.trace.find(kEndOfText) != std::string::npos) {
    throw Error(ErrorCode::kParseError,
                "trace of sample " + sample.id + " contains the end marker");
  }
  return {sample.trace, TargetString(sample) + std::string(kEndOfText)};
}

Json FinetuneToJson(const FinetuneExample& e) {
  return {{"prompt", e.prompt}, {"completion", e.completion}};
}

std::string FinetuneText(const FinetuneExample& e) {
  return e.prompt + "\n" + e.completion;
}

const std::string& DefaultZeroShotTemplate() {
  static const std::string kTemplate =
      "ROLE: You are a software engineering assistant who can analyze stack "
      "traces from a crash and assist a {LANGUAGE_SHORT} developer in "
      "localizing the fault to a method in the stack trace.\n"
      "TASK: Given a stack trace, identify the function name that most likely "
      "caused the crash. The faulty method is not necessarily closer to the "
      "last frame in the stack trace.\n"
      "INPUT: Preprocessed stack traces that resulted from a crash in the "
      "{DESCRIPTION} {PROJECT}, which has been written in {LANGUAGE}.\n"
      "\n"
      "[CRASH STACK]:\n"
      "{STACK}\n"
      "OUTPUT: Strictly provide only the function name without any additional "
      "information in the format:\n"
      "<function_name>\n";
  return kTemplate;
}

std::string RenderTemplate(std::string_view tmpl, const ProjectMeta& meta,
                           std::string_view stack) {
  const std::pair<std::string_view, std::string_view> kSlots[] = {
      {"{PROJECT}", meta.name},
      {"{LANGUAGE}", meta.language_label},
      {"{LANGUAGE_SHORT}", meta.language_short},
      {"{DESCRIPTION}", meta.description},
      {"{STACK}", stack},
  };
  // Single pass, so placeholder-like text inside the stack stays literal.
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    bool replaced = false;
    if (tmpl[i] == '{') {
      for (const auto& [slot, value] : kSlots) {
        if (tmpl.substr(i, slot.size()) == slot) {
          out += value;
          i += slot.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out += tmpl[i++];
  }
  return out;
}

std::string ZeroShotPrompt(const Sample& sample, const ProjectMeta& meta,
                           std::string_view tmpl) {
  return RenderTemplate(tmpl, meta, sample.trace);
}

std::string AugmentWithFunctions(std::string_view prompt,
                                 const std::vector<FunctionSource>& sources) {
  if (sources.empty()) return std::string(prompt);
  std::string block = "[FUNCTION DEFINITIONS]:\n";
  for (const auto& [name, text] : sources) {
    block += text;
    if (text.empty() || text.back() != '\n') block += '\n';
  }
  std::size_t at = std::string_view::npos;
  if (prompt.rfind("OUTPUT:", 0) == 0) {
    at = 0;
  } else if (std::size_t pos = prompt.rfind("\nOUTPUT:");
             pos != std::string_view::npos) {
    at = pos + 1;
  }
  std::string out;
  if (at == std::string_view::npos) {
    out = std::string(prompt);
    if (!out.empty() && out.back() != '\n') out += '\n';
    return out + block;
  }
  out = std::string(prompt.substr(0, at));
  out += block;
  out += prompt.substr(at);
  return out;
}

std::string AugmentWithinBudget(std::string_view prompt,
                                std::vector<FunctionSource> sources,
                                std::size_t token_budget,
                                const TokenCounter& counter) {
  std::string out = AugmentWithFunctions(prompt, sources);
  while (!sources.empty() && counter.Count(out) > token_budget) {
    sources.pop_back();
    out = AugmentWithFunctions(prompt, sources);
  }
  return out;
}

std::vector<FunctionSource> CollectFunctionSources(
    std::string_view rendered_trace, const std::vector<SourceFile>& files,
    const std::string& exclude) {
  std::optional<std::regex> exclude_re;
  if (!exclude.empty()) exclude_re.emplace(exclude);
  std::vector<FunctionSource> out;
  std::set<std::string> seen;
  for (const Frame& frame : RenderedFrames(rendered_trace)) {
    if (!seen.insert(frame.function).second) continue;
    if (exclude_re && std::regex_search(frame.function, *exclude_re)) continue;
    for (const SourceFile& f : files) {
      if (frame.file && !SameFile(*frame.file, f.path)) continue;
      if (exclude_re && std::regex_search(f.path, *exclude_re)) continue;
      if (auto text = FunctionSourceText(f.index, f.text, frame.function)) {
        out.emplace_back(frame.function, *text);
        break;
      }
    }
  }
  return out;
}

}  // namespace crashloc
