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

#ifndef CRASHLOC_STACKTRACE_H_
#define CRASHLOC_STACKTRACE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crashloc {

enum class TraceFormat {
  // GNU debugger `bt` output: `#N  [0xADDR in] func (args) at file:line`,
  // innermost frame first.
  kGdbTopFirst,
  // A crash dump in which the stack is one section among many, introduced by
  // a marker line and listed outermost call first.
  kHanaDump,
  // Loose `func at file:line` lines, innermost first.
  kGeneric,
};

std::string_view TraceFormatName(TraceFormat format);
std::optional<TraceFormat> ParseTraceFormat(std::string_view name);

enum class FrameOrder { kMostRecentFirst, kOutermostFirst };

struct Frame {
  // 0 is the most recent call once the trace is normalized.
  std::size_t index = 0;
  std::string function;
  std::optional<std::string> file;
  std::optional<std::size_t> line;
  std::string raw;
};

struct PreprocessedTrace {
  std::vector<Frame> frames;
  std::optional<std::string> signal_line;
  TraceFormat source_format = TraceFormat::kGdbTopFirst;
  FrameOrder order = FrameOrder::kMostRecentFirst;
};

struct TraceParseOptions {
  // Line that opens the stack section of a dump (kHanaDump only).
  std::string section_marker = "[CRASH_STACK]";
};

// Throws kNoFramesFound when no frame line is recognized.
PreprocessedTrace ParseTrace(std::string_view raw, TraceFormat format,
                             const TraceParseOptions& options = {});

// Puts the most recent call first and renumbers frames. Idempotent.
PreprocessedTrace NormalizeOrder(PreprocessedTrace trace);

// Version of the dynamic-token rule list applied by StripDynamic.
inline constexpr int kDynamicRulesVersion = 1;

// Removes run-specific content (addresses, thread and process ids, register
// values, timestamps, argument values) from frame text. Returns nullopt when
// the whole line is dynamic, e.g. a thread banner.
std::optional<std::string> StripDynamicText(std::string_view line);

PreprocessedTrace StripDynamic(PreprocessedTrace trace);

// Approximate model token count: each run of identifier characters is one
// unit and every other non-space character is one unit. With a positive
// `chars_per_token` the count is instead ceil(length / chars_per_token).
struct TokenCounter {
  double chars_per_token = 0.0;
  std::size_t Count(std::string_view text) const;
};

inline constexpr std::size_t kMinTokenBudget = 32;
inline constexpr std::size_t kDefaultTokenBudget = 1024;

std::string RenderFrame(const Frame& frame);

// One line per frame, most recent first, then the signal line. Outermost
// frames are dropped until the text fits `token_budget`; the innermost frame
// is always kept. Throws kBudgetTooSmall below kMinTokenBudget.
std::string Render(const PreprocessedTrace& trace, std::size_t token_budget,
                   const TokenCounter& counter = {});

// parse -> normalize -> strip -> render.
std::string Preprocess(std::string_view raw, TraceFormat format,
                       std::size_t token_budget = kDefaultTokenBudget,
                       const TraceParseOptions& options = {});

enum class ObfuscationMode { kPerLine, kPerTerm };

std::optional<ObfuscationMode> ParseObfuscationMode(std::string_view name);

// Replaces each line (kPerLine) or each whitespace separated term (kPerTerm)
// with its lowercase hex SHA-256 digest. Whitespace layout is preserved.
std::string Obfuscate(std::string_view rendered, ObfuscationMode mode);

std::string Sha256Hex(std::string_view data);

// Frames of an already rendered trace; empty when none are recognized.
std::vector<Frame> RenderedFrames(std::string_view rendered);

// `A::B::run(int)` -> `run`. Template arguments are not split.
std::string UnqualifiedName(std::string_view function);

}  // namespace crashloc

#endif  // CRASHLOC_STACKTRACE_H_
