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

#include "crashloc/stacktrace.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <regex>

#include "crashloc/error.h"

namespace crashloc {

namespace {

std::vector<std::string> SplitLines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

std::string Trim(std::string_view s) {
  const std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

const std::regex& SignalRe() {
  static const std::regex re(
      R"(^\s*(Program received signal|Program terminated with signal|Thread \d+ .*received signal)\s+SIG[A-Z0-9]+)");
  return re;
}

const std::regex& OrdinalRe() {
  static const std::regex re(R"(^\s*(?:#(\d+)|(\d+):|\[(\d+)\])\s*(.*)$)");
  return re;
}

const std::regex& LocationRe() {
  static const std::regex re(R"(^(.*?)\s*\bat\s+(\S+):(\d+)\s*$)");
  return re;
}

// Location followed by trailing debugger noise (registers, timestamps). The
// last ` at file:line` wins.
const std::regex& LocationTrailingRe() {
  static const std::regex re(R"(^(.*)\s+at\s+(\S+?):(\d+)\s+\S.*$)");
  return re;
}

// Finds the `(` matching the `)` at `close`, or npos.
std::size_t OpenParenFor(std::string_view s, std::size_t close) {
  int depth = 0;
  for (std::size_t i = close + 1; i-- > 0;) {
    if (s[i] == ')') ++depth;
    if (s[i] == '(') {
      if (--depth == 0) return i;
    }
  }
  return std::string_view::npos;
}

// Parses the part of a frame line after its ordinal.
std::optional<Frame> ParseFrameBody(const std::string& body_in,
                                    const std::string& raw) {
  static const std::regex address_in(R"(^0x[0-9a-fA-F]+\s+in\s+)");
  static const std::regex from_lib(R"(^(.*?)\s+from\s+\S+\s*$)");
  static const std::regex elided(R"(\s+\.\.+$)");
  static const std::regex offset_suffix(R"(\+0x[0-9a-fA-F]+$)");
  static const std::regex paren_location(R"(^(.*?)\s*\(([^()\s]+):(\d+)\)\s*$)");

  std::string body = Trim(body_in);
  body = std::regex_replace(body, address_in, "");
  if (body.rfind("in ", 0) == 0) body = body.substr(3);

  Frame frame;
  frame.raw = raw;
  std::smatch m;
  if (std::regex_match(body, m, LocationRe()) ||
      std::regex_match(body, m, LocationTrailingRe())) {
    frame.file = m[2].str();
    frame.line = static_cast<std::size_t>(std::stoull(m[3].str()));
    body = m[1].str();
  } else if (std::regex_match(body, m, paren_location)) {
    frame.file = m[2].str();
    frame.line = static_cast<std::size_t>(std::stoull(m[3].str()));
    body = m[1].str();
  } else if (std::regex_match(body, m, from_lib)) {
    body = m[1].str();
  }
  body = std::regex_replace(Trim(body), elided, "");
  body = Trim(body);
  // Trailing argument list.
  if (!body.empty() && body.back() == ')') {
    const std::size_t open = OpenParenFor(body, body.size() - 1);
    if (open != std::string_view::npos && open > 0) {
      std::string head = Trim(body.substr(0, open));
      const bool is_operator_call =
          head.size() >= 8 && head.compare(head.size() - 8, 8, "operator") == 0;
      if (!head.empty() && !is_operator_call) body = head;
    }
  }
  body = std::regex_replace(body, offset_suffix, "");
  body = Trim(body);
  if (body.empty()) return std::nullopt;
  if (frame.line && *frame.line == 0) frame.line.reset();
  if (!frame.file) frame.line.reset();
  frame.function = body;
  return frame;
}

std::optional<std::string> FindSignalLine(const std::vector<std::string>& lines) {
  for (const std::string& line : lines) {
    if (std::regex_search(line, SignalRe())) return Trim(line);
  }
  return std::nullopt;
}

bool HasOpenParen(std::string_view s) {
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
  }
  return depth > 0;
}

// An indented line that carries on the previous frame: either its location
// or the rest of an argument list wrapped by the debugger.
bool IsContinuation(const std::string& line, const Frame& prev) {
  static const std::regex re(R"(^\s+(at|from)\s+\S+)");
  if (std::regex_search(line, re)) return true;
  return !line.empty() && (line[0] == ' ' || line[0] == '\t') &&
         HasOpenParen(prev.raw);
}

std::vector<Frame> ParseOrdinalFrames(const std::vector<std::string>& lines,
                                      bool allow_loose) {
  std::vector<Frame> frames;
  bool last_was_frame = false;
  for (const std::string& line : lines) {
    if (std::regex_search(line, SignalRe())) {
      last_was_frame = false;
      continue;
    }
    if (last_was_frame && !frames.back().file &&
        IsContinuation(line, frames.back())) {
      Frame& prev = frames.back();
      const std::string raw = prev.raw + " " + Trim(line);
      std::smatch m;
      std::regex_match(raw, m, OrdinalRe());
      if (auto reparsed = ParseFrameBody(m[4].str(), raw)) {
        reparsed->index = prev.index;
        prev = std::move(*reparsed);
      }
      continue;
    }
    std::smatch m;
    if (std::regex_match(line, m, OrdinalRe()) && m[1].matched) {
      if (m[1].str() == "0" && !frames.empty()) break;
      if (auto f = ParseFrameBody(m[4].str(), line)) {
        f->index = frames.size();
        frames.push_back(std::move(*f));
        last_was_frame = true;
        continue;
      }
    } else if (allow_loose && std::regex_match(line, LocationRe())) {
      if (auto f = ParseFrameBody(line, line)) {
        f->index = frames.size();
        frames.push_back(std::move(*f));
        last_was_frame = true;
        continue;
      }
    }
    last_was_frame = false;
  }
  return frames;
}

std::vector<Frame> ParseDumpSection(const std::vector<std::string>& lines,
                                    const std::string& marker) {
  std::vector<Frame> frames;
  std::size_t i = 0;
  while (i < lines.size() && lines[i].find(marker) == std::string::npos) ++i;
  if (i == lines.size()) return frames;
  for (++i; i < lines.size(); ++i) {
    const std::string trimmed = Trim(lines[i]);
    if (trimmed.empty()) {
      if (frames.empty()) continue;
      break;
    }
    if (trimmed.front() == '[') break;
    std::smatch m;
    std::string body = trimmed;
    if (std::regex_match(trimmed, m, OrdinalRe())) body = m[4].str();
    if (auto f = ParseFrameBody(body, trimmed)) {
      f->index = frames.size();
      frames.push_back(std::move(*f));
    }
  }
  return frames;
}

// Drops `=value` from every `name=value` item of parenthesized lists.
std::string StripArgumentValues(std::string_view s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '(') {
      out += s[i++];
      continue;
    }
    // Find the matching close, honoring quotes.
    int depth = 0;
    std::size_t j = i;
    char quote = 0;
    for (; j < s.size(); ++j) {
      const char c = s[j];
      if (quote) {
        if (c == '\\') {
          ++j;
        } else if (c == quote) {
          quote = 0;
        }
        continue;
      }
      if (c == '"' || c == '\'') quote = c;
      if (c == '(' || c == '{' || c == '[') ++depth;
      if (c == ')' || c == '}' || c == ']') {
        if (--depth == 0) break;
      }
    }
    if (j >= s.size()) {
      out += s.substr(i);
      break;
    }
    const std::string_view inner = s.substr(i + 1, j - i - 1);
    std::vector<std::string> items;
    std::size_t item_start = 0;
    int d = 0;
    quote = 0;
    for (std::size_t k = 0; k <= inner.size(); ++k) {
      const char c = k < inner.size() ? inner[k] : ',';
      if (quote) {
        if (c == '\\') {
          ++k;
        } else if (c == quote) {
          quote = 0;
        }
        continue;
      }
      if (c == '"' || c == '\'') quote = c;
      if (c == '(' || c == '{' || c == '[' || c == '<') ++d;
      if (c == ')' || c == '}' || c == ']' || c == '>') --d;
      if (c == ',' && d <= 0) {
        items.push_back(Trim(inner.substr(item_start, k - item_start)));
        item_start = k + 1;
      }
    }
    static const std::regex named(R"(^([A-Za-z_][A-Za-z0-9_]*)\s*=[^=].*$|^([A-Za-z_][A-Za-z0-9_]*)\s*=$)");
    out += '(';
    for (std::size_t k = 0; k < items.size(); ++k) {
      if (k) out += ", ";
      std::smatch m;
      if (std::regex_match(items[k], m, named)) {
        out += m[1].matched ? m[1].str() : m[2].str();
      } else {
        out += items[k];
      }
    }
    if (items.size() == 1 && items[0].empty()) out.pop_back(), out += '(';
    out += ')';
    i = j + 1;
  }
  return out;
}

}  // namespace

std::string_view TraceFormatName(TraceFormat format) {
  switch (format) {
    case TraceFormat::kGdbTopFirst: return "gdb";
    case TraceFormat::kHanaDump: return "dump";
    case TraceFormat::kGeneric: return "generic";
  }
  return "gdb";
}

std::optional<TraceFormat> ParseTraceFormat(std::string_view name) {
  if (name == "gdb") return TraceFormat::kGdbTopFirst;
  if (name == "dump" || name == "hana") return TraceFormat::kHanaDump;
  if (name == "generic") return TraceFormat::kGeneric;
  return std::nullopt;
}

PreprocessedTrace ParseTrace(std::string_view raw, TraceFormat format,
                             const TraceParseOptions& options) {
  const std::vector<std::string> lines = SplitLines(raw);
  PreprocessedTrace trace;
  trace.source_format = format;
  trace.signal_line = FindSignalLine(lines);
  switch (format) {
    case TraceFormat::kGdbTopFirst:
      trace.frames = ParseOrdinalFrames(lines, false);
      trace.order = FrameOrder::kMostRecentFirst;
      break;
    case TraceFormat::kGeneric:
      trace.frames = ParseOrdinalFrames(lines, true);
      trace.order = FrameOrder::kMostRecentFirst;
      break;
    case TraceFormat::kHanaDump:
      trace.frames = ParseDumpSection(lines, options.section_marker);
      trace.order = FrameOrder::kOutermostFirst;
      break;
  }
  if (trace.frames.empty()) {
    throw Error(ErrorCode::kNoFramesFound,
                "no stack frames recognized in " +
                    std::string(TraceFormatName(format)) + " input");
  }
  return trace;
}

PreprocessedTrace NormalizeOrder(PreprocessedTrace trace) {
  if (trace.order == FrameOrder::kOutermostFirst) {
    std::reverse(trace.frames.begin(), trace.frames.end());
    trace.order = FrameOrder::kMostRecentFirst;
  }
  for (std::size_t i = 0; i < trace.frames.size(); ++i) {
    trace.frames[i].index = i;
  }
  return trace;
}

std::optional<std::string> StripDynamicText(std::string_view line) {
  static const std::regex thread_banner(
      R"(^\s*\[?(Thread\s+(0x[0-9a-fA-F]+|\d+)\b.*|New Thread .*|Switching to Thread .*|Inferior \d+ .*)\]?:?\s*$)");
  static const std::regex registers(
      R"(\b(r[abcd]x|r[sd]i|r[bsi]p|e[abcd]x|e[sd]i|e[bsi]p|r(?:[89]|1[0-5])[dwb]?|eflags|[cdefgs]s|[fg]s_base|cpsr|pc|lr|sp|fp|[xw](?:[0-9]|[12][0-9]|30))\s*[=:]?\s+(0x[0-9a-fA-F]+|-?\d+)(\s+<[^>]*>)?(\s+\[[^\]]*\])?)");
  static const std::regex lwp(R"(\(?\bLWP\s+\d+\)?)");
  static const std::regex thread_id(R"(\bThread\s+(0x[0-9a-fA-F]+|\d+)(\s+"[^"]*")?)");
  static const std::regex process_id(R"(\b(process|pid|tid)[ =:]+\d+)");
  static const std::regex iso_time(
      R"(\b\d{4}-\d{2}-\d{2}[T ]\d{2}:\d{2}:\d{2}(\.\d+)?(Z|[+-]\d{2}:?\d{2})?)");
  static const std::regex clock_time(R"(\b\d{1,2}:\d{2}:\d{2}(\.\d+)?\b)");
  static const std::regex address_in(R"(\b0x[0-9a-fA-F]+\s+in\s+)");
  static const std::regex address(R"(\b0x[0-9a-fA-F]+)");
  static const std::regex spaces(R"(([^ ]) {2,}([^ ]))");

  if (std::regex_match(std::string(line), thread_banner)) return std::nullopt;
  const bool was_blank = Trim(line).empty();
  std::string s = StripArgumentValues(line);
  s = std::regex_replace(s, registers, "");
  s = std::regex_replace(s, iso_time, "");
  s = std::regex_replace(s, clock_time, "");
  s = std::regex_replace(s, lwp, "");
  s = std::regex_replace(s, thread_id, "Thread");
  s = std::regex_replace(s, process_id, "$1");
  s = std::regex_replace(s, address_in, "in ");
  s = std::regex_replace(s, address, "");
  // Collapse gaps left by removals, but keep the gdb `#N  ` column.
  s = std::regex_replace(s, spaces, "$1 $2");
  static const std::regex ordinal_gap(R"(^(\s*#\d+) )");
  s = std::regex_replace(s, ordinal_gap, "$1  ");
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  if (!was_blank && Trim(s).empty()) return std::nullopt;
  return s;
}

PreprocessedTrace StripDynamic(PreprocessedTrace trace) {
  static const std::regex address(R"(0x[0-9a-fA-F]+)");
  static const std::regex offset_suffix(R"(\+$)");
  for (Frame& f : trace.frames) {
    f.raw = StripDynamicText(f.raw).value_or("");
    std::string fn = std::regex_replace(f.function, address, "");
    fn = std::regex_replace(fn, offset_suffix, "");
    fn = Trim(fn);
    f.function = fn.empty() ? "??" : fn;
  }
  if (trace.signal_line) {
    static const std::regex thread_signal(
        R"(^\s*Thread\s+\d+(\s+"[^"]*")?(\s+\([^)]*\))?\s+received signal)");
    std::string s =
        std::regex_replace(*trace.signal_line, thread_signal,
                           "Program received signal");
    trace.signal_line = StripDynamicText(s).value_or("");
    if (trace.signal_line->empty()) trace.signal_line.reset();
  }
  return trace;
}

std::size_t TokenCounter::Count(std::string_view text) const {
  if (chars_per_token > 0.0) {
    return static_cast<std::size_t>(
        std::ceil(static_cast<double>(text.size()) / chars_per_token));
  }
  std::size_t count = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    const bool word = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '_' || c >= 0x80;
    if (word) {
      if (!in_word) ++count;
      in_word = true;
      continue;
    }
    in_word = false;
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') ++count;
  }
  return count;
}

std::string RenderFrame(const Frame& frame) {
  std::string out = "#" + std::to_string(frame.index) + "  in " + frame.function;
  if (frame.file) {
    out += " at " + *frame.file;
    if (frame.line) out += ":" + std::to_string(*frame.line);
  }
  return out;
}

std::string Render(const PreprocessedTrace& trace, std::size_t token_budget,
                   const TokenCounter& counter) {
  if (token_budget < kMinTokenBudget) {
    throw Error(ErrorCode::kBudgetTooSmall,
                "token budget " + std::to_string(token_budget) +
                    " is below the minimum of " +
                    std::to_string(kMinTokenBudget));
  }
  std::vector<std::string> lines;
  std::vector<std::size_t> costs;
  for (const Frame& f : trace.frames) {
    lines.push_back(RenderFrame(f));
    costs.push_back(counter.Count(lines.back()));
  }
  std::size_t total = trace.signal_line ? counter.Count(*trace.signal_line) : 0;
  for (std::size_t c : costs) total += c;
  std::size_t keep = lines.size();
  while (keep > 1 && total > token_budget) {
    --keep;
    total -= costs[keep];
  }
  std::string out;
  for (std::size_t i = 0; i < keep; ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  if (trace.signal_line) {
    if (!out.empty()) out += '\n';
    out += *trace.signal_line;
  }
  return out;
}

std::string Preprocess(std::string_view raw, TraceFormat format,
                       std::size_t token_budget,
                       const TraceParseOptions& options) {
  return Render(StripDynamic(NormalizeOrder(ParseTrace(raw, format, options))),
                token_budget);
}

std::optional<ObfuscationMode> ParseObfuscationMode(std::string_view name) {
  if (name == "per-line" || name == "line") return ObfuscationMode::kPerLine;
  if (name == "per-term" || name == "term") return ObfuscationMode::kPerTerm;
  return std::nullopt;
}

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorCode::kIoError, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string Obfuscate(std::string_view rendered, ObfuscationMode mode) {
  std::string out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = rendered.find('\n', start);
    const bool last = end == std::string_view::npos;
    if (last) end = rendered.size();
    const std::string_view line = rendered.substr(start, end - start);
    if (mode == ObfuscationMode::kPerLine) {
      out += Sha256Hex(line);
    } else {
      std::size_t i = 0;
      while (i < line.size()) {
        if (line[i] == ' ' || line[i] == '\t') {
          out += line[i++];
          continue;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        out += Sha256Hex(line.substr(i, j - i));
        i = j;
      }
    }
    if (last) break;
    out += '\n';
    start = end + 1;
  }
  return out;
}

std::vector<Frame> RenderedFrames(std::string_view rendered) {
  return ParseOrdinalFrames(SplitLines(rendered), false);
}

std::string UnqualifiedName(std::string_view function) {
  std::string_view s = function;
  // Drop a trailing argument list.
  if (!s.empty() && s.back() == ')') {
    const std::size_t open = OpenParenFor(s, s.size() - 1);
    if (open != std::string_view::npos && open > 0) {
      std::string_view head = s.substr(0, open);
      while (!head.empty() && head.back() == ' ') head.remove_suffix(1);
      if (!(head.size() >= 8 &&
            head.substr(head.size() - 8) == "operator")) {
        s = head;
      }
    }
  }
  int depth = 0;
  std::size_t cut = 0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const char c = s[i];
    if (c == '<' || c == '(') ++depth;
    if (c == '>' || c == ')') --depth;
    if (depth == 0 && c == ':' && s[i + 1] == ':') {
      cut = i + 2;
      ++i;
    }
  }
  return std::string(s.substr(cut));
}

}  // namespace crashloc
