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

#include "crashloc/campaign.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <regex>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <variant>

#include "crashloc/error.h"
#include "crashloc/process.h"

namespace crashloc {

namespace fs = std::filesystem;

namespace {

std::string Trim(std::string_view s) {
  const std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config values.

using ConfigValue = std::variant<std::string, double, bool,
                                 std::vector<std::string>>;

class ValueParser {
 public:
  ValueParser(std::string_view text, std::size_t line)
      : text_(text), line_(line) {}

  ConfigValue Parse() {
    SkipSpace();
    ConfigValue v = ParseOne(true);
    SkipSpace();
    if (pos_ != text_.size()) Fail("trailing characters");
    return v;
  }

 private:
  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorCode::kConfigError,
                "line " + std::to_string(line_) + ": " + what);
  }

  void SkipSpace() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  std::string ParseString() {
    const char quote = text_[pos_++];
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != quote) {
      char c = text_[pos_++];
      if (c == '\\' && quote == '"' && pos_ < text_.size()) {
        c = text_[pos_++];
        switch (c) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          default: break;
        }
      }
      out += c;
    }
    if (pos_ >= text_.size()) Fail("unterminated string");
    ++pos_;
    return out;
  }

  ConfigValue ParseOne(bool allow_array) {
    if (pos_ >= text_.size()) Fail("missing value");
    const char c = text_[pos_];
    if (c == '"' || c == '\'') return ParseString();
    if (c == '[') {
      if (!allow_array) Fail("nested arrays are not supported");
      ++pos_;
      std::vector<std::string> items;
      SkipSpace();
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        return items;
      }
      while (true) {
        SkipSpace();
        if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\'')) {
          Fail("arrays may only hold strings");
        }
        items.push_back(ParseString());
        SkipSpace();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
          SkipSpace();
          if (pos_ < text_.size() && text_[pos_] == ']') {
            ++pos_;
            return items;
          }
          continue;
        }
        if (pos_ < text_.size() && text_[pos_] == ']') {
          ++pos_;
          return items;
        }
        Fail("expected ',' or ']'");
      }
    }
    std::size_t end = pos_;
    while (end < text_.size() && text_[end] != ' ' && text_[end] != '\t' &&
           text_[end] != '\r' && text_[end] != '\n') {
      ++end;
    }
    const std::string word(text_.substr(pos_, end - pos_));
    pos_ = end;
    if (word == "true") return true;
    if (word == "false") return false;
    try {
      std::size_t used = 0;
      const double d = std::stod(word, &used);
      if (used != word.size()) Fail("bad number '" + word + "'");
      return d;
    } catch (const std::logic_error&) {
      Fail("bad value '" + word + "'");
    }
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

// Removes a `#` comment that is not inside a string.
std::string StripComment(const std::string& line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == '\\' && quote == '"') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

int BracketBalance(const std::string& s) {
  int depth = 0;
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == '\\' && quote == '"') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '[') {
      ++depth;
    } else if (c == ']') {
      --depth;
    }
  }
  return depth;
}

std::string ResolvePath(const std::string& base_dir, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

// ---------------------------------------------------------------------------

std::string NowUtc() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<std::string> DebuggerSignal(const std::string& output) {
  static const std::regex re(
      R"((?:Program|Thread \d+ .*) (?:received|terminated with) signal (SIG[A-Z0-9]+))");
  std::smatch m;
  if (std::regex_search(output, m, re)) return m[1].str();
  return std::nullopt;
}

bool IsCrash(const ProcessResult& r, const std::set<std::string>& signals,
             std::string* signal) {
  if (auto s = DebuggerSignal(r.output); s && signals.count(*s)) {
    *signal = *s;
    return true;
  }
  if (r.term_signal && signals.count(SignalName(*r.term_signal))) {
    *signal = SignalName(*r.term_signal);
    return true;
  }
  return false;
}

std::optional<OutcomeVariant> ParseOutcomeVariant(std::string_view name) {
  for (OutcomeVariant v :
       {OutcomeVariant::kBuildFailure, OutcomeVariant::kTestsPassed,
        OutcomeVariant::kTimeout, OutcomeVariant::kCrash}) {
    if (OutcomeVariantName(v) == name) return v;
  }
  return std::nullopt;
}

std::uint64_t Draw(std::mt19937_64& rng, std::uint64_t bound) {
  // Plain modulo keeps the sequence identical across standard libraries.
  return rng() % bound;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<TargetSpec> LoadCoverage(std::string_view tsv) {
  std::vector<TargetSpec> targets;
  std::istringstream in{std::string(tsv)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || line[0] == '#') continue;
    const std::vector<std::string> cols = SplitTabs(line);
    auto malformed = [&](const std::string& why) {
      return Error(ErrorCode::kMalformedRow,
                   "line " + std::to_string(number) + ": " + why);
    };
    if (cols.size() != 3) {
      throw malformed("expected 3 tab-separated columns, found " +
                      std::to_string(cols.size()));
    }
    const std::string hits_text = Trim(cols[2]);
    if (hits_text.empty() ||
        hits_text.find_first_not_of("0123456789") != std::string::npos) {
      throw malformed("hit count '" + cols[2] + "' is not a non-negative integer");
    }
    if (Trim(cols[0]).empty() || Trim(cols[1]).empty()) {
      throw malformed("empty file or function");
    }
    TargetSpec t{Trim(cols[0]), Trim(cols[1]), std::stoull(hits_text)};
    if (t.coverage_hits == 0) continue;
    targets.push_back(std::move(t));
  }
  return targets;
}

CampaignConfig ParseConfig(std::string_view text, const std::string& base_dir) {
  CampaignConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::size_t key_line = number;
    std::string content = StripComment(line);
    if (Trim(content).empty()) continue;
    // Arrays may span lines.
    while (BracketBalance(content) > 0 && std::getline(in, line)) {
      ++number;
      content += "\n" + StripComment(line);
    }
    const std::size_t eq = content.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfigError,
                  "line " + std::to_string(key_line) + ": expected key = value");
    }
    const std::string key = Trim(content.substr(0, eq));
    const ConfigValue value =
        ValueParser(Trim(content.substr(eq + 1)), key_line).Parse();
    auto fail = [&](const std::string& what) {
      return Error(ErrorCode::kConfigError, "line " + std::to_string(key_line) +
                                                ": " + key + ": " + what);
    };
    auto str = [&]() {
      if (auto* s = std::get_if<std::string>(&value)) return *s;
      throw fail("expected a string");
    };
    auto num = [&]() {
      if (auto* d = std::get_if<double>(&value)) return *d;
      throw fail("expected a number");
    };
    auto count = [&]() {
      const double d = num();
      if (d < 0 || d != static_cast<double>(static_cast<std::uint64_t>(d))) {
        throw fail("expected a non-negative integer");
      }
      return static_cast<std::uint64_t>(d);
    };
    auto list = [&]() {
      if (auto* v = std::get_if<std::vector<std::string>>(&value)) return *v;
      throw fail("expected an array of strings");
    };

    if (key == "workspace") {
      config.workspace = ResolvePath(base_dir, str());
    } else if (key == "project") {
      config.project = str();
    } else if (key == "sources") {
      config.sources = list();
    } else if (key == "coverage") {
      config.coverage = ResolvePath(base_dir, str());
    } else if (key == "build_command") {
      config.build_command = list();
    } else if (key == "test_command") {
      config.test_command = list();
    } else if (key == "debugger_command") {
      config.debugger_command = list();
    } else if (key == "build_threshold_secs") {
      config.build_threshold_secs = num();
    } else if (key == "test_threshold_secs") {
      config.test_threshold_secs = num();
    } else if (key == "threshold_multiplier") {
      config.threshold_multiplier = num();
    } else if (key == "threshold_floor_secs") {
      config.threshold_floor_secs = num();
    } else if (key == "max_mutations") {
      config.max_mutations = count();
    } else if (key == "seed") {
      config.seed = count();
    } else if (key == "jobs") {
      config.jobs = count();
    } else if (key == "mutator_kinds") {
      config.mutator_kinds.clear();
      for (const std::string& name : list()) {
        if (name == "all") {
          config.mutator_kinds = AllMutators();
          continue;
        }
        auto kind = ParseMutatorKind(name);
        if (!kind) throw fail("unknown mutator '" + name + "'");
        config.mutator_kinds.insert(*kind);
      }
    } else if (key == "crash_signals") {
      const auto names = list();
      config.crash_signals = {names.begin(), names.end()};
    } else if (key == "trace_format") {
      auto f = ParseTraceFormat(str());
      if (!f) throw fail("unknown trace format");
      config.trace_format = *f;
    } else {
      throw fail("unknown key");
    }
  }
  return config;
}

CampaignConfig LoadConfig(const std::string& path) {
  const std::string text = ReadFileBytes(path);
  std::string base = fs::path(path).parent_path().string();
  if (base.empty()) base = ".";
  return ParseConfig(text, base);
}

void ValidateConfig(const CampaignConfig& config) {
  auto fail = [](const std::string& what) {
    return Error(ErrorCode::kConfigError, what);
  };
  if (config.workspace.empty()) throw fail("workspace is not set");
  if (!fs::is_directory(config.workspace)) {
    throw fail("workspace " + config.workspace + " is not a directory");
  }
  if (config.build_command.empty()) throw fail("build_command is empty");
  if (config.test_command.empty()) throw fail("test_command is empty");
  if (config.build_threshold_secs < 0 || config.test_threshold_secs < 0) {
    throw fail("thresholds must be positive");
  }
  if (config.threshold_multiplier <= 0) {
    throw fail("threshold_multiplier must be positive");
  }
  if (config.max_mutations < 1) throw fail("max_mutations must be at least 1");
  if (config.jobs < 1) throw fail("jobs must be at least 1");
  if (config.mutator_kinds.empty()) throw fail("mutator_kinds is empty");
  if (!config.debugger_command.empty() &&
      std::find(config.debugger_command.begin(), config.debugger_command.end(),
                "{TEST}") == config.debugger_command.end()) {
    throw fail("debugger_command lacks a {TEST} placeholder");
  }
}

std::vector<std::string> DebuggerArgv(const CampaignConfig& config) {
  if (config.debugger_command.empty()) return config.test_command;
  std::vector<std::string> argv;
  for (const std::string& a : config.debugger_command) {
    if (a == "{TEST}") {
      argv.insert(argv.end(), config.test_command.begin(),
                  config.test_command.end());
    } else {
      argv.push_back(a);
    }
  }
  return argv;
}

Thresholds CalibrateThresholds(const CampaignConfig& config) {
  // Generous bound so a hung baseline still terminates.
  constexpr double kBaselineLimitSecs = 6 * 3600;
  const ProcessResult build =
      RunProcess(config.build_command, config.workspace, kBaselineLimitSecs);
  if (build.timed_out || build.exit_code != 0) {
    throw Error(ErrorCode::kBaselineFailed,
                "pristine build failed:\n" + build.output);
  }
  const ProcessResult test =
      RunProcess(DebuggerArgv(config), config.workspace, kBaselineLimitSecs);
  std::string signal;
  if (test.timed_out || IsCrash(test, config.crash_signals, &signal) ||
      test.exit_code != 0) {
    throw Error(ErrorCode::kBaselineFailed,
                "pristine tests failed" +
                    (signal.empty() ? std::string() : " with " + signal) +
                    ":\n" + test.output);
  }
  auto scale = [&](double measured) {
    return std::max(measured * config.threshold_multiplier,
                    config.threshold_floor_secs);
  };
  Thresholds t;
  t.build_secs = config.build_threshold_secs > 0 ? config.build_threshold_secs
                                                 : scale(build.elapsed_secs);
  t.test_secs = config.test_threshold_secs > 0 ? config.test_threshold_secs
                                               : scale(test.elapsed_secs);
  return t;
}

std::vector<MutationSite> EnumerateFiles(const std::string& workspace,
                                         const std::vector<std::string>& files,
                                         const MutatorSet& kinds) {
  std::vector<MutationSite> sites;
  for (const std::string& file : files) {
    const std::string full = (fs::path(workspace) / file).string();
    const std::string text = ReadFileBytes(full);
    const SyntaxIndex index = ParseSource(text, LanguageForPath(file), file);
    std::vector<MutationSite> found = EnumerateSites(index, text, kinds);
    sites.insert(sites.end(), std::make_move_iterator(found.begin()),
                 std::make_move_iterator(found.end()));
  }
  std::stable_sort(sites.begin(), sites.end(),
                   [](const MutationSite& a, const MutationSite& b) {
                     if (a.file != b.file) return a.file < b.file;
                     if (a.span.offset != b.span.offset) {
                       return a.span.offset < b.span.offset;
                     }
                     return a.kind < b.kind;
                   });
  return sites;
}

std::vector<std::string> SourceFiles(const CampaignConfig& config,
                                     const std::vector<TargetSpec>& targets) {
  if (!config.sources.empty()) return config.sources;
  std::vector<std::string> files;
  for (const TargetSpec& t : targets) {
    if (std::find(files.begin(), files.end(), t.file) == files.end()) {
      files.push_back(t.file);
    }
  }
  return files;
}

std::vector<Mutation> Plan(const std::vector<MutationSite>& sites,
                           const std::vector<TargetSpec>& targets,
                           const CampaignConfig& config) {
  std::set<std::pair<std::string, std::string>> covered;
  for (const TargetSpec& t : targets) {
    if (t.coverage_hits > 0) {
      covered.emplace(fs::path(t.file).lexically_normal().string(), t.function);
    }
  }
  std::mt19937_64 rng(config.seed);
  std::vector<Mutation> plan;
  for (const MutationSite& site : sites) {
    if (!config.mutator_kinds.count(site.kind)) continue;
    const std::string file =
        fs::path(site.enclosing_file).lexically_normal().string();
    if (!covered.count({file, site.enclosing_function})) continue;
    Mutation m;
    m.site = site;
    std::size_t choice = 0;
    if (site.kind == MutatorKind::kLineOrder) {
      if (site.swap_partners.empty()) continue;
      choice = Draw(rng, site.swap_partners.size());
      m.swap = site.swap_partners[choice];
      m.replacement = m.swap->partner_text;
    } else if (site.kind != MutatorKind::kDelete) {
      if (site.candidates.empty()) continue;
      choice = Draw(rng, site.candidates.size());
      m.replacement = site.candidates[choice];
    }
    m.id = std::string(MutatorName(site.kind)) + ":" + site.file + ":" +
           std::to_string(site.span.offset) + ":" + std::to_string(choice) +
           ":s" + std::to_string(config.seed);
    plan.push_back(std::move(m));
  }
  if (plan.empty()) {
    throw Error(ErrorCode::kEmptyPlan,
                "no mutation site lies in a covered function");
  }
  for (std::size_t i = plan.size() - 1; i > 0; --i) {
    std::swap(plan[i], plan[Draw(rng, i + 1)]);
  }
  if (plan.size() > config.max_mutations) plan.resize(config.max_mutations);
  return plan;
}

Json MutationToJson(const Mutation& m) {
  Json j = {
      {"id", m.id},
      {"file", m.site.file},
      {"offset", m.site.span.offset},
      {"length", m.site.span.length},
      {"original", m.site.original},
      {"kind", std::string(MutatorName(m.site.kind))},
      {"replacement", m.replacement},
      {"enclosing_function", m.site.enclosing_function},
      {"enclosing_file", m.site.enclosing_file},
  };
  if (m.swap) {
    j["swap"] = {{"offset", m.swap->partner.offset},
                 {"length", m.swap->partner.length},
                 {"text", m.swap->partner_text}};
  }
  return j;
}

Mutation MutationFromJson(const Json& j) {
  Mutation m;
  m.id = RequireString(j, "id");
  m.site.file = RequireString(j, "file");
  m.site.span = {RequireSize(j, "offset"), RequireSize(j, "length")};
  m.site.original = RequireString(j, "original");
  const std::string kind = RequireString(j, "kind");
  auto parsed = ParseMutatorKind(kind);
  if (!parsed) throw Error(ErrorCode::kParseError, "unknown mutator " + kind);
  m.site.kind = *parsed;
  m.replacement = RequireString(j, "replacement");
  m.site.enclosing_function = RequireString(j, "enclosing_function");
  m.site.enclosing_file = RequireString(j, "enclosing_file");
  if (auto it = j.find("swap"); it != j.end()) {
    LineSwap swap{{RequireSize(*it, "offset"), RequireSize(*it, "length")},
                  RequireString(*it, "text")};
    m.site.swap_partners = {swap};
    m.swap = swap;
  } else if (m.site.kind == MutatorKind::kLineOrder) {
    throw Error(ErrorCode::kParseError, "LineOrder mutation without swap");
  }
  if (m.site.kind != MutatorKind::kDelete &&
      m.site.kind != MutatorKind::kLineOrder) {
    m.site.candidates = {m.replacement};
  }
  return m;
}

std::string_view OutcomeVariantName(OutcomeVariant v) {
  switch (v) {
    case OutcomeVariant::kBuildFailure: return "BuildFailure";
    case OutcomeVariant::kTestsPassed: return "TestsPassed";
    case OutcomeVariant::kTimeout: return "Timeout";
    case OutcomeVariant::kCrash: return "Crash";
  }
  return "TestsPassed";
}

std::string_view PhaseName(Phase p) {
  return p == Phase::kBuild ? "build" : "test";
}

ExecutionOutcome ExecuteStep(const std::string& workspace, const Mutation& m,
                             const std::string& pristine,
                             const CampaignConfig& config,
                             const Thresholds& thresholds) {
  const std::string path = (fs::path(workspace) / m.site.file).string();
  if (ReadFileBytes(path) != pristine) {
    throw Error(ErrorCode::kWorkspaceDirty,
                path + " differs from its pristine contents");
  }
  WriteFileBytes(path, ApplyMutation(pristine, m));

  auto restore = [&]() {
    std::string restored;
    try {
      restored = RevertMutation(ReadFileBytes(path), m);
    } catch (const Error& e) {
      throw Error(ErrorCode::kRevertFailed, m.id + ": " + e.what());
    }
    if (restored != pristine) {
      throw Error(ErrorCode::kRevertFailed,
                  m.id + ": reverted bytes differ from pristine");
    }
    WriteFileBytes(path, restored);
    if (ReadFileBytes(path) != pristine) {
      throw Error(ErrorCode::kRevertFailed,
                  m.id + ": " + path + " does not read back as pristine");
    }
  };

  ExecutionOutcome outcome;
  try {
    const ProcessResult build =
        RunProcess(config.build_command, workspace, thresholds.build_secs);
    outcome.build_secs = build.elapsed_secs;
    if (build.timed_out) {
      outcome.variant = OutcomeVariant::kTimeout;
      outcome.timed_out_phase = Phase::kBuild;
    } else if (build.exit_code != 0) {
      outcome.variant = OutcomeVariant::kBuildFailure;
    } else {
      const ProcessResult test =
          RunProcess(DebuggerArgv(config), workspace, thresholds.test_secs);
      outcome.test_secs = test.elapsed_secs;
      std::string signal;
      if (test.timed_out) {
        outcome.variant = OutcomeVariant::kTimeout;
        outcome.timed_out_phase = Phase::kTest;
      } else if (IsCrash(test, config.crash_signals, &signal)) {
        outcome.variant = OutcomeVariant::kCrash;
        outcome.signal = signal;
        outcome.raw_trace = test.output.empty()
                                ? "Program terminated with signal " + signal + "."
                                : test.output;
      } else {
        outcome.variant = OutcomeVariant::kTestsPassed;
        outcome.test_exit_code = test.exit_code;
      }
    }
  } catch (...) {
    restore();
    throw;
  }
  restore();
  return outcome;
}

Json CrashRecordToJson(const CrashRecord& r) {
  return {
      {"id", r.mutation.id},
      {"project", r.project},
      {"mutator", std::string(MutatorName(r.mutation.site.kind))},
      {"target_file", r.mutation.site.enclosing_file},
      {"target_function", r.mutation.site.enclosing_function},
      {"signal", r.outcome.signal},
      {"raw_trace", r.outcome.raw_trace},
      {"build_secs", r.outcome.build_secs},
      {"test_secs", r.outcome.test_secs},
      {"captured_at", r.captured_at},
      {"mutation", MutationToJson(r.mutation)},
  };
}

CrashRecord CrashRecordFromJson(const Json& j) {
  CrashRecord r;
  if (auto it = j.find("mutation"); it != j.end() && it->is_object()) {
    r.mutation = MutationFromJson(*it);
  } else {
    r.mutation.id = RequireString(j, "id");
    auto kind = ParseMutatorKind(RequireString(j, "mutator"));
    if (!kind) throw Error(ErrorCode::kParseError, "unknown mutator");
    r.mutation.site.kind = *kind;
    r.mutation.site.enclosing_file = RequireString(j, "target_file");
    r.mutation.site.file = r.mutation.site.enclosing_file;
    r.mutation.site.enclosing_function = RequireString(j, "target_function");
  }
  r.mutation.id = RequireString(j, "id");
  r.project = RequireString(j, "project");
  r.outcome.variant = OutcomeVariant::kCrash;
  r.outcome.signal = RequireString(j, "signal");
  r.outcome.raw_trace = RequireString(j, "raw_trace");
  r.outcome.build_secs = j.value("build_secs", 0.0);
  r.outcome.test_secs = j.value("test_secs", 0.0);
  r.captured_at = j.value("captured_at", std::string());
  return r;
}

Json SummaryToJson(const CampaignSummary& s) {
  Json outcomes = Json::object();
  for (OutcomeVariant v :
       {OutcomeVariant::kBuildFailure, OutcomeVariant::kTestsPassed,
        OutcomeVariant::kTimeout, OutcomeVariant::kCrash}) {
    auto it = s.by_variant.find(v);
    outcomes[std::string(OutcomeVariantName(v))] =
        it == s.by_variant.end() ? 0 : it->second;
  }
  Json by_kind = Json::object();
  for (const auto& [kind, counts] : s.by_kind) {
    Json row = Json::object();
    for (const auto& [v, n] : counts) row[std::string(OutcomeVariantName(v))] = n;
    by_kind[std::string(MutatorName(kind))] = row;
  }
  return {{"planned", s.planned},
          {"executed", s.executed},
          {"resumed", s.resumed},
          {"outcomes", outcomes},
          {"by_mutator", by_kind}};
}

std::vector<JournalEntry> ReadJournal(const std::string& path) {
  std::vector<JournalEntry> entries;
  if (!fs::exists(path)) return entries;
  std::istringstream in(ReadFileBytes(path));
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const std::size_t tab = line.rfind('\t');
    std::optional<OutcomeVariant> v;
    if (tab != std::string::npos && tab > 0) {
      v = ParseOutcomeVariant(line.substr(tab + 1));
    }
    if (!v) {
      throw Error(ErrorCode::kJournalCorrupt,
                  path + ":" + std::to_string(number) + ": unreadable entry");
    }
    entries.push_back({line.substr(0, tab), *v});
  }
  return entries;
}

CampaignSummary RunCampaign(const CampaignConfig& config,
                            const Thresholds& thresholds,
                            const std::vector<Mutation>& plan,
                            const CampaignPaths& paths,
                            std::vector<CrashRecord>* records,
                            const RunOptions& options) {
  CampaignSummary summary;
  summary.planned = plan.size();

  std::unordered_map<std::string, OutcomeVariant> done;
  for (const JournalEntry& e : ReadJournal(paths.journal)) done[e.id] = e.variant;

  std::unordered_set<std::string> recorded;
  if (fs::exists(paths.records)) {
    for (const Json& j : ReadJsonl(paths.records)) {
      CrashRecord r = CrashRecordFromJson(j);
      recorded.insert(r.mutation.id);
      if (records) records->push_back(std::move(r));
    }
  }

  std::vector<const Mutation*> pending;
  for (const Mutation& m : plan) {
    if (auto it = done.find(m.id); it != done.end()) {
      ++summary.resumed;
      ++summary.by_variant[it->second];
      ++summary.by_kind[m.site.kind][it->second];
    } else {
      pending.push_back(&m);
    }
  }
  if (options.step_limit > 0 && pending.size() > options.step_limit) {
    pending.resize(options.step_limit);
  }
  if (pending.empty()) return summary;

  std::unordered_map<std::string, std::string> pristine;
  for (const Mutation* m : pending) {
    if (!pristine.count(m->site.file)) {
      pristine[m->site.file] =
          ReadFileBytes((fs::path(config.workspace) / m->site.file).string());
    }
  }

  std::vector<std::string> workspaces;
  const std::size_t jobs = std::min(config.jobs, pending.size());
  if (jobs <= 1) {
    workspaces.push_back(config.workspace);
  } else {
    if (paths.clones_dir.empty()) {
      throw Error(ErrorCode::kConfigError, "jobs > 1 needs a clones directory");
    }
    for (std::size_t i = 0; i < jobs; ++i) {
      const fs::path clone =
          fs::path(paths.clones_dir) / ("clone-" + std::to_string(i));
      fs::remove_all(clone);
      fs::create_directories(clone.parent_path());
      fs::copy(config.workspace, clone, fs::copy_options::recursive);
      workspaces.push_back(clone.string());
    }
  }

  for (const std::string& p : {paths.records, paths.journal}) {
    const fs::path parent = fs::path(p).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
  }
  std::ofstream record_out(paths.records, std::ios::app | std::ios::binary);
  std::ofstream journal_out(paths.journal, std::ios::app | std::ios::binary);
  if (!record_out || !journal_out) {
    throw Error(ErrorCode::kIoError, "cannot open campaign output files");
  }

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> halt{false};
  std::exception_ptr failure;

  auto worker = [&](const std::string& workspace) {
    while (!halt) {
      const std::size_t i = next++;
      if (i >= pending.size()) return;
      const Mutation& m = *pending[i];
      ExecutionOutcome outcome;
      try {
        outcome =
            ExecuteStep(workspace, m, pristine.at(m.site.file), config, thresholds);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        halt = true;
        return;
      }
      std::lock_guard<std::mutex> lock(mu);
      if (outcome.variant == OutcomeVariant::kCrash &&
          !recorded.count(m.id)) {
        CrashRecord r{m, outcome, config.project, NowUtc()};
        record_out << CrashRecordToJson(r).dump() << '\n';
        record_out.flush();
        recorded.insert(m.id);
        if (records) records->push_back(std::move(r));
      }
      journal_out << m.id << '\t' << OutcomeVariantName(outcome.variant)
                  << '\n';
      journal_out.flush();
      ++summary.executed;
      ++summary.by_variant[outcome.variant];
      ++summary.by_kind[m.site.kind][outcome.variant];
      if (options.verbose) {
        std::cerr << "[" << summary.executed << "/" << pending.size() << "] "
                  << m.id << " -> " << OutcomeVariantName(outcome.variant)
                  << (outcome.signal.empty() ? "" : " " + outcome.signal)
                  << '\n';
      }
    }
  };

  if (workspaces.size() == 1) {
    worker(workspaces[0]);
  } else {
    std::vector<std::thread> threads;
    for (const std::string& ws : workspaces) threads.emplace_back(worker, ws);
    for (std::thread& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return summary;
}

}  // namespace crashloc
