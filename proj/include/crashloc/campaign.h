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

#ifndef CRASHLOC_CAMPAIGN_H_
#define CRASHLOC_CAMPAIGN_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "crashloc/jsonl.h"
#include "crashloc/mutation.h"
#include "crashloc/stacktrace.h"

namespace crashloc {

inline constexpr std::uint64_t kDefaultSeed = 20240917;

struct TargetSpec {
  std::string file;
  std::string function;
  std::uint64_t coverage_hits = 0;
};

// Parses `file<TAB>function<TAB>hits` rows, dropping rows with zero hits.
// Blank lines and lines starting with `#` are ignored. Throws kMalformedRow.
std::vector<TargetSpec> LoadCoverage(std::string_view tsv);

struct CampaignConfig {
  std::string workspace;
  std::string project = "project";
  // Source files to mutate, relative to the workspace.
  std::vector<std::string> sources;
  // Coverage TSV path; relative paths are against the config file.
  std::string coverage;
  std::vector<std::string> build_command;
  std::vector<std::string> test_command;
  // Runs the tests under a debugger. `{TEST}` expands to test_command.
  std::vector<std::string> debugger_command;
  // Zero means "calibrate from a pristine run".
  double build_threshold_secs = 0.0;
  double test_threshold_secs = 0.0;
  double threshold_multiplier = 1.0;
  // Lower bound for calibrated thresholds. Sub-second toy builds jitter by
  // more than their own duration.
  double threshold_floor_secs = 0.0;
  std::size_t max_mutations = 1000;
  std::uint64_t seed = kDefaultSeed;
  MutatorSet mutator_kinds = AllMutators();
  std::set<std::string> crash_signals = {"SIGSEGV", "SIGABRT", "SIGBUS",
                                         "SIGFPE", "SIGILL"};
  TraceFormat trace_format = TraceFormat::kGdbTopFirst;
  std::size_t jobs = 1;
};

// TOML-style `key = value` text: strings in double quotes, numbers, and
// arrays of strings. Throws kConfigError on unknown keys or bad values.
CampaignConfig ParseConfig(std::string_view text,
                           const std::string& base_dir = ".");
CampaignConfig LoadConfig(const std::string& path);
void ValidateConfig(const CampaignConfig& config);

// Expands `{TEST}` in the debugger template into the test argv.
std::vector<std::string> DebuggerArgv(const CampaignConfig& config);

struct Thresholds {
  double build_secs = 0.0;
  double test_secs = 0.0;
};

// Builds and tests the pristine workspace, returning measured durations
// times the multiplier (never below the floor). Throws kBaselineFailed.
Thresholds CalibrateThresholds(const CampaignConfig& config);

// Seeded choice of one candidate per covered site, shuffled and truncated to
// max_mutations. Throws kEmptyPlan when no site lies in a covered function.
std::vector<Mutation> Plan(const std::vector<MutationSite>& sites,
                           const std::vector<TargetSpec>& targets,
                           const CampaignConfig& config);

// Parses each of `files` (relative to `workspace`) and enumerates its sites.
std::vector<MutationSite> EnumerateFiles(const std::string& workspace,
                                         const std::vector<std::string>& files,
                                         const MutatorSet& kinds);

// config.sources, or the distinct files named by `targets` when empty.
std::vector<std::string> SourceFiles(const CampaignConfig& config,
                                     const std::vector<TargetSpec>& targets);

Json MutationToJson(const Mutation& m);
Mutation MutationFromJson(const Json& j);

enum class OutcomeVariant { kBuildFailure, kTestsPassed, kTimeout, kCrash };
enum class Phase { kBuild, kTest };

std::string_view OutcomeVariantName(OutcomeVariant v);
std::string_view PhaseName(Phase p);

struct ExecutionOutcome {
  OutcomeVariant variant = OutcomeVariant::kTestsPassed;
  // Timeout only.
  std::optional<Phase> timed_out_phase;
  // Crash only.
  std::string signal;
  std::string raw_trace;
  double build_secs = 0.0;
  double test_secs = 0.0;
  // Exit status of the test run when it completed without a crash.
  std::optional<int> test_exit_code;
};

// Applies `m` in `workspace`, builds, runs the tests under the debugger and
// reverts. Throws kWorkspaceDirty if the target file differs from
// `pristine` beforehand, kRevertFailed if it does afterwards.
ExecutionOutcome ExecuteStep(const std::string& workspace, const Mutation& m,
                             const std::string& pristine,
                             const CampaignConfig& config,
                             const Thresholds& thresholds);

struct CrashRecord {
  Mutation mutation;
  ExecutionOutcome outcome;
  std::string project;
  std::string captured_at;
};

Json CrashRecordToJson(const CrashRecord& r);
CrashRecord CrashRecordFromJson(const Json& j);

struct CampaignSummary {
  std::size_t planned = 0;
  std::size_t executed = 0;
  std::size_t resumed = 0;
  std::map<OutcomeVariant, std::size_t> by_variant;
  std::map<MutatorKind, std::map<OutcomeVariant, std::size_t>> by_kind;
};

Json SummaryToJson(const CampaignSummary& s);

struct CampaignPaths {
  std::string records;  // CrashRecord JSONL, appended.
  std::string journal;  // Completed mutation ids, appended.
  // Parent directory for workspace clones when jobs > 1.
  std::string clones_dir;
};

struct RunOptions {
  // Stop after this many steps in this invocation; 0 runs the whole plan.
  std::size_t step_limit = 0;
  bool verbose = false;
};

// Executes every planned mutation not yet in the journal. Summary counts
// cover the steps of this invocation plus those recovered from the journal
// and record file.
CampaignSummary RunCampaign(const CampaignConfig& config,
                            const Thresholds& thresholds,
                            const std::vector<Mutation>& plan,
                            const CampaignPaths& paths,
                            std::vector<CrashRecord>* records,
                            const RunOptions& options = {});

struct JournalEntry {
  std::string id;
  OutcomeVariant variant = OutcomeVariant::kTestsPassed;
};

// Journal lines are `<id>\t<variant>`. Returns entries in file order; a
// missing file is an empty journal. Throws kJournalCorrupt naming the line.
std::vector<JournalEntry> ReadJournal(const std::string& path);

}  // namespace crashloc

#endif  // CRASHLOC_CAMPAIGN_H_
