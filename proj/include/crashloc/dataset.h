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

#ifndef CRASHLOC_DATASET_H_
#define CRASHLOC_DATASET_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crashloc/campaign.h"
#include "crashloc/jsonl.h"
#include "crashloc/stacktrace.h"

namespace crashloc {

enum class Locality { kLocal, kNonLocal };
enum class SplitName { kTrain, kVal, kUnassigned };

std::string_view LocalityName(Locality l);
std::string_view SplitNameText(SplitName s);

struct Sample {
  std::string id;
  std::string project;
  // Rendered (preprocessed) trace.
  std::string trace;
  std::string target_file;
  std::string target_function;
  std::string mutator;
  Locality locality = Locality::kNonLocal;
  SplitName split = SplitName::kUnassigned;
  // Authentic crashes: every method changed by the fix.
  std::vector<std::string> labels;
};

// `<target_file> <target_function>`.
std::string TargetString(const Sample& s);

Json SampleToJson(const Sample& s);
Sample SampleFromJson(const Json& j);
std::vector<Sample> ReadSamples(const std::string& path);
void WriteSamples(const std::string& path, const std::vector<Sample>& samples);

// Local iff the unqualified target name equals the unqualified name of some
// frame in the rendered trace.
Locality ClassifyLocality(std::string_view rendered_trace,
                          std::string_view target_function);

struct SampleOptions {
  TraceFormat format = TraceFormat::kGdbTopFirst;
  std::size_t token_budget = kDefaultTokenBudget;
  TraceParseOptions parse;
};

// Preprocesses each record's trace into a sample. Records whose trace has
// no recognizable frame are skipped and counted in `skipped`.
std::vector<Sample> SamplesFromRecords(const std::vector<CrashRecord>& records,
                                       const SampleOptions& options,
                                       std::size_t* skipped = nullptr);

enum class DedupMode { kPairUnique, kTraceUnique };
std::optional<DedupMode> ParseDedupMode(std::string_view name);

// Keeps the first sample of each (trace, target) pair or of each trace.
std::vector<Sample> Deduplicate(const std::vector<Sample>& samples,
                                DedupMode mode);

inline constexpr double kDefaultTrainFraction = 0.9;

// Seeded shuffle; the first floor(n * train_fraction) go to Train, the rest
// to Val. Sample order is unchanged. Throws kNotDeduplicated when two
// samples share a (trace, target) pair.
std::vector<Sample> SplitSamples(std::vector<Sample> samples,
                                 double train_fraction, std::uint64_t seed);

struct DatasetStats {
  std::size_t crash_count = 0;     // #C
  std::size_t unique_targets = 0;  // #T
  double percent_local = 0.0;      // %L
  std::size_t max_trace_depth = 0;
  std::map<std::string, std::size_t> per_mutator;
  // Samples per distinct trace and per distinct (trace, target) pair; both
  // exceed 1 only on data that still holds duplicates.
  double avg_occurrence_per_trace = 0.0;
  double avg_occurrence_per_pair = 0.0;
};

// Throws kEmptyDataset.
DatasetStats ComputeStats(const std::vector<Sample>& samples);

Json StatsToJson(const DatasetStats& s);

// `| Project | #C | #T | %L |` table, one row per entry.
std::string StatsMarkdown(
    const std::vector<std::pair<std::string, DatasetStats>>& rows);

// A real crash together with what its fix changed.
struct AuthenticReport {
  std::string id;
  std::string project;
  std::string trace;
  std::vector<std::string> fix_files;
  std::vector<std::string> fix_methods;
};

AuthenticReport AuthenticReportFromJson(const Json& j);

// Keeps reports whose fix touches exactly one file and at least one method
// appearing in the trace. Labels are all changed methods; the target is the
// first changed method found in the trace.
std::vector<Sample> FilterAuthentic(const std::vector<AuthenticReport>& reports);

}  // namespace crashloc

#endif  // CRASHLOC_DATASET_H_
