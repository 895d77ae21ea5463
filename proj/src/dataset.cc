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

#include "crashloc/dataset.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "crashloc/error.h"

namespace crashloc {

namespace {

std::string PairKey(const Sample& s) {
  // The trace cannot contain NUL, so this is unambiguous.
  return s.trace + std::string(1, '\0') + TargetString(s);
}

std::string FormatFixed(double v, int digits) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

}  // namespace

std::string_view LocalityName(Locality l) {
  return l == Locality::kLocal ? "Local" : "NonLocal";
}

std::string_view SplitNameText(SplitName s) {
  switch (s) {
    case SplitName::kTrain: return "Train";
    case SplitName::kVal: return "Val";
    case SplitName::kUnassigned: return "Unassigned";
  }
  return "Unassigned";
}

std::string TargetString(const Sample& s) {
  return s.target_file + " " + s.target_function;
}

Json SampleToJson(const Sample& s) {
  Json j = {{"id", s.id},
            {"project", s.project},
            {"trace", s.trace},
            {"target_file", s.target_file},
            {"target_function", s.target_function},
            {"mutator", s.mutator},
            {"locality", std::string(LocalityName(s.locality))},
            {"split", std::string(SplitNameText(s.split))}};
  if (!s.labels.empty()) j["labels"] = s.labels;
  return j;
}

Sample SampleFromJson(const Json& j) {
  Sample s;
  s.id = RequireString(j, "id");
  s.project = j.value("project", std::string());
  s.trace = RequireString(j, "trace");
  s.target_file = RequireString(j, "target_file");
  s.target_function = RequireString(j, "target_function");
  s.mutator = j.value("mutator", std::string());
  const std::string locality = j.value("locality", std::string());
  if (locality == "Local") {
    s.locality = Locality::kLocal;
  } else if (locality == "NonLocal") {
    s.locality = Locality::kNonLocal;
  } else {
    s.locality = ClassifyLocality(s.trace, s.target_function);
  }
  const std::string split = j.value("split", std::string("Unassigned"));
  if (split == "Train") {
    s.split = SplitName::kTrain;
  } else if (split == "Val") {
    s.split = SplitName::kVal;
  } else if (split == "Unassigned") {
    s.split = SplitName::kUnassigned;
  } else {
    throw Error(ErrorCode::kParseError, "unknown split '" + split + "'");
  }
  if (auto it = j.find("labels"); it != j.end()) {
    s.labels = it->get<std::vector<std::string>>();
  }
  return s;
}

std::vector<Sample> ReadSamples(const std::string& path) {
  std::vector<Sample> samples;
  for (const Json& j : ReadJsonl(path)) samples.push_back(SampleFromJson(j));
  return samples;
}

void WriteSamples(const std::string& path, const std::vector<Sample>& samples) {
  std::vector<Json> rows;
  rows.reserve(samples.size());
  for (const Sample& s : samples) rows.push_back(SampleToJson(s));
  WriteJsonl(path, rows);
}

Locality ClassifyLocality(std::string_view rendered_trace,
                          std::string_view target_function) {
  const std::string target = UnqualifiedName(target_function);
  for (const Frame& f : RenderedFrames(rendered_trace)) {
    if (UnqualifiedName(f.function) == target) return Locality::kLocal;
  }
  return Locality::kNonLocal;
}

std::vector<Sample> SamplesFromRecords(const std::vector<CrashRecord>& records,
                                       const SampleOptions& options,
                                       std::size_t* skipped) {
  std::vector<Sample> samples;
  std::size_t dropped = 0;
  for (const CrashRecord& r : records) {
    Sample s;
    try {
      s.trace = Preprocess(r.outcome.raw_trace, options.format,
                           options.token_budget, options.parse);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoFramesFound) throw;
      ++dropped;
      continue;
    }
    s.id = r.mutation.id;
    s.project = r.project;
    s.target_file = r.mutation.site.enclosing_file;
    s.target_function = r.mutation.site.enclosing_function;
    s.mutator = std::string(MutatorName(r.mutation.site.kind));
    s.locality = ClassifyLocality(s.trace, s.target_function);
    samples.push_back(std::move(s));
  }
  if (skipped) *skipped = dropped;
  return samples;
}

std::optional<DedupMode> ParseDedupMode(std::string_view name) {
  if (name == "pair") return DedupMode::kPairUnique;
  if (name == "trace") return DedupMode::kTraceUnique;
  return std::nullopt;
}

std::vector<Sample> Deduplicate(const std::vector<Sample>& samples,
                                DedupMode mode) {
  std::unordered_set<std::string> seen;
  std::vector<Sample> out;
  for (const Sample& s : samples) {
    const std::string key =
        mode == DedupMode::kPairUnique ? PairKey(s) : s.trace;
    if (seen.insert(key).second) out.push_back(s);
  }
  return out;
}

std::vector<Sample> SplitSamples(std::vector<Sample> samples,
                                 double train_fraction, std::uint64_t seed) {
  if (train_fraction < 0.0 || train_fraction > 1.0) {
    throw Error(ErrorCode::kConfigError, "train fraction outside [0, 1]");
  }
  std::unordered_set<std::string> pairs;
  for (const Sample& s : samples) {
    if (!pairs.insert(PairKey(s)).second) {
      throw Error(ErrorCode::kNotDeduplicated,
                  "sample " + s.id + " repeats an earlier (trace, target) pair");
    }
  }
  const std::size_t n = samples.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng() % i]);
  }
  // The epsilon absorbs products such as 0.9 * 10 landing a hair below 9.
  const auto train = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * train_fraction + 1e-9));
  for (std::size_t k = 0; k < n; ++k) {
    samples[order[k]].split = k < train ? SplitName::kTrain : SplitName::kVal;
  }
  return samples;
}

DatasetStats ComputeStats(const std::vector<Sample>& samples) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyDataset, "no samples");
  DatasetStats stats;
  stats.crash_count = samples.size();
  std::set<std::pair<std::string, std::string>> targets;
  std::unordered_set<std::string> traces;
  std::unordered_set<std::string> pairs;
  std::size_t local = 0;
  for (const Sample& s : samples) {
    targets.emplace(s.target_file, s.target_function);
    traces.insert(s.trace);
    pairs.insert(PairKey(s));
    if (s.locality == Locality::kLocal) ++local;
    ++stats.per_mutator[s.mutator];
    stats.max_trace_depth =
        std::max(stats.max_trace_depth, RenderedFrames(s.trace).size());
  }
  const double n = static_cast<double>(samples.size());
  stats.unique_targets = targets.size();
  stats.percent_local = 100.0 * static_cast<double>(local) / n;
  stats.avg_occurrence_per_trace = n / static_cast<double>(traces.size());
  stats.avg_occurrence_per_pair = n / static_cast<double>(pairs.size());
  return stats;
}

Json StatsToJson(const DatasetStats& s) {
  Json per_mutator = Json::object();
  for (const auto& [k, v] : s.per_mutator) per_mutator[k] = v;
  Json j = Json::object();
  // Keys are emitted sorted, which puts #C, #T, %L first and in table order.
  j["#C"] = s.crash_count;
  j["#T"] = s.unique_targets;
  j["%L"] = s.percent_local;
  j["max_trace_depth"] = s.max_trace_depth;
  j["per_mutator"] = per_mutator;
  j["avg_occurrence_per_trace"] = s.avg_occurrence_per_trace;
  j["avg_occurrence_per_pair"] = s.avg_occurrence_per_pair;
  return j;
}

std::string StatsMarkdown(
    const std::vector<std::pair<std::string, DatasetStats>>& rows) {
  std::string out = "| Project | #C | #T | %L |\n|---|---:|---:|---:|\n";
  for (const auto& [name, s] : rows) {
    out += "| " + name + " | " + std::to_string(s.crash_count) + " | " +
           std::to_string(s.unique_targets) + " | " +
           FormatFixed(s.percent_local, 1) + " |\n";
  }
  return out;
}

AuthenticReport AuthenticReportFromJson(const Json& j) {
  AuthenticReport r;
  r.id = RequireString(j, "id");
  r.project = j.value("project", std::string());
  r.trace = RequireString(j, "trace");
  r.fix_files = j.value("fix_files", std::vector<std::string>());
  r.fix_methods = j.value("fix_methods", std::vector<std::string>());
  return r;
}

std::vector<Sample> FilterAuthentic(
    const std::vector<AuthenticReport>& reports) {
  std::vector<Sample> out;
  for (const AuthenticReport& r : reports) {
    if (r.fix_files.size() != 1 || r.fix_methods.empty()) continue;
    std::set<std::string> frame_names;
    for (const Frame& f : RenderedFrames(r.trace)) {
      frame_names.insert(UnqualifiedName(f.function));
    }
    const auto hit = std::find_if(
        r.fix_methods.begin(), r.fix_methods.end(), [&](const std::string& m) {
          return frame_names.count(UnqualifiedName(m)) > 0;
        });
    if (hit == r.fix_methods.end()) continue;
    Sample s;
    s.id = r.id;
    s.project = r.project;
    s.trace = r.trace;
    s.target_file = r.fix_files[0];
    s.target_function = *hit;
    s.mutator = "Authentic";
    s.locality = Locality::kLocal;
    s.labels = r.fix_methods;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace crashloc
