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

#ifndef CRASHLOC_EVALUATION_H_
#define CRASHLOC_EVALUATION_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crashloc/dataset.h"
#include "crashloc/jsonl.h"
#include "crashloc/stacktrace.h"

namespace crashloc {

struct Prediction {
  std::string sample_id;
  std::string raw_output;
  std::string model_tag;
};

Json PredictionToJson(const Prediction& p);
Prediction PredictionFromJson(const Json& j);

// Cuts at the end marker, trims whitespace and removes one surrounding
// `<...>` pair.
std::string NormalizeOutput(std::string_view raw);

// Case-sensitive equality of normalized strings.
bool ExactMatch(std::string_view prediction, std::string_view target);

// The function part of a prediction: its last whitespace separated word.
std::string PredictedFunction(std::string_view prediction);

// True iff the predicted function names any label (unqualified comparison).
bool MultiTargetMatch(std::string_view prediction,
                      const std::vector<std::string>& labels);

// Splits on `/`, `.`, `::`, whitespace and parentheses. A trailing source
// file extension (c, cc, cpp, cxx, h, hh, hpp, hxx) after the last dot of a
// word is dropped.
std::vector<std::string> Terms(std::string_view s);

// Share of prediction terms found in the target, each counted at most as
// often as in the target (or once each with `set_semantics`). 0 for a
// prediction without terms.
double PairPrecision(std::string_view prediction, std::string_view target,
                     bool set_semantics = false);

// Mean PairPrecision. Throws kEmptyBatch for no pairs.
double AveragePrecision(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    bool set_semantics = false);

// The prediction's file, i.e. its first word when that word looks like a
// path. Throws kMissingFilePart otherwise.
std::string PredictedFile(std::string_view prediction);
bool FileLevelMatch(std::string_view prediction, std::string_view target);

// Position of the first frame whose unqualified name equals the predicted
// function, scaled to [0, 1]; nullopt when nothing matches.
std::optional<double> PredictionDepth(std::string_view predicted_function,
                                      const std::vector<Frame>& frames);
std::optional<double> PredictionDepth(std::string_view predicted_function,
                                      std::string_view rendered_trace);

enum class MatchMode { kFileAndFunction, kFunctionOnly, kAuthentic };
std::optional<MatchMode> ParseMatchMode(std::string_view name);

// The string a prediction is compared against under `mode`.
std::string ExpectedOutput(const Sample& s, MatchMode mode);

// The innermost frame's function, prefixed by its file in kFileAndFunction
// mode when the frame has one.
std::string InnermostPrediction(const Sample& sample, MatchMode mode);

// Hashed character n-gram embedding with a 1-nearest-neighbour lookup.
class NnModel {
 public:
  static constexpr std::size_t kDefaultDim = 256;

  // Throws kEmptyTrainSet.
  static NnModel Train(const std::vector<Sample>& train,
                       std::size_t dim = kDefaultDim);

  struct Neighbor {
    std::string sample_id;
    std::string target_file;
    std::string target_function;
    double cosine = 0.0;
  };

  // Most similar training trace; ties go to the smallest sample id.
  Neighbor Nearest(std::string_view trace) const;

  std::vector<double> Embed(std::string_view text) const;
  std::size_t dim() const { return dim_; }

 private:
  struct Entry {
    Neighbor label;
    std::vector<double> vec;
  };
  std::size_t dim_ = kDefaultDim;
  std::vector<Entry> entries_;
};

// Unit-length hashed character 3- to 5-gram counts.
std::vector<double> EmbedTrace(std::string_view text, std::size_t dim);
double Cosine(const std::vector<double>& a, const std::vector<double>& b);

struct Slice {
  std::size_t count = 0;
  std::size_t correct = 0;
  double Accuracy() const {
    return count == 0 ? 0.0 : static_cast<double>(correct) / count;
  }
};

struct MutatorBreakdown {
  Slice total;
  Slice local;
  Slice nonlocal;
};

struct EvalReport {
  std::string model_tag;
  MatchMode mode = MatchMode::kFileAndFunction;
  Slice total;
  Slice local;
  Slice nonlocal;
  // kFileAndFunction only: predictions without a file part count as wrong.
  std::optional<Slice> file_level;
  double average_precision_total = 0.0;
  double average_precision_local = 0.0;
  double average_precision_nonlocal = 0.0;
  std::optional<double> avg_prediction_depth;
  std::size_t depth_count = 0;
  std::map<std::string, MutatorBreakdown> per_mutator;
  std::size_t unseen_target_correct = 0;
  std::size_t unparseable_count = 0;
  std::size_t missing_count = 0;
};

struct EvalOptions {
  MatchMode mode = MatchMode::kFileAndFunction;
  bool set_semantics = false;
  std::string model_tag;
};

// Samples scored by Evaluate: the Val split, or everything when no sample is
// assigned to Val.
std::vector<Sample> ScoredSamples(const std::vector<Sample>& samples);

// Scores predictions for ScoredSamples(samples). Missing predictions count as
// wrong. Throws kUnknownSampleId for predictions outside the scored set.
EvalReport Evaluate(const std::vector<Sample>& samples,
                    const std::vector<Prediction>& predictions,
                    const EvalOptions& options);

std::vector<Prediction> InnermostBaseline(const std::vector<Sample>& samples,
                                          MatchMode mode);
// Trains on the Train split. Throws kEmptyTrainSet when it is empty.
std::vector<Prediction> NnBaseline(const std::vector<Sample>& samples,
                                   MatchMode mode);

Json ReportToJson(const EvalReport& r);
// Accuracy table (Local / Non-Local / Total per model) followed by average
// precision and depth.
std::string ReportMarkdown(const std::vector<EvalReport>& reports);

}  // namespace crashloc

#endif  // CRASHLOC_EVALUATION_H_
