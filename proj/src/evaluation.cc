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

#include "crashloc/evaluation.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "crashloc/error.h"
#include "crashloc/prompting.h"

namespace crashloc {

namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::string Trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && IsSpace(s[b])) ++b;
  while (e > b && IsSpace(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string_view> Words(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && IsSpace(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !IsSpace(s[i])) ++i;
    if (i > start) words.push_back(s.substr(start, i - start));
  }
  return words;
}

bool IsSourceExtension(std::string_view ext) {
  static const std::set<std::string_view> kExtensions = {
      "c", "cc", "cpp", "cxx", "h", "hh", "hpp", "hxx"};
  return kExtensions.count(ext) > 0;
}

// Length of `word` without a trailing `.ext` source extension.
std::size_t StemLength(std::string_view word) {
  if (word.find("::") != std::string_view::npos ||
      word.find('(') != std::string_view::npos) {
    return word.size();
  }
  const std::size_t dot = word.rfind('.');
  if (dot == std::string_view::npos || dot == 0) return word.size();
  const std::string_view ext = word.substr(dot + 1);
  if (ext.find('/') != std::string_view::npos || !IsSourceExtension(ext)) {
    return word.size();
  }
  return dot;
}

bool LooksLikePath(std::string_view word) {
  return word.find('/') != std::string_view::npos ||
         StemLength(word) != word.size();
}

// FNV-1a, 64 bit.
std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string Percent(double v) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(1);
  out << 100.0 * v;
  return out.str();
}

std::string Fixed(double v, int digits) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

Json SliceJson(const Slice& s) {
  return {{"count", s.count}, {"correct", s.correct}, {"accuracy", s.Accuracy()}};
}

}  // namespace

Json PredictionToJson(const Prediction& p) {
  return {{"sample_id", p.sample_id},
          {"raw_output", p.raw_output},
          {"model_tag", p.model_tag}};
}

Prediction PredictionFromJson(const Json& j) {
  return {RequireString(j, "sample_id"), RequireString(j, "raw_output"),
          j.value("model_tag", std::string())};
}

std::string NormalizeOutput(std::string_view raw) {
  const std::size_t end = raw.find(kEndOfText);
  if (end != std::string_view::npos) raw = raw.substr(0, end);
  std::string s = Trim(raw);
  if (s.size() >= 2 && s.front() == '<' && s.back() == '>') {
    s = Trim(std::string_view(s).substr(1, s.size() - 2));
  }
  return s;
}

bool ExactMatch(std::string_view prediction, std::string_view target) {
  return NormalizeOutput(prediction) == NormalizeOutput(target);
}

std::string PredictedFunction(std::string_view prediction) {
  const std::vector<std::string_view> words = Words(prediction);
  return words.empty() ? std::string() : std::string(words.back());
}

bool MultiTargetMatch(std::string_view prediction,
                      const std::vector<std::string>& labels) {
  const std::string predicted = PredictedFunction(prediction);
  if (predicted.empty()) return false;
  const std::string name = UnqualifiedName(predicted);
  return std::any_of(labels.begin(), labels.end(), [&](const std::string& l) {
    return UnqualifiedName(l) == name;
  });
}

std::vector<std::string> Terms(std::string_view s) {
  std::vector<std::string> terms;
  for (std::string_view word : Words(s)) {
    word = word.substr(0, StemLength(word));
    std::string current;
    auto flush = [&]() {
      if (!current.empty()) terms.push_back(std::move(current));
      current.clear();
    };
    for (std::size_t i = 0; i < word.size(); ++i) {
      const char c = word[i];
      if (c == '/' || c == '.' || c == '(' || c == ')') {
        flush();
      } else if (c == ':' && i + 1 < word.size() && word[i + 1] == ':') {
        flush();
        ++i;
      } else {
        current += c;
      }
    }
    flush();
  }
  return terms;
}

double PairPrecision(std::string_view prediction, std::string_view target,
                     bool set_semantics) {
  std::vector<std::string> p = Terms(prediction);
  std::vector<std::string> t = Terms(target);
  if (set_semantics) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
  }
  if (p.empty()) return 0.0;
  std::unordered_map<std::string, std::size_t> available;
  for (const std::string& term : t) ++available[term];
  std::size_t matched = 0;
  for (const std::string& term : p) {
    auto it = available.find(term);
    if (it != available.end() && it->second > 0) {
      --it->second;
      ++matched;
    }
  }
  return static_cast<double>(matched) / static_cast<double>(p.size());
}

double AveragePrecision(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    bool set_semantics) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyBatch, "no pairs to score");
  double sum = 0.0;
  for (const auto& [pred, target] : pairs) {
    sum += PairPrecision(pred, target, set_semantics);
  }
  return sum / static_cast<double>(pairs.size());
}

std::string PredictedFile(std::string_view prediction) {
  const std::vector<std::string_view> words = Words(prediction);
  if (words.empty() || !LooksLikePath(words.front())) {
    throw Error(ErrorCode::kMissingFilePart,
                "prediction '" + std::string(prediction) + "' names no file");
  }
  return std::string(words.front());
}

bool FileLevelMatch(std::string_view prediction, std::string_view target) {
  const std::string file = PredictedFile(prediction);
  const std::vector<std::string_view> words = Words(target);
  return !words.empty() && words.front() == file;
}

std::optional<double> PredictionDepth(std::string_view predicted_function,
                                      const std::vector<Frame>& frames) {
  const std::string name = UnqualifiedName(PredictedFunction(predicted_function));
  if (name.empty() || frames.empty()) return std::nullopt;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (UnqualifiedName(frames[i].function) == name) {
      if (frames.size() == 1) return 0.0;
      return static_cast<double>(i) / static_cast<double>(frames.size() - 1);
    }
  }
  return std::nullopt;
}

std::optional<double> PredictionDepth(std::string_view predicted_function,
                                      std::string_view rendered_trace) {
  return PredictionDepth(predicted_function, RenderedFrames(rendered_trace));
}

std::optional<MatchMode> ParseMatchMode(std::string_view name) {
  if (name == "file-function") return MatchMode::kFileAndFunction;
  if (name == "function") return MatchMode::kFunctionOnly;
  if (name == "authentic") return MatchMode::kAuthentic;
  return std::nullopt;
}

std::string ExpectedOutput(const Sample& s, MatchMode mode) {
  return mode == MatchMode::kFileAndFunction ? TargetString(s)
                                             : s.target_function;
}

std::string InnermostPrediction(const Sample& sample, MatchMode mode) {
  const std::vector<Frame> frames = RenderedFrames(sample.trace);
  if (frames.empty()) return {};
  const Frame& f = frames.front();
  if (mode == MatchMode::kFileAndFunction && f.file) {
    return *f.file + " " + f.function;
  }
  return f.function;
}

std::vector<double> EmbedTrace(std::string_view text, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  for (std::size_t n = 3; n <= 5; ++n) {
    for (std::size_t i = 0; i + n <= text.size(); ++i) {
      v[Fnv1a(text.substr(i, n)) % dim] += 1.0;
    }
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0) {
    for (double& x : v) x /= norm;
  }
  return v;
}

double Cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

NnModel NnModel::Train(const std::vector<Sample>& train, std::size_t dim) {
  if (train.empty()) throw Error(ErrorCode::kEmptyTrainSet, "no training samples");
  NnModel model;
  model.dim_ = dim;
  for (const Sample& s : train) {
    model.entries_.push_back(
        {{s.id, s.target_file, s.target_function, 0.0}, EmbedTrace(s.trace, dim)});
  }
  return model;
}

std::vector<double> NnModel::Embed(std::string_view text) const {
  return EmbedTrace(text, dim_);
}

NnModel::Neighbor NnModel::Nearest(std::string_view trace) const {
  const std::vector<double> q = Embed(trace);
  const Entry* best = nullptr;
  double best_score = 0.0;
  for (const Entry& e : entries_) {
    const double score = Cosine(q, e.vec);
    if (best == nullptr || score > best_score ||
        (score == best_score && e.label.sample_id < best->label.sample_id)) {
      best = &e;
      best_score = score;
    }
  }
  Neighbor n = best->label;
  n.cosine = best_score;
  return n;
}

std::vector<Sample> ScoredSamples(const std::vector<Sample>& samples) {
  std::vector<Sample> val;
  for (const Sample& s : samples) {
    if (s.split == SplitName::kVal) val.push_back(s);
  }
  return val.empty() ? samples : val;
}

EvalReport Evaluate(const std::vector<Sample>& samples,
                    const std::vector<Prediction>& predictions,
                    const EvalOptions& options) {
  const std::vector<Sample> scored = ScoredSamples(samples);
  std::unordered_set<std::string> scored_ids;
  for (const Sample& s : scored) scored_ids.insert(s.id);
  std::unordered_map<std::string, const Prediction*> by_id;
  for (const Prediction& p : predictions) {
    if (!scored_ids.count(p.sample_id)) {
      throw Error(ErrorCode::kUnknownSampleId,
                  "prediction for unknown sample '" + p.sample_id + "'");
    }
    by_id.emplace(p.sample_id, &p);
  }
  std::set<std::pair<std::string, std::string>> train_targets;
  for (const Sample& s : samples) {
    if (s.split == SplitName::kTrain) {
      train_targets.emplace(s.target_file, s.target_function);
    }
  }

  EvalReport report;
  report.model_tag = options.model_tag;
  report.mode = options.mode;
  if (report.model_tag.empty() && !predictions.empty()) {
    report.model_tag = predictions.front().model_tag;
  }
  if (options.mode == MatchMode::kFileAndFunction) report.file_level = Slice{};
  std::vector<std::pair<std::string, std::string>> ap_all, ap_local, ap_nonlocal;
  double depth_sum = 0.0;

  for (const Sample& s : scored) {
    const bool local = s.locality == Locality::kLocal;
    Slice& loc_slice = local ? report.local : report.nonlocal;
    MutatorBreakdown& mb = report.per_mutator[s.mutator];
    Slice& mb_loc = local ? mb.local : mb.nonlocal;
    ++report.total.count;
    ++loc_slice.count;
    ++mb.total.count;
    ++mb_loc.count;
    if (report.file_level) ++report.file_level->count;

    const std::string expected = ExpectedOutput(s, options.mode);
    auto it = by_id.find(s.id);
    std::string pred;
    if (it == by_id.end()) {
      ++report.missing_count;
    } else {
      pred = NormalizeOutput(it->second->raw_output);
      if (pred.empty() || pred.find('\n') != std::string::npos) {
        ++report.unparseable_count;
      }
    }
    (local ? ap_local : ap_nonlocal).emplace_back(pred, expected);
    ap_all.emplace_back(pred, expected);
    if (it == by_id.end()) continue;

    bool correct = false;
    if (options.mode == MatchMode::kAuthentic) {
      correct = MultiTargetMatch(
          pred, s.labels.empty() ? std::vector<std::string>{s.target_function}
                                 : s.labels);
    } else {
      correct = ExactMatch(pred, expected);
    }
    if (correct) {
      ++report.total.correct;
      ++loc_slice.correct;
      ++mb.total.correct;
      ++mb_loc.correct;
      if (!train_targets.count({s.target_file, s.target_function})) {
        ++report.unseen_target_correct;
      }
    }
    if (report.file_level) {
      try {
        if (FileLevelMatch(pred, expected)) ++report.file_level->correct;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kMissingFilePart) throw;
      }
    }
    if (pred.find('\n') == std::string::npos) {
      if (auto d = PredictionDepth(pred, s.trace)) {
        depth_sum += *d;
        ++report.depth_count;
      }
    }
  }
  if (!ap_all.empty()) {
    report.average_precision_total = AveragePrecision(ap_all, options.set_semantics);
  }
  if (!ap_local.empty()) {
    report.average_precision_local =
        AveragePrecision(ap_local, options.set_semantics);
  }
  if (!ap_nonlocal.empty()) {
    report.average_precision_nonlocal =
        AveragePrecision(ap_nonlocal, options.set_semantics);
  }
  if (report.depth_count > 0) {
    report.avg_prediction_depth =
        depth_sum / static_cast<double>(report.depth_count);
  }
  return report;
}

std::vector<Prediction> InnermostBaseline(const std::vector<Sample>& samples,
                                          MatchMode mode) {
  std::vector<Prediction> out;
  for (const Sample& s : ScoredSamples(samples)) {
    out.push_back({s.id, InnermostPrediction(s, mode), "innermost"});
  }
  return out;
}

std::vector<Prediction> NnBaseline(const std::vector<Sample>& samples,
                                   MatchMode mode) {
  std::vector<Sample> train;
  for (const Sample& s : samples) {
    if (s.split == SplitName::kTrain) train.push_back(s);
  }
  const NnModel model = NnModel::Train(train);
  std::vector<Prediction> out;
  for (const Sample& s : ScoredSamples(samples)) {
    const NnModel::Neighbor n = model.Nearest(s.trace);
    std::string text = mode == MatchMode::kFileAndFunction
                           ? n.target_file + " " + n.target_function
                           : n.target_function;
    out.push_back({s.id, text, "nn"});
  }
  return out;
}

Json ReportToJson(const EvalReport& r) {
  Json per_mutator = Json::object();
  for (const auto& [name, b] : r.per_mutator) {
    per_mutator[name] = {{"total", SliceJson(b.total)},
                         {"local", SliceJson(b.local)},
                         {"nonlocal", SliceJson(b.nonlocal)}};
  }
  Json j = {
      {"model_tag", r.model_tag},
      {"mode", r.mode == MatchMode::kFileAndFunction ? "file-function"
               : r.mode == MatchMode::kFunctionOnly  ? "function"
                                                     : "authentic"},
      {"accuracy_total", r.total.Accuracy()},
      {"accuracy_local", r.local.Accuracy()},
      {"accuracy_nonlocal", r.nonlocal.Accuracy()},
      {"total", SliceJson(r.total)},
      {"local", SliceJson(r.local)},
      {"nonlocal", SliceJson(r.nonlocal)},
      {"average_precision_total", r.average_precision_total},
      {"average_precision_local", r.average_precision_local},
      {"average_precision_nonlocal", r.average_precision_nonlocal},
      {"depth_count", r.depth_count},
      {"per_mutator", per_mutator},
      {"unseen_target_correct", r.unseen_target_correct},
      {"unparseable_count", r.unparseable_count},
      {"missing_count", r.missing_count},
  };
  j["file_level_accuracy"] =
      r.file_level ? Json(r.file_level->Accuracy()) : Json(nullptr);
  j["avg_prediction_depth"] =
      r.avg_prediction_depth ? Json(*r.avg_prediction_depth) : Json(nullptr);
  return j;
}

std::string ReportMarkdown(const std::vector<EvalReport>& reports) {
  std::string out =
      "| Model | Local | Non-Local | Total |\n|---|---:|---:|---:|\n";
  for (const EvalReport& r : reports) {
    out += "| " + r.model_tag + " | " + Percent(r.local.Accuracy()) + " | " +
           Percent(r.nonlocal.Accuracy()) + " | " +
           Percent(r.total.Accuracy()) + " |\n";
  }
  out += "\n| Model | AP Local | AP Non-Local | AP Total | File-level | "
         "Avg depth | Unseen correct |\n"
         "|---|---:|---:|---:|---:|---:|---:|\n";
  for (const EvalReport& r : reports) {
    out += "| " + r.model_tag + " | " + Fixed(r.average_precision_local, 3) +
           " | " + Fixed(r.average_precision_nonlocal, 3) + " | " +
           Fixed(r.average_precision_total, 3) + " | " +
           (r.file_level ? Percent(r.file_level->Accuracy()) : "-") + " | " +
           (r.avg_prediction_depth ? Fixed(*r.avg_prediction_depth, 3) : "-") +
           " | " + std::to_string(r.unseen_target_correct) + " |\n";
  }
  return out;
}

}  // namespace crashloc
