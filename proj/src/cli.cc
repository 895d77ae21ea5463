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

#include "crashloc/cli.h"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "crashloc/campaign.h"
#include "crashloc/dataset.h"
#include "crashloc/error.h"
#include "crashloc/evaluation.h"
#include "crashloc/prompting.h"
#include "crashloc/stacktrace.h"

namespace crashloc {

namespace fs = std::filesystem;

namespace {

struct Options {
  // Global.
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::string out_dir = "out";
  bool verbose = false;

  // enumerate / campaign.
  std::string workspace;
  std::string coverage;
  std::vector<std::string> kinds;
  std::optional<std::size_t> max_mutations;
  std::string plan;
  std::size_t limit = 0;

  // preprocess / dataset.
  std::vector<std::string> inputs;
  std::string format = "gdb";
  std::size_t budget = kDefaultTokenBudget;
  std::string marker = "[CRASH_STACK]";
  std::string obfuscate;
  std::string records;
  std::string authentic;
  std::string dedup = "pair";
  double train_fraction = kDefaultTrainFraction;
  std::string project;

  // prompts.
  std::string dataset;
  std::string prompt_mode = "finetune";
  std::string template_path;
  std::string language = "c";
  std::string split;
  std::string sources_root;
  std::vector<std::string> sources;
  std::string exclude;

  // eval / report.
  std::vector<std::string> predictions;
  std::string baseline;
  std::string match_mode = "file-function";
  bool set_semantics = false;
  std::string tag;
  bool baselines = false;
};

std::string OutPath(const Options& o, const std::string& name) {
  return (fs::path(o.out_dir) / name).string();
}

void EnsureOutDir(const Options& o) { fs::create_directories(o.out_dir); }

CampaignConfig ResolveConfig(const Options& o) {
  CampaignConfig config;
  if (!o.config_path.empty()) config = LoadConfig(o.config_path);
  if (!o.workspace.empty()) config.workspace = o.workspace;
  if (!o.coverage.empty()) config.coverage = o.coverage;
  if (o.seed) config.seed = *o.seed;
  if (o.jobs) config.jobs = *o.jobs;
  if (o.max_mutations) config.max_mutations = *o.max_mutations;
  if (!o.project.empty()) config.project = o.project;
  if (!o.kinds.empty()) {
    config.mutator_kinds.clear();
    for (const std::string& name : o.kinds) {
      auto kind = ParseMutatorKind(name);
      if (!kind) {
        throw Error(ErrorCode::kConfigError, "unknown mutator '" + name + "'");
      }
      config.mutator_kinds.insert(*kind);
    }
  }
  return config;
}

TraceFormat ResolveFormat(const std::string& name) {
  auto f = ParseTraceFormat(name);
  if (!f) throw Error(ErrorCode::kConfigError, "unknown trace format " + name);
  return *f;
}

std::vector<Mutation> ReadPlan(const std::string& path) {
  std::vector<Mutation> plan;
  for (const Json& j : ReadJsonl(path)) plan.push_back(MutationFromJson(j));
  return plan;
}

int CmdEnumerate(const Options& o, std::ostream& out) {
  const CampaignConfig config = ResolveConfig(o);
  if (config.workspace.empty()) {
    throw Error(ErrorCode::kConfigError, "no workspace given");
  }
  if (config.coverage.empty()) {
    throw Error(ErrorCode::kConfigError, "no coverage file given");
  }
  const std::vector<TargetSpec> targets =
      LoadCoverage(ReadFileBytes(config.coverage));
  const std::vector<MutationSite> sites = EnumerateFiles(
      config.workspace, SourceFiles(config, targets), config.mutator_kinds);
  const std::vector<Mutation> plan = Plan(sites, targets, config);

  EnsureOutDir(o);
  const std::string plan_path = o.plan.empty() ? OutPath(o, "plan.jsonl") : o.plan;
  std::vector<Json> rows;
  for (const Mutation& m : plan) rows.push_back(MutationToJson(m));
  WriteJsonl(plan_path, rows);

  std::map<MutatorKind, std::size_t> site_counts, plan_counts;
  for (const MutationSite& s : sites) ++site_counts[s.kind];
  for (const Mutation& m : plan) ++plan_counts[m.site.kind];
  out << "mutator\tsites\tplanned\n";
  for (MutatorKind k : kAllMutatorKinds) {
    if (!config.mutator_kinds.count(k)) continue;
    out << MutatorName(k) << '\t' << site_counts[k] << '\t' << plan_counts[k]
        << '\n';
  }
  out << "total\t" << sites.size() << '\t' << plan.size() << '\n';
  out << "plan written to " << plan_path << '\n';
  return kExitOk;
}

int CmdCampaign(const Options& o, std::ostream& out, std::ostream& err) {
  CampaignConfig config = ResolveConfig(o);
  ValidateConfig(config);
  const std::string plan_path = o.plan.empty() ? OutPath(o, "plan.jsonl") : o.plan;
  const std::vector<Mutation> plan = ReadPlan(plan_path);
  EnsureOutDir(o);
  CampaignPaths paths{OutPath(o, "records.jsonl"), OutPath(o, "journal.tsv"),
                      OutPath(o, "clones")};

  // Skip calibration when the journal already covers the plan.
  std::size_t done = 0;
  {
    std::set<std::string> ids;
    for (const JournalEntry& e : ReadJournal(paths.journal)) ids.insert(e.id);
    for (const Mutation& m : plan) done += ids.count(m.id);
  }
  Thresholds thresholds{config.build_threshold_secs, config.test_threshold_secs};
  if (done < plan.size()) {
    thresholds = CalibrateThresholds(config);
    if (o.verbose) {
      err << "thresholds: build " << thresholds.build_secs << " s, test "
          << thresholds.test_secs << " s\n";
    }
  }
  RunOptions run;
  run.step_limit = o.limit;
  run.verbose = o.verbose;
  std::vector<CrashRecord> records;
  const CampaignSummary summary =
      RunCampaign(config, thresholds, plan, paths, &records, run);
  Json j = SummaryToJson(summary);
  j["crash_records"] = records.size();
  j["build_threshold_secs"] = thresholds.build_secs;
  j["test_threshold_secs"] = thresholds.test_secs;
  WriteFileBytes(OutPath(o, "summary.json"), j.dump(2) + "\n");
  out << j.dump(2) << '\n';
  return kExitOk;
}

int CmdPreprocess(const Options& o, std::ostream& out) {
  TraceParseOptions parse;
  parse.section_marker = o.marker;
  const TraceFormat format = ResolveFormat(o.format);
  std::optional<ObfuscationMode> mode;
  if (!o.obfuscate.empty()) {
    mode = ParseObfuscationMode(o.obfuscate);
    if (!mode) throw Error(ErrorCode::kConfigError, "unknown obfuscation mode");
  }
  std::vector<std::string> texts;
  if (o.inputs.empty()) {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    texts.push_back(buf.str());
  }
  for (const std::string& path : o.inputs) texts.push_back(ReadFileBytes(path));
  for (std::size_t i = 0; i < texts.size(); ++i) {
    std::string rendered = Preprocess(texts[i], format, o.budget, parse);
    if (mode) rendered = Obfuscate(rendered, *mode);
    if (i) out << '\n';
    out << rendered << '\n';
  }
  return kExitOk;
}

int CmdDataset(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<Sample> samples;
  std::string project = o.project;
  CampaignConfig config;
  if (!o.config_path.empty()) config = LoadConfig(o.config_path);
  if (project.empty()) project = config.project;
  if (!o.authentic.empty()) {
    std::vector<AuthenticReport> reports;
    for (const Json& j : ReadJsonl(o.authentic)) {
      reports.push_back(AuthenticReportFromJson(j));
    }
    samples = FilterAuthentic(reports);
  } else {
    const std::string path = o.records.empty() ? OutPath(o, "records.jsonl")
                                               : o.records;
    std::vector<CrashRecord> records;
    for (const Json& j : ReadJsonl(path)) records.push_back(CrashRecordFromJson(j));
    SampleOptions options;
    options.format = ResolveFormat(o.format);
    options.token_budget = o.budget;
    options.parse.section_marker = o.marker;
    std::size_t skipped = 0;
    samples = SamplesFromRecords(records, options, &skipped);
    if (skipped) err << skipped << " records without frames skipped\n";
  }
  auto mode = ParseDedupMode(o.dedup);
  if (!mode) throw Error(ErrorCode::kConfigError, "unknown dedup mode " + o.dedup);
  const std::size_t before = samples.size();
  // Duplicate statistics are only meaningful before deduplication.
  DatasetStats raw_stats;
  if (!samples.empty()) raw_stats = ComputeStats(samples);
  samples = Deduplicate(samples, *mode);
  samples = SplitSamples(std::move(samples), o.train_fraction,
                         o.seed.value_or(config.seed));
  DatasetStats stats = ComputeStats(samples);
  stats.avg_occurrence_per_trace = raw_stats.avg_occurrence_per_trace;
  stats.avg_occurrence_per_pair = raw_stats.avg_occurrence_per_pair;

  EnsureOutDir(o);
  const std::string dataset_path =
      o.dataset.empty() ? OutPath(o, "dataset.jsonl") : o.dataset;
  WriteSamples(dataset_path, samples);
  Json j = StatsToJson(stats);
  j["before_dedup"] = before;
  WriteFileBytes(OutPath(o, "stats.json"), j.dump(2) + "\n");
  if (project.empty()) project = samples.front().project;
  const std::string md = StatsMarkdown({{project, stats}});
  WriteFileBytes(OutPath(o, "stats.md"), md);
  out << md;
  return kExitOk;
}

std::string SafeFileName(const std::string& id) {
  std::string s;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '.';
    s += ok ? c : '_';
  }
  return s;
}

int CmdPrompts(const Options& o, std::ostream& out) {
  const std::string dataset_path =
      o.dataset.empty() ? OutPath(o, "dataset.jsonl") : o.dataset;
  const std::vector<Sample> samples = ReadSamples(dataset_path);
  const bool finetune = o.prompt_mode == "finetune";
  if (!finetune && o.prompt_mode != "zero-shot" &&
      o.prompt_mode != "zero-shot-fd") {
    throw Error(ErrorCode::kConfigError, "unknown prompt mode " + o.prompt_mode);
  }
  std::string split = o.split;
  if (split.empty()) split = finetune ? "train" : "val";
  std::vector<Sample> chosen;
  for (const Sample& s : samples) {
    if (split == "all" || (split == "train" && s.split == SplitName::kTrain) ||
        (split == "val" && s.split == SplitName::kVal)) {
      chosen.push_back(s);
    }
  }
  if (split != "all" && split != "train" && split != "val") {
    throw Error(ErrorCode::kConfigError, "unknown split " + split);
  }
  EnsureOutDir(o);
  if (finetune) {
    std::vector<Json> rows;
    for (const Sample& s : chosen) rows.push_back(FinetuneToJson(MakeFinetuneExample(s)));
    const std::string path = OutPath(o, "finetune.jsonl");
    WriteJsonl(path, rows);
    out << rows.size() << " fine-tuning examples written to " << path << '\n';
    return kExitOk;
  }

  auto language = ParseLanguage(o.language);
  if (!language) throw Error(ErrorCode::kConfigError, "unknown language " + o.language);
  std::string project = o.project;
  if (project.empty() && !o.config_path.empty()) {
    project = LoadConfig(o.config_path).project;
  }
  const std::string tmpl = o.template_path.empty()
                               ? DefaultZeroShotTemplate()
                               : ReadFileBytes(o.template_path);

  std::vector<SourceFile> files;
  if (o.prompt_mode == "zero-shot-fd") {
    for (const std::string& rel : o.sources) {
      const std::string full = (fs::path(o.sources_root) / rel).string();
      SourceFile f{rel, ReadFileBytes(full), {}};
      f.index = ParseSource(f.text, LanguageForPath(rel), rel);
      files.push_back(std::move(f));
    }
  }
  const fs::path dir = fs::path(o.out_dir) / "prompts";
  fs::create_directories(dir);
  std::size_t index = 0;
  for (const Sample& s : chosen) {
    // Without an explicit project name each sample names its own.
    const ProjectMeta meta =
        MetaFor(project.empty() ? s.project : project, *language);
    std::string prompt = ZeroShotPrompt(s, meta, tmpl);
    if (o.prompt_mode == "zero-shot-fd") {
      prompt = AugmentWithinBudget(
          prompt, CollectFunctionSources(s.trace, files, o.exclude), o.budget);
    }
    char prefix[16];
    std::snprintf(prefix, sizeof(prefix), "%05zu-", index++);
    WriteFileBytes((dir / (prefix + SafeFileName(s.id) + ".txt")).string(),
                   prompt);
  }
  out << chosen.size() << " prompts written to " << dir.string() << '\n';
  return kExitOk;
}

MatchMode ResolveMatchMode(const std::string& name) {
  auto m = ParseMatchMode(name);
  if (!m) throw Error(ErrorCode::kConfigError, "unknown match mode " + name);
  return *m;
}

std::vector<Prediction> ReadPredictions(const std::string& path) {
  std::vector<Prediction> out;
  for (const Json& j : ReadJsonl(path)) out.push_back(PredictionFromJson(j));
  return out;
}

int CmdEval(const Options& o, std::ostream& out) {
  const std::string dataset_path =
      o.dataset.empty() ? OutPath(o, "dataset.jsonl") : o.dataset;
  const std::vector<Sample> samples = ReadSamples(dataset_path);
  EvalOptions options;
  options.mode = ResolveMatchMode(o.match_mode);
  options.set_semantics = o.set_semantics;
  options.model_tag = o.tag;
  std::vector<Prediction> predictions;
  if (o.baseline == "innermost") {
    predictions = InnermostBaseline(samples, options.mode);
  } else if (o.baseline == "nn") {
    predictions = NnBaseline(samples, options.mode);
  } else if (!o.baseline.empty()) {
    throw Error(ErrorCode::kConfigError, "unknown baseline " + o.baseline);
  } else if (o.predictions.size() == 1) {
    predictions = ReadPredictions(o.predictions[0]);
  } else {
    throw Error(ErrorCode::kConfigError,
                "eval needs --baseline or exactly one --predictions file");
  }
  if (options.model_tag.empty()) {
    options.model_tag = !o.baseline.empty() ? o.baseline : "model";
    if (o.baseline.empty() && !predictions.empty() &&
        !predictions.front().model_tag.empty()) {
      options.model_tag = predictions.front().model_tag;
    }
  }
  const EvalReport report = Evaluate(samples, predictions, options);
  EnsureOutDir(o);
  WriteFileBytes(OutPath(o, "report.json"), ReportToJson(report).dump(2) + "\n");
  const std::string md = ReportMarkdown({report});
  WriteFileBytes(OutPath(o, "report.md"), md);
  out << md;
  return kExitOk;
}

int CmdReport(const Options& o, std::ostream& out) {
  const std::string dataset_path =
      o.dataset.empty() ? OutPath(o, "dataset.jsonl") : o.dataset;
  const std::vector<Sample> samples = ReadSamples(dataset_path);
  std::string project = o.project;
  if (project.empty() && !samples.empty()) project = samples.front().project;
  std::string md = "## Dataset\n\n" + StatsMarkdown({{project, ComputeStats(samples)}});

  EvalOptions options;
  options.mode = ResolveMatchMode(o.match_mode);
  options.set_semantics = o.set_semantics;
  std::vector<EvalReport> reports;
  if (o.baselines) {
    options.model_tag = "innermost";
    reports.push_back(
        Evaluate(samples, InnermostBaseline(samples, options.mode), options));
    bool has_train = std::any_of(samples.begin(), samples.end(), [](const Sample& s) {
      return s.split == SplitName::kTrain;
    });
    if (has_train) {
      options.model_tag = "nn";
      reports.push_back(
          Evaluate(samples, NnBaseline(samples, options.mode), options));
    }
  }
  for (const std::string& path : o.predictions) {
    const std::vector<Prediction> preds = ReadPredictions(path);
    options.model_tag = !preds.empty() && !preds.front().model_tag.empty()
                            ? preds.front().model_tag
                            : fs::path(path).stem().string();
    reports.push_back(Evaluate(samples, preds, options));
  }
  if (!reports.empty()) md += "\n## Accuracy\n\n" + ReportMarkdown(reports);
  EnsureOutDir(o);
  WriteFileBytes(OutPath(o, "summary.md"), md);
  out << md;
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  Options o;
  CLI::App app{"Mutation-driven crash datasets and fault-localization scoring",
               "crashloc"};
  app.require_subcommand(1);
  app.add_option("--config", o.config_path, "Campaign config file");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--jobs", o.jobs, "Parallel workspace clones (campaign)");
  app.add_option("--out", o.out_dir, "Output directory")->capture_default_str();
  app.add_flag("-v,--verbose", o.verbose, "Progress on stderr");

  const std::vector<std::string> kind_names = [] {
    std::vector<std::string> v;
    for (MutatorKind k : kAllMutatorKinds) v.emplace_back(MutatorName(k));
    return v;
  }();

  auto* enumerate = app.add_subcommand("enumerate", "Enumerate sites and plan mutations");
  enumerate->add_option("--workspace", o.workspace, "Source tree root");
  enumerate->add_option("--coverage", o.coverage, "Coverage TSV");
  enumerate->add_option("--kinds", o.kinds, "Mutators to use")
      ->delimiter(',')
      ->check(CLI::IsMember(kind_names));
  enumerate->add_option("--max-mutations", o.max_mutations, "Plan size cap");
  enumerate->add_option("--plan", o.plan, "Plan output (default OUT/plan.jsonl)");

  auto* campaign = app.add_subcommand("campaign", "Run the mutate/build/test loop");
  campaign->add_option("--plan", o.plan, "Plan input (default OUT/plan.jsonl)");
  campaign->add_option("--limit", o.limit, "Stop after this many steps");
  campaign->add_option("--workspace", o.workspace, "Source tree root");

  auto* preprocess = app.add_subcommand("preprocess", "Render raw debugger traces");
  preprocess->add_option("inputs", o.inputs, "Trace files (stdin if none)");
  preprocess->add_option("--format", o.format, "gdb, dump or generic")
      ->capture_default_str();
  preprocess->add_option("--budget", o.budget, "Token budget")->capture_default_str();
  preprocess->add_option("--marker", o.marker, "Stack section marker for dumps");
  preprocess->add_option("--obfuscate", o.obfuscate, "per-line or per-term");

  auto* dataset = app.add_subcommand("dataset", "Build, deduplicate and split samples");
  dataset->add_option("--records", o.records, "Crash records (default OUT/records.jsonl)");
  dataset->add_option("--authentic", o.authentic, "Authentic crash reports JSONL");
  dataset->add_option("--dedup", o.dedup, "pair or trace")->capture_default_str();
  dataset->add_option("--train-fraction", o.train_fraction)->capture_default_str();
  dataset->add_option("--format", o.format, "Raw trace format")->capture_default_str();
  dataset->add_option("--budget", o.budget, "Token budget")->capture_default_str();
  dataset->add_option("--marker", o.marker, "Stack section marker for dumps");
  dataset->add_option("--project", o.project, "Project name");
  dataset->add_option("--dataset", o.dataset, "Output (default OUT/dataset.jsonl)");

  auto* prompts = app.add_subcommand("prompts", "Emit fine-tuning examples or prompts");
  prompts->add_option("--dataset", o.dataset, "Dataset (default OUT/dataset.jsonl)");
  prompts->add_option("--mode", o.prompt_mode, "finetune, zero-shot or zero-shot-fd")
      ->capture_default_str();
  prompts->add_option("--template", o.template_path, "Zero-shot template override");
  prompts->add_option("--project", o.project, "Project name");
  prompts->add_option("--language", o.language, "c or cpp")->capture_default_str();
  prompts->add_option("--split", o.split, "train, val or all");
  prompts->add_option("--sources-root", o.sources_root, "Root of --sources");
  prompts->add_option("--sources", o.sources, "Files searched for definitions");
  prompts->add_option("--exclude", o.exclude, "Regex of functions/files to skip");
  prompts->add_option("--budget", o.budget, "Token budget")->capture_default_str();

  auto* eval = app.add_subcommand("eval", "Score predictions or a baseline");
  eval->add_option("--dataset", o.dataset, "Dataset (default OUT/dataset.jsonl)");
  eval->add_option("--predictions", o.predictions, "Predictions JSONL");
  eval->add_option("--baseline", o.baseline, "innermost or nn");
  eval->add_option("--mode", o.match_mode, "file-function, function or authentic")
      ->capture_default_str();
  eval->add_flag("--set-semantics", o.set_semantics, "Set intersection for AP");
  eval->add_option("--tag", o.tag, "Model name in the report");

  auto* report = app.add_subcommand("report", "Dataset and accuracy tables");
  report->add_option("--dataset", o.dataset, "Dataset (default OUT/dataset.jsonl)");
  report->add_option("--predictions", o.predictions, "Predictions JSONL files");
  report->add_flag("--baselines", o.baselines, "Include both baselines");
  report->add_option("--mode", o.match_mode, "file-function, function or authentic")
      ->capture_default_str();
  report->add_flag("--set-semantics", o.set_semantics, "Set intersection for AP");
  report->add_option("--project", o.project, "Project name");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
  }

  try {
    if (enumerate->parsed()) return CmdEnumerate(o, out);
    if (campaign->parsed()) return CmdCampaign(o, out, err);
    if (preprocess->parsed()) return CmdPreprocess(o, out);
    if (dataset->parsed()) return CmdDataset(o, out, err);
    if (prompts->parsed()) return CmdPrompts(o, out);
    if (eval->parsed()) return CmdEval(o, out);
    if (report->parsed()) return CmdReport(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.IsHygieneFatal() ? kExitHygiene : kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace crashloc
