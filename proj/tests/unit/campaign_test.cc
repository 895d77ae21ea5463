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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "crashloc/error.h"
#include "crashloc/process.h"
#include "crashloc/syntax.h"
#include "test_util.h"

namespace crashloc {
namespace {

namespace fs = std::filesystem;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no crashloc::Error thrown";
  return ErrorCode::kIoError;
}

TEST(CoverageTest, ParsesRowsAndDropsUncovered) {
  const auto rows = LoadCoverage(
      "# file\tfunction\thits\n"
      "src/a.c\tf\t3\n"
      "\n"
      "src/a.c\tg\t0\n"
      "src/b.cc\tNs::h\t12\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].file, "src/a.c");
  EXPECT_EQ(rows[0].function, "f");
  EXPECT_EQ(rows[0].coverage_hits, 3u);
  EXPECT_EQ(rows[1].function, "Ns::h");
}

TEST(CoverageTest, MalformedRows) {
  EXPECT_EQ(CodeOf([] { LoadCoverage("src/a.c\tf\n"); }),
            ErrorCode::kMalformedRow);
  EXPECT_EQ(CodeOf([] { LoadCoverage("src/a.c\tf\t-1\n"); }),
            ErrorCode::kMalformedRow);
  EXPECT_EQ(CodeOf([] { LoadCoverage("src/a.c\tf\tmany\n"); }),
            ErrorCode::kMalformedRow);
  try {
    LoadCoverage("a.c\tf\t1\nbroken\n");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(ConfigTest, ParsesToyConfig) {
  const std::string dir = testing::SourceDir() + "/toy";
  const CampaignConfig c = LoadConfig(dir + "/campaign.toml");
  EXPECT_EQ(c.project, "toy");
  EXPECT_EQ(fs::weakly_canonical(c.workspace), fs::weakly_canonical(dir));
  EXPECT_EQ(c.sources, (std::vector<std::string>{"src/arena.c", "src/store.c"}));
  EXPECT_EQ(c.test_command, std::vector<std::string>{"./out/toy_test"});
  EXPECT_EQ(c.max_mutations, 200u);
  EXPECT_EQ(c.seed, kDefaultSeed);
  EXPECT_EQ(c.mutator_kinds, AllMutators());
  EXPECT_DOUBLE_EQ(c.threshold_multiplier, 3.0);
  EXPECT_EQ(c.debugger_command.back(), "{TEST}");
  EXPECT_NO_THROW(ValidateConfig(c));
  const std::vector<std::string> argv = DebuggerArgv(c);
  EXPECT_EQ(argv.front(), "gdb");
  EXPECT_EQ(argv.back(), "./out/toy_test");
}

TEST(ConfigTest, Errors) {
  EXPECT_EQ(CodeOf([] { ParseConfig("bogus = 1\n"); }), ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([] { ParseConfig("max_mutations = \"x\"\n"); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([] { ParseConfig("mutator_kinds = [\"Nope\"]\n"); }),
            ErrorCode::kConfigError);
  CampaignConfig c = ParseConfig("build_command = [\"true\"]\n"
                                 "test_command = [\"true\"]\n"
                                 "debugger_command = [\"gdb\"]\n",
                                 testing::MakeTempDir("cfg"));
  c.workspace = testing::MakeTempDir("cfg-ws");
  EXPECT_EQ(CodeOf([&] { ValidateConfig(c); }), ErrorCode::kConfigError);
}

// A one-file workspace with shell build/test commands.
struct Sandbox {
  std::string dir;
  CampaignConfig config;
  std::string source;
};

Sandbox MakeSandbox(const std::string& test_script) {
  Sandbox s;
  s.dir = testing::MakeTempDir("ws");
  fs::create_directories(fs::path(s.dir) / "src");
  s.source =
      "int f(int x) {\n"
      "  int y = x + 1;\n"
      "  return y - 1;\n"
      "}\n";
  WriteFileBytes(s.dir + "/src/a.c", s.source);
  WriteFileBytes(s.dir + "/test.sh", test_script);
  WriteFileBytes(s.dir + "/build.sh",
                 "#!/bin/sh\n"
                 "grep -q 'x / 1' src/a.c && exit 1\n"
                 "grep -q 'y %' src/a.c && sleep 30\n"
                 "exit 0\n");
  fs::permissions(s.dir + "/test.sh", fs::perms::owner_all);
  fs::permissions(s.dir + "/build.sh", fs::perms::owner_all);
  s.config.workspace = s.dir;
  s.config.project = "sandbox";
  s.config.sources = {"src/a.c"};
  s.config.build_command = {"./build.sh"};
  s.config.test_command = {"./test.sh"};
  s.config.build_threshold_secs = 1.0;
  s.config.test_threshold_secs = 1.0;
  return s;
}

const char* kTestScript =
    "#!/bin/sh\n"
    "grep -q 'x - 1' src/a.c && { echo '#0  f (x=1) at src/a.c:2'; "
    "kill -SEGV $$; }\n"
    "grep -q 'y \\* 1' src/a.c && sleep 30\n"
    "grep -q 'y + 1' src/a.c && exit 3\n"
    "exit 0\n";

Mutation MutationAt(const Sandbox& s, MutatorKind kind, const std::string& orig,
                    const std::string& replacement, std::size_t nth = 0) {
  const SyntaxIndex index = ParseSource(s.source, Language::kC, "src/a.c");
  std::size_t seen = 0;
  for (const MutationSite& site : EnumerateSites(index, s.source, {kind})) {
    if (site.original != orig || seen++ != nth) continue;
    Mutation m;
    m.id = std::string(MutatorName(kind)) + ":" + orig + "->" + replacement;
    m.site = site;
    m.replacement = replacement;
    return m;
  }
  ADD_FAILURE() << "no site " << orig;
  return {};
}

TEST(ExecuteStepTest, ClassifiesEveryOutcome) {
  Sandbox s = MakeSandbox(kTestScript);
  const Thresholds th{1.0, 1.0};
  struct Case {
    MutatorKind kind;
    std::string orig, repl;
    OutcomeVariant want;
  };
  const std::vector<Case> cases = {
      {MutatorKind::kArithmetic, "+", "-", OutcomeVariant::kCrash},
      {MutatorKind::kArithmetic, "+", "/", OutcomeVariant::kBuildFailure},
      {MutatorKind::kArithmetic, "-", "*", OutcomeVariant::kTimeout},
      {MutatorKind::kArithmetic, "-", "+", OutcomeVariant::kTestsPassed},
      {MutatorKind::kArithmetic, "-", "%", OutcomeVariant::kTimeout},
  };
  for (const Case& c : cases) {
    const Mutation m = MutationAt(s, c.kind, c.orig, c.repl);
    const ExecutionOutcome out = ExecuteStep(s.dir, m, s.source, s.config, th);
    EXPECT_EQ(out.variant, c.want) << m.id;
    EXPECT_EQ(ReadFileBytes(s.dir + "/src/a.c"), s.source) << m.id;
    if (c.want == OutcomeVariant::kCrash) {
      EXPECT_EQ(out.signal, "SIGSEGV");
      EXPECT_NE(out.raw_trace.find("#0  f"), std::string::npos);
    }
    if (c.repl == "*") EXPECT_EQ(out.timed_out_phase, Phase::kTest);
    if (c.repl == "%") EXPECT_EQ(out.timed_out_phase, Phase::kBuild);
    if (c.repl == "+") EXPECT_EQ(out.test_exit_code, 3);
  }
}

TEST(ExecuteStepTest, NonCrashSignalIsNotACrash) {
  Sandbox s = MakeSandbox(
      "#!/bin/sh\ngrep -q 'x - 1' src/a.c && kill -TERM $$\nexit 0\n");
  const Mutation m = MutationAt(s, MutatorKind::kArithmetic, "+", "-");
  const ExecutionOutcome out =
      ExecuteStep(s.dir, m, s.source, s.config, Thresholds{5, 5});
  EXPECT_EQ(out.variant, OutcomeVariant::kTestsPassed);
}

TEST(ExecuteStepTest, DirtyWorkspaceIsRefused) {
  Sandbox s = MakeSandbox(kTestScript);
  const Mutation m = MutationAt(s, MutatorKind::kArithmetic, "+", "-");
  WriteFileBytes(s.dir + "/src/a.c", s.source + "// edit\n");
  EXPECT_EQ(CodeOf([&] {
              ExecuteStep(s.dir, m, s.source, s.config, Thresholds{5, 5});
            }),
            ErrorCode::kWorkspaceDirty);
}

TEST(ExecuteStepTest, RevertFailsWhenBuildRewritesSource) {
  Sandbox s = MakeSandbox(kTestScript);
  WriteFileBytes(s.dir + "/build.sh",
                 "#!/bin/sh\necho 'int z;' > src/a.c\nexit 0\n");
  const Mutation m = MutationAt(s, MutatorKind::kArithmetic, "+", "-");
  try {
    ExecuteStep(s.dir, m, s.source, s.config, Thresholds{5, 5});
    FAIL() << "expected RevertFailed";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRevertFailed);
    EXPECT_TRUE(e.IsHygieneFatal());
  }
}

TEST(CalibrateTest, MultiplierAndFloor) {
  Sandbox s = MakeSandbox("#!/bin/sh\nsleep 0.2\nexit 0\n");
  s.config.build_threshold_secs = 0;
  s.config.test_threshold_secs = 0;
  s.config.threshold_multiplier = 10.0;
  Thresholds t = CalibrateThresholds(s.config);
  EXPECT_GE(t.test_secs, 2.0);
  EXPECT_LT(t.test_secs, 20.0);
  s.config.threshold_floor_secs = 60.0;
  t = CalibrateThresholds(s.config);
  EXPECT_DOUBLE_EQ(t.build_secs, 60.0);
  EXPECT_DOUBLE_EQ(t.test_secs, 60.0);
  s.config.test_threshold_secs = 7.5;
  EXPECT_DOUBLE_EQ(CalibrateThresholds(s.config).test_secs, 7.5);
}

TEST(CalibrateTest, FailingBaseline) {
  Sandbox s = MakeSandbox("#!/bin/sh\nexit 1\n");
  EXPECT_EQ(CodeOf([&] { CalibrateThresholds(s.config); }),
            ErrorCode::kBaselineFailed);
  s = MakeSandbox("#!/bin/sh\nkill -SEGV $$\n");
  EXPECT_EQ(CodeOf([&] { CalibrateThresholds(s.config); }),
            ErrorCode::kBaselineFailed);
}

TEST(ProcessTest, TimeoutKillsTheProcessGroup) {
  const std::string dir = testing::MakeTempDir("proc");
  const ProcessResult r =
      RunProcess({"sh", "-c", "sleep 30 & sleep 30; echo done"}, dir, 0.5);
  EXPECT_TRUE(r.timed_out);
  EXPECT_LT(r.elapsed_secs, 5.0);
  const ProcessResult ok = RunProcess({"sh", "-c", "echo hi; echo err >&2"}, dir, 5);
  EXPECT_EQ(ok.exit_code, 0);
  EXPECT_EQ(ok.output, "hi\nerr\n");
  EXPECT_EQ(SignalName(11), "SIGSEGV");
}

class PlanTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const std::string toy = testing::SourceDir() + "/toy";
    config_ = LoadConfig(toy + "/campaign.toml");
    targets_ = LoadCoverage(ReadFileBytes(config_.coverage));
    sites_ = EnumerateFiles(config_.workspace, config_.sources,
                            config_.mutator_kinds);
  }
  CampaignConfig config_;
  std::vector<TargetSpec> targets_;
  std::vector<MutationSite> sites_;
};

TEST_F(PlanTest, KeepsOnlyCoveredFunctionsAndIsDeterministic) {
  const std::vector<Mutation> a = Plan(sites_, targets_, config_);
  const std::vector<Mutation> b = Plan(sites_, targets_, config_);
  ASSERT_EQ(a.size(), std::min<std::size_t>(config_.max_mutations, sites_.size()));
  std::set<std::pair<std::string, std::string>> covered;
  for (const TargetSpec& t : targets_) covered.insert({t.file, t.function});
  std::set<std::string> ids;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    EXPECT_EQ(a[i].replacement, b[i].replacement);
    EXPECT_TRUE(covered.count({a[i].site.enclosing_file,
                               a[i].site.enclosing_function}))
        << a[i].id;
    EXPECT_TRUE(ids.insert(a[i].id).second);
  }
  CampaignConfig other = config_;
  other.seed = config_.seed + 1;
  const std::vector<Mutation> c = Plan(sites_, targets_, other);
  bool differs = false;
  for (std::size_t i = 0; i < std::min(a.size(), c.size()); ++i) {
    differs |= a[i].site.span.offset != c[i].site.span.offset;
  }
  EXPECT_TRUE(differs);
}

TEST_F(PlanTest, EmptyPlanWhenNothingCovered) {
  const std::vector<TargetSpec> none = {{"src/arena.c", "no_such_fn", 1}};
  EXPECT_EQ(CodeOf([&] { Plan(sites_, none, config_); }), ErrorCode::kEmptyPlan);
}

TEST_F(PlanTest, MutationJsonRoundTrip) {
  for (const Mutation& m : Plan(sites_, targets_, config_)) {
    const Mutation back = MutationFromJson(MutationToJson(m));
    EXPECT_EQ(back.id, m.id);
    EXPECT_EQ(back.site.span, m.site.span);
    EXPECT_EQ(back.site.kind, m.site.kind);
    EXPECT_EQ(back.site.original, m.site.original);
    EXPECT_EQ(back.replacement, m.replacement);
    EXPECT_EQ(back.swap, m.swap);
    EXPECT_EQ(back.site.enclosing_function, m.site.enclosing_function);
  }
}

class RunCampaignTest : public ::testing::Test {
 protected:
  void SetUp() override {
    box_ = MakeSandbox(kTestScript);
    const SyntaxIndex index = ParseSource(box_.source, Language::kC, "src/a.c");
    std::size_t n = 0;
    for (const MutationSite& site :
         EnumerateSites(index, box_.source, AllMutators())) {
      if (!IsSetBased(site.kind)) continue;
      for (const std::string& c : site.candidates) {
        // Skip the slow outcomes.
        if (c == "*" || c == "%") continue;
        Mutation m;
        m.id = "m" + std::to_string(n++);
        m.site = site;
        m.replacement = c;
        plan_.push_back(m);
      }
    }
    out_ = testing::MakeTempDir("run");
    paths_ = {out_ + "/records.jsonl", out_ + "/journal.tsv", out_ + "/clones"};
  }
  Sandbox box_;
  std::vector<Mutation> plan_;
  std::string out_;
  CampaignPaths paths_;
};

TEST_F(RunCampaignTest, ResumeRunsOnlyTheRemainder) {
  ASSERT_GE(plan_.size(), 6u);
  const Thresholds th{5, 5};
  const std::size_t k = 4;
  RunOptions first;
  first.step_limit = k;
  CampaignSummary s1 = RunCampaign(box_.config, th, plan_, paths_, nullptr, first);
  EXPECT_EQ(s1.executed, k);
  EXPECT_EQ(ReadJournal(paths_.journal).size(), k);
  std::vector<CrashRecord> records;
  CampaignSummary s2 = RunCampaign(box_.config, th, plan_, paths_, &records);
  EXPECT_EQ(s2.executed, plan_.size() - k);
  EXPECT_EQ(s2.resumed, k);
  EXPECT_EQ(ReadJournal(paths_.journal).size(), plan_.size());
  EXPECT_EQ(ReadFileBytes(box_.dir + "/src/a.c"), box_.source);
  // Exactly one crashing mutant: `+` -> `-`.
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].outcome.signal, "SIGSEGV");
  EXPECT_EQ(records[0].mutation.site.enclosing_function, "f");
  EXPECT_EQ(ReadJsonl(paths_.records).size(), 1u);
  // A third run has nothing left.
  CampaignSummary s3 = RunCampaign(box_.config, th, plan_, paths_, nullptr);
  EXPECT_EQ(s3.executed, 0u);
  EXPECT_EQ(s3.resumed, plan_.size());
}

TEST_F(RunCampaignTest, ParallelMatchesSequential) {
  const Thresholds th{5, 5};
  CampaignConfig par = box_.config;
  par.jobs = 3;
  std::vector<CrashRecord> records;
  CampaignSummary s = RunCampaign(par, th, plan_, paths_, &records);
  EXPECT_EQ(s.executed, plan_.size());
  EXPECT_EQ(records.size(), 1u);
  EXPECT_EQ(ReadFileBytes(box_.dir + "/src/a.c"), box_.source);
}

TEST_F(RunCampaignTest, EmptyPlanRunsNothing) {
  CampaignSummary s = RunCampaign(box_.config, {5, 5}, {}, paths_, nullptr);
  EXPECT_EQ(s.planned, 0u);
  EXPECT_EQ(s.executed, 0u);
}

TEST_F(RunCampaignTest, CorruptJournal) {
  WriteFileBytes(paths_.journal, "m0\tCrash\nm1 BuildFailure\n");
  try {
    RunCampaign(box_.config, {5, 5}, plan_, paths_, nullptr);
    FAIL() << "expected JournalCorrupt";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kJournalCorrupt);
    EXPECT_NE(std::string(e.what()).find("journal.tsv:2:"), std::string::npos);
  }
}

}  // namespace
}  // namespace crashloc
