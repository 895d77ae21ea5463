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

#include <gtest/gtest.h>

#include <filesystem>
#include <regex>
#include <sstream>

#include "crashloc/error.h"
#include "crashloc/syntax.h"
#include "test_util.h"

namespace crashloc {
namespace {

namespace fs = std::filesystem;

TraceFormat FormatForFixture(const std::string& name) {
  if (name.find("hana") != std::string::npos) return TraceFormat::kHanaDump;
  if (name.find("generic") != std::string::npos) return TraceFormat::kGeneric;
  return TraceFormat::kGdbTopFirst;
}

std::vector<fs::path> Fixtures() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(testing::TestData("traces"))) {
    if (e.path().extension() == ".txt") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

TEST(StacktraceTest, FixtureCorpusIsLargeEnough) {
  EXPECT_GE(Fixtures().size(), 10u);
}

TEST(StacktraceTest, GoldenOutputs) {
  for (const fs::path& p : Fixtures()) {
    const std::string raw = ReadFileBytes(p.string());
    fs::path golden = p;
    golden.replace_extension(".golden");
    const std::string want = ReadFileBytes(golden.string());
    const std::string got =
        Preprocess(raw, FormatForFixture(p.filename().string()));
    EXPECT_EQ(got + "\n", want) << p.filename();
  }
}

TEST(StacktraceTest, OutputsAreFreeOfDynamicTokens) {
  const std::regex hex(R"(0x[0-9a-fA-F]+)");
  const std::regex lwp(R"(LWP \d)");
  const std::regex thread_id(R"(Thread \d)");
  const std::regex iso_time(R"(\d{4}-\d{2}-\d{2}[ T]\d{2}:\d{2})");
  const std::regex clock(R"(\b\d{2}:\d{2}:\d{2})");
  const std::regex reg(R"(\b(rip|rsp|rax|rbx)=)");
  for (const fs::path& p : Fixtures()) {
    const std::string out = Preprocess(ReadFileBytes(p.string()),
                                       FormatForFixture(p.filename().string()));
    for (const std::regex* re : {&hex, &lwp, &thread_id, &iso_time, &clock,
                                 &reg}) {
      EXPECT_FALSE(std::regex_search(out, *re)) << p.filename() << "\n" << out;
    }
  }
}

TEST(StacktraceTest, PreprocessIsIdempotent) {
  for (const fs::path& p : Fixtures()) {
    const std::string once = Preprocess(ReadFileBytes(p.string()),
                                        FormatForFixture(p.filename().string()));
    EXPECT_EQ(Preprocess(once, TraceFormat::kGdbTopFirst), once)
        << p.filename();
  }
}

TEST(StacktraceTest, SqliteFramesParsed) {
  const std::string raw = ReadFileBytes(
      (fs::path(testing::TestData("traces")) / "01_sqlite_gdb.txt").string());
  const PreprocessedTrace t = ParseTrace(raw, TraceFormat::kGdbTopFirst);
  ASSERT_EQ(t.frames.size(), 7u);
  EXPECT_EQ(t.frames[0].function, "sqlite3VdbeMemRelease");
  EXPECT_EQ(t.frames[0].file, "src/vdbemem.c");
  EXPECT_EQ(t.frames[0].line, 514u);
  EXPECT_EQ(t.frames[6].function, "main");
  ASSERT_TRUE(t.signal_line.has_value());
  EXPECT_EQ(*t.signal_line, "Program received signal SIGSEGV, Segmentation fault.");
}

TEST(StacktraceTest, DumpIsReorderedMostRecentFirst) {
  const std::string raw = ReadFileBytes(
      (fs::path(testing::TestData("traces")) / "03_hana_dump.txt").string());
  PreprocessedTrace t = ParseTrace(raw, TraceFormat::kHanaDump);
  EXPECT_EQ(t.order, FrameOrder::kOutermostFirst);
  ASSERT_EQ(t.frames.size(), 5u);
  t = NormalizeOrder(std::move(t));
  EXPECT_EQ(t.frames[0].function, "TRexPlanOp::fetch");
  EXPECT_EQ(t.frames[0].index, 0u);
  EXPECT_EQ(t.frames[4].function, "Execution::ContextFunctor::operator()");
  // Normalizing twice changes nothing.
  const PreprocessedTrace again = NormalizeOrder(t);
  EXPECT_EQ(again.frames[0].function, t.frames[0].function);
}

TEST(StacktraceTest, NoFramesFound) {
  try {
    ParseTrace("hello\nworld\n", TraceFormat::kGdbTopFirst);
    FAIL() << "expected NoFramesFound";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoFramesFound);
  }
  EXPECT_THROW(ParseTrace("", TraceFormat::kHanaDump), Error);
}

TEST(StacktraceTest, StripDynamicTextRules) {
  EXPECT_EQ(StripDynamicText("#3  0x00007ffff7842476 in raise (sig=6) at r.c:26"),
            "#3  in raise (sig) at r.c:26");
  EXPECT_FALSE(StripDynamicText("[New Thread 0x7ffff3fff640 (LWP 41822)]"));
  EXPECT_FALSE(StripDynamicText("[Switching to Thread 0x7f (LWP 2)]"));
  EXPECT_FALSE(StripDynamicText("[Inferior 1 (process 8999) exited normally]"));
  EXPECT_EQ(StripDynamicText("pid 4711 tid 4712 fatal"), "pid tid fatal");
}

TEST(StacktraceTest, BudgetTooSmall) {
  PreprocessedTrace t = ParseTrace("#0  f () at a.c:1\n", TraceFormat::kGdbTopFirst);
  try {
    Render(t, kMinTokenBudget - 1);
    FAIL() << "expected BudgetTooSmall";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetTooSmall);
  }
  EXPECT_NO_THROW(Render(t, kMinTokenBudget));
}

TEST(StacktraceTest, TruncationKeepsInnermostFrames) {
  std::ostringstream raw;
  raw << "Program received signal SIGSEGV, Segmentation fault.\n";
  for (int i = 0; i < 300; ++i) {
    raw << "#" << i << "  0x0000000000401000 in level_" << i
        << " (depth=" << i << ") at src/deep.c:" << (i + 10) << "\n";
  }
  const std::size_t budget = 256;
  const std::string out = Preprocess(raw.str(), TraceFormat::kGdbTopFirst, budget);
  const TokenCounter counter;
  EXPECT_LE(counter.Count(out), budget);
  const std::vector<Frame> frames = RenderedFrames(out);
  ASSERT_FALSE(frames.empty());
  ASSERT_LT(frames.size(), 300u);
  // Rendered frames are the innermost, contiguous prefix.
  for (std::size_t i = 0; i < frames.size(); ++i) {
    EXPECT_EQ(frames[i].function, "level_" + std::to_string(i));
  }
  // Adding the next frame back would overflow the budget.
  PreprocessedTrace full = StripDynamic(
      NormalizeOrder(ParseTrace(raw.str(), TraceFormat::kGdbTopFirst)));
  std::string extended;
  for (std::size_t i = 0; i <= frames.size(); ++i) {
    extended += RenderFrame(full.frames[i]) + "\n";
  }
  extended += *full.signal_line;
  EXPECT_GT(counter.Count(extended), budget);
  // The signal line survives truncation.
  EXPECT_NE(out.find("Program received signal SIGSEGV"), std::string::npos);
}

TEST(StacktraceTest, InnermostFrameKeptEvenOverBudget) {
  std::string name = "f";
  for (int i = 0; i < 40; ++i) name = "n" + std::to_string(i) + "::" + name;
  const std::string raw = "#0  " + name + " () at a.c:1\n#1  main () at m.c:2\n";
  const std::string out = Preprocess(raw, TraceFormat::kGdbTopFirst, 32);
  const std::vector<Frame> frames = RenderedFrames(out);
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(frames[0].function, name);
}

TEST(StacktraceTest, TokenCounter) {
  const TokenCounter words;
  EXPECT_EQ(words.Count(""), 0u);
  EXPECT_EQ(words.Count("abc def"), 2u);
  EXPECT_EQ(words.Count("#0  in f at a.c:12"), 10u);
  const TokenCounter chars{4.0};
  EXPECT_EQ(chars.Count("abcdefgh"), 2u);
  EXPECT_EQ(chars.Count("abcdefghi"), 3u);
}

TEST(StacktraceTest, Sha256KnownDigests) {
  EXPECT_EQ(Sha256Hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(StacktraceTest, ObfuscatePerLineAndPerTerm) {
  const std::string rendered = "#0  in f at a.c:1\nProgram received signal";
  const std::string per_line = Obfuscate(rendered, ObfuscationMode::kPerLine);
  EXPECT_EQ(per_line, Sha256Hex("#0  in f at a.c:1") + "\n" +
                          Sha256Hex("Program received signal"));
  const std::string per_term = Obfuscate(rendered, ObfuscationMode::kPerTerm);
  const std::regex digest(R"([0-9a-f]{64})");
  const auto n = std::distance(
      std::sregex_iterator(per_term.begin(), per_term.end(), digest),
      std::sregex_iterator());
  EXPECT_EQ(n, 8);  // 5 terms on the first line, 3 on the second.
  EXPECT_EQ(per_term.substr(64, 2), "  ");
  // Obfuscating twice is not the same as once.
  EXPECT_NE(Obfuscate(per_line, ObfuscationMode::kPerLine), per_line);
  EXPECT_EQ(Obfuscate(rendered, ObfuscationMode::kPerLine), per_line);
}

TEST(StacktraceTest, RenderedFramesAndUnqualifiedName) {
  const std::vector<Frame> frames =
      RenderedFrames("#0  in a::b at x.c:1\n#1  in main\nProgram received");
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[0].function, "a::b");
  EXPECT_EQ(frames[0].file, "x.c");
  EXPECT_FALSE(frames[1].file.has_value());
  EXPECT_EQ(UnqualifiedName("A::B::run(int)"), "run");
  EXPECT_EQ(UnqualifiedName("sqlite3_malloc"), "sqlite3_malloc");
  EXPECT_EQ(UnqualifiedName("ns::Table<a::b>::get"), "get");
}

}  // namespace
}  // namespace crashloc
