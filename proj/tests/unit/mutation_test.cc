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

#include "crashloc/mutation.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "crashloc/error.h"
#include "test_util.h"

namespace crashloc {
namespace {

std::vector<MutationSite> Sites(const std::string& src, MutatorSet kinds,
                                Language lang = Language::kC) {
  const SyntaxIndex index = ParseSource(src, lang, "t.c");
  return EnumerateSites(index, src, kinds);
}

Mutation Make(const MutationSite& site, std::size_t choice = 0) {
  Mutation m;
  m.id = "test";
  m.site = site;
  if (site.kind == MutatorKind::kLineOrder) {
    m.swap = site.swap_partners.at(choice);
    m.replacement = m.swap->partner_text;
  } else if (site.kind != MutatorKind::kDelete) {
    m.replacement = site.candidates.at(choice);
  }
  return m;
}

const MutationSite* Find(const std::vector<MutationSite>& sites,
                         MutatorKind kind, const std::string& original) {
  for (const MutationSite& s : sites) {
    if (s.kind == kind && s.original == original) return &s;
  }
  return nullptr;
}

TEST(MutationTest, ReplacementSetsMatchTable) {
  using V = std::vector<std::string>;
  EXPECT_EQ(ReplacementSet(MutatorKind::kAssignment),
            (V{"=", "+=", "-=", "*=", "/=", "%="}));
  EXPECT_EQ(ReplacementSet(MutatorKind::kNumber),
            (V{"+255", "+1", "-1", "-255", "*(-1)"}));
  EXPECT_EQ(ReplacementSet(MutatorKind::kBooleanAssignment),
            (V{"=", "&=", "|=", "^="}));
  EXPECT_EQ(ReplacementSet(MutatorKind::kComparison),
            (V{"==", "!=", "<", ">", "<=", ">="}));
  EXPECT_EQ(ReplacementSet(MutatorKind::kArithmetic),
            (V{"+", "-", "*", "/", "%"}));
  EXPECT_EQ(ReplacementSet(MutatorKind::kIncrementDecrement), (V{"++", "--"}));
  EXPECT_EQ(ReplacementSet(MutatorKind::kBooleanArithmetic),
            (V{"&", "|", "^", "<<", ">>"}));
  EXPECT_EQ(ReplacementSet(MutatorKind::kLogical),
            (V{"&&", "and", "||", "or", "!=", "not"}));
  EXPECT_TRUE(ReplacementSet(MutatorKind::kLineOrder).empty());
  EXPECT_TRUE(ReplacementSet(MutatorKind::kDelete).empty());
  EXPECT_TRUE(ReplacementSet(MutatorKind::kSymbol).empty());
}

TEST(MutationTest, NamesRoundTrip) {
  for (MutatorKind k : kAllMutatorKinds) {
    EXPECT_EQ(ParseMutatorKind(MutatorName(k)), k);
  }
  EXPECT_FALSE(ParseMutatorKind("Bogus").has_value());
}

TEST(MutationTest, SimpleFunctionSites) {
  const std::string src = "int f(){int a=1; return a+2;}";
  const auto sites = Sites(src, AllMutators());
  std::set<std::size_t> offsets;
  for (const MutationSite& s : sites) offsets.insert(s.span.offset);
  EXPECT_EQ(offsets, (std::set<std::size_t>{src.find('='), src.find('1'),
                                            src.find('+'), src.find('2')}));
  ASSERT_NE(Find(sites, MutatorKind::kAssignment, "="), nullptr);
  ASSERT_NE(Find(sites, MutatorKind::kNumber, "1"), nullptr);
  ASSERT_NE(Find(sites, MutatorKind::kArithmetic, "+"), nullptr);
  ASSERT_NE(Find(sites, MutatorKind::kNumber, "2"), nullptr);
}

TEST(MutationTest, EmptyFileHasNoSites) {
  EXPECT_TRUE(Sites("", AllMutators()).empty());
}

TEST(MutationTest, ErrorRegionYieldsNoSites) {
  const std::string src =
      "int f(int a) {\n  return a + 1;\n}\n"
      "int g(int b) {\n  return b * ;\n}\n";
  const auto sites = Sites(src, AllMutators());
  // Hand enumeration of f: `+` (Arithmetic), `1` (Number). Symbol needs a
  // second identifier and the single statement line has no swap partner.
  std::vector<std::pair<MutatorKind, std::string>> got;
  for (const MutationSite& s : sites) {
    EXPECT_EQ(s.enclosing_function, "f");
    got.emplace_back(s.kind, s.original);
  }
  EXPECT_EQ(got, (std::vector<std::pair<MutatorKind, std::string>>{
                     {MutatorKind::kDelete, "  return a + 1;"},
                     {MutatorKind::kArithmetic, "+"},
                     {MutatorKind::kNumber, "1"}}));
}

TEST(MutationTest, ComparisonCandidates) {
  const std::string src = "int f(int a, int b) { return a == b; }";
  const auto sites = Sites(src, {MutatorKind::kComparison});
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].original, "==");
  EXPECT_EQ(sites[0].candidates,
            (std::vector<std::string>{"!=", "<", ">", "<=", ">="}));
}

TEST(MutationTest, NumberCandidatesForFive) {
  const std::string src = "void f(void) { int x; x = 5; }";
  const auto sites = Sites(src, {MutatorKind::kNumber});
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].original, "5");
  EXPECT_EQ(sites[0].span.offset, src.find('5'));
  // 5+255, 5+1, 5-1, 5-255, 5*(-1).
  EXPECT_EQ(sites[0].candidates,
            (std::vector<std::string>{"260", "6", "4", "-250", "-5"}));
}

TEST(MutationTest, NumberLiteralForms) {
  EXPECT_EQ(*NumberCandidates("0x10"),
            (std::vector<std::string>{"271", "17", "15", "-239", "-16"}));
  EXPECT_EQ(*NumberCandidates("010"),
            (std::vector<std::string>{"263", "9", "7", "-247", "-8"}));
  EXPECT_EQ(*NumberCandidates("3u"),
            (std::vector<std::string>{"258u", "4u", "2u", "-252u", "-3u"}));
  // -0 equals 0, so the negation is a no-op and is dropped.
  EXPECT_EQ(*NumberCandidates("0"),
            (std::vector<std::string>{"255", "1", "-1", "-255"}));
  EXPECT_FALSE(NumberCandidates("99999999999999999999").has_value());
}

TEST(MutationTest, FloatsAreNotNumberSites) {
  const auto sites = Sites("double f(void) { return 1.5 + 2e3; }",
                           {MutatorKind::kNumber});
  EXPECT_TRUE(sites.empty());
}

TEST(MutationTest, SingleStatementHasNoLineOrderSite) {
  const auto sites = Sites("int f(int a) {\n  return a;\n}\n",
                           {MutatorKind::kLineOrder});
  EXPECT_TRUE(sites.empty());
}

TEST(MutationTest, LineOrderPartnersInSameFunction) {
  const std::string src =
      "void f(int *p) {\n  p[0] = 1;\n  p[1] = 2;\n}\n"
      "void g(int *q) {\n  q[0] = 3;\n}\n";
  const auto sites = Sites(src, {MutatorKind::kLineOrder});
  ASSERT_EQ(sites.size(), 2u);
  EXPECT_EQ(sites[0].swap_partners.size(), 1u);
  EXPECT_EQ(sites[0].swap_partners[0].partner_text, "  p[1] = 2;");
  const Mutation m = Make(sites[0]);
  const std::string mutated = ApplyMutation(src, m);
  EXPECT_EQ(mutated,
            "void f(int *p) {\n  p[1] = 2;\n  p[0] = 1;\n}\n"
            "void g(int *q) {\n  q[0] = 3;\n}\n");
  EXPECT_EQ(RevertMutation(mutated, m), src);
}

TEST(MutationTest, SymbolCandidatesComeFromSameFunction) {
  const std::string src =
      "int f(int a, int b) { return a - b; }\n"
      "int g(int z) { return z; }\n";
  const auto sites = Sites(src, {MutatorKind::kSymbol});
  ASSERT_EQ(sites.size(), 2u);
  EXPECT_EQ(sites[0].original, "a");
  EXPECT_EQ(sites[0].candidates, std::vector<std::string>{"b"});
  EXPECT_EQ(sites[1].original, "b");
  EXPECT_EQ(sites[1].candidates, std::vector<std::string>{"a"});
}

TEST(MutationTest, ApplyTernaryComparison) {
  const std::string src = "int f(int rc, int x, int y) { return rc<1 ? x : y; }";
  const auto sites = Sites(src, {MutatorKind::kComparison});
  ASSERT_EQ(sites.size(), 1u);
  Mutation m = Make(sites[0]);
  m.replacement = ">=";
  ASSERT_NE(std::find(sites[0].candidates.begin(), sites[0].candidates.end(), ">="),
            sites[0].candidates.end());
  const std::string mutated = ApplyMutation(src, m);
  EXPECT_NE(mutated.find("rc>=1 ? x : y"), std::string::npos);
  EXPECT_EQ(RevertMutation(mutated, m), src);
}

TEST(MutationTest, DeleteBlanksLine) {
  const std::string src = "void f(int count) {\n  count++;\n  count--;\n}\n";
  const auto sites = Sites(src, {MutatorKind::kDelete});
  ASSERT_EQ(sites.size(), 2u);
  EXPECT_EQ(sites[0].original, "  count++;");
  const Mutation m = Make(sites[0]);
  const std::string mutated = ApplyMutation(src, m);
  EXPECT_EQ(mutated, "void f(int count) {\n\n  count--;\n}\n");
  EXPECT_EQ(std::count(mutated.begin(), mutated.end(), '\n'),
            std::count(src.begin(), src.end(), '\n'));
  EXPECT_EQ(RevertMutation(mutated, m), src);
}

TEST(MutationTest, StaleSiteDetection) {
  const std::string src = "int f(int a, int b) { return a < b; }";
  const auto sites = Sites(src, {MutatorKind::kComparison});
  ASSERT_EQ(sites.size(), 1u);
  Mutation m = Make(sites[0]);
  m.replacement = "<=";
  // Revert of untouched source.
  try {
    RevertMutation(src, m);
    FAIL() << "expected StaleSite";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStaleSite);
  }
  // Apply to changed source.
  std::string changed = src;
  changed.replace(src.find('<'), 1, ">");
  EXPECT_THROW(ApplyMutation(changed, m), Error);
}

TEST(MutationTest, OverlappingSecondApplyMakesFirstRevertStale) {
  const std::string src = "int f(int a, int b) { return a < b; }";
  const auto sites = Sites(src, {MutatorKind::kComparison});
  Mutation first = Make(sites[0]);
  first.replacement = "<=";
  const std::string once = ApplyMutation(src, first);
  // A second edit enumerated on the mutated text, at the same place.
  const auto again = Sites(once, {MutatorKind::kComparison});
  ASSERT_EQ(again.size(), 1u);
  Mutation second = Make(again[0]);
  second.replacement = ">";
  const std::string twice = ApplyMutation(once, second);
  try {
    RevertMutation(twice, first);
    FAIL() << "expected StaleSite";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStaleSite);
  }
}

TEST(MutationTest, ShorterReplacementOfLongerOperatorIsStaleWhenUnapplied) {
  // `<=` -> `<`: the untouched text starts with the replacement, but still
  // holds the whole original token.
  const std::string src = "int f(int a, int b) { return a <= b; }";
  const auto sites = Sites(src, {MutatorKind::kComparison});
  Mutation m = Make(sites[0]);
  m.replacement = "<";
  EXPECT_THROW(RevertMutation(src, m), Error);
  EXPECT_EQ(RevertMutation(ApplyMutation(src, m), m), src);
}

TEST(MutationTest, LogicalAndIncrementSites) {
  const std::string src =
      "int f(int a, int b) {\n  if (a && b || a != b) a++;\n  return --b;\n}\n";
  const auto sites =
      Sites(src, {MutatorKind::kLogical, MutatorKind::kIncrementDecrement});
  std::vector<std::pair<MutatorKind, std::string>> got;
  for (const MutationSite& s : sites) got.emplace_back(s.kind, s.original);
  EXPECT_EQ(got, (std::vector<std::pair<MutatorKind, std::string>>{
                     {MutatorKind::kLogical, "&&"},
                     {MutatorKind::kLogical, "||"},
                     {MutatorKind::kLogical, "!="},
                     {MutatorKind::kIncrementDecrement, "++"},
                     {MutatorKind::kIncrementDecrement, "--"}}));
}

TEST(MutationTest, PointerDeclaratorsAreNotArithmetic) {
  const std::string src = "int f(int *p, int n) { int *q = p; return *q * n; }";
  const auto sites = Sites(src, {MutatorKind::kArithmetic});
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].span.offset, src.find("* n"));
}

TEST(MutationTest, TemplateBracketsAreNotComparisons) {
  const std::string src =
      "int f(std::vector<int> v) { std::vector<int> w = v; return v.size() < 3; }";
  const auto sites = Sites(src, {MutatorKind::kComparison}, Language::kCpp);
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].span.offset, src.find("< 3"));
}

// Properties over every site of the bundled toy project.
class ToyMutationTest : public ::testing::Test {
 protected:
  void SetUp() override {
    for (const char* rel : {"src/arena.c", "src/store.c"}) {
      const std::string full =
          (std::filesystem::path(testing::SourceDir()) / "toy" / rel).string();
      files_.push_back({rel, ReadFileBytes(full)});
    }
  }
  std::vector<std::pair<std::string, std::string>> files_;
};

TEST_F(ToyMutationTest, AllKindsPresentAndDeterministic) {
  std::set<MutatorKind> kinds;
  for (const auto& [rel, text] : files_) {
    const SyntaxIndex index = ParseSource(text, Language::kC, rel);
    const auto a = EnumerateSites(index, text, AllMutators());
    const auto b = EnumerateSites(ParseSource(text, Language::kC, rel), text,
                                  AllMutators());
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].span, b[i].span);
      EXPECT_EQ(a[i].kind, b[i].kind);
      EXPECT_EQ(a[i].candidates, b[i].candidates);
      kinds.insert(a[i].kind);
    }
  }
  EXPECT_EQ(kinds, AllMutators());
}

TEST_F(ToyMutationTest, EveryCandidateRoundTripsWithinItsRegion) {
  std::size_t checked = 0;
  for (const auto& [rel, text] : files_) {
    const SyntaxIndex index = ParseSource(text, Language::kC, rel);
    for (const MutationSite& site : EnumerateSites(index, text, AllMutators())) {
      // Site invariants.
      ASSERT_LE(site.span.end(), text.size());
      EXPECT_EQ(text.substr(site.span.offset, site.span.length), site.original);
      const int fid = index.FunctionAt(site.span.offset);
      ASSERT_GE(fid, 0);
      EXPECT_TRUE(index.functions()[fid].body.Contains(site.span.offset));
      EXPECT_LE(site.span.end(), index.functions()[fid].body.end());
      EXPECT_EQ(std::find(site.candidates.begin(), site.candidates.end(),
                          site.original),
                site.candidates.end());

      const std::size_t choices =
          site.kind == MutatorKind::kLineOrder ? site.swap_partners.size()
          : site.kind == MutatorKind::kDelete  ? 1
                                               : site.candidates.size();
      for (std::size_t c = 0; c < choices; ++c) {
        const Mutation m = Make(site, c);
        const std::string mutated = ApplyMutation(text, m);
        ASSERT_NE(mutated, text);
        ASSERT_EQ(RevertMutation(mutated, m), text);
        // Bytes outside the declared regions are untouched.
        const std::vector<Span> regions = MutatedRegions(m);
        std::size_t prefix = regions.front().offset;
        EXPECT_EQ(mutated.compare(0, prefix, text, 0, prefix), 0);
        const std::size_t tail =
            text.size() - (site.kind == MutatorKind::kLineOrder
                               ? std::max(site.span.end(),
                                          m.swap->partner.end())
                               : site.span.end());
        EXPECT_EQ(mutated.compare(mutated.size() - tail, tail, text,
                                  text.size() - tail, tail),
                  0);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 500u);
}

TEST_F(ToyMutationTest, OperatorMutantsDoNotBreakOtherFunctions) {
  for (const auto& [rel, text] : files_) {
    const SyntaxIndex index = ParseSource(text, Language::kC, rel);
    ASSERT_EQ(index.ErrorCount(), 0u) << rel;
    for (const MutationSite& site : EnumerateSites(index, text, AllMutators())) {
      if (!IsSetBased(site.kind)) continue;
      for (std::size_t c = 0; c < site.candidates.size(); ++c) {
        const std::string mutated = ApplyMutation(text, Make(site, c));
        const SyntaxIndex re = ParseSource(mutated, Language::kC, rel);
        ASSERT_EQ(re.functions().size(), index.functions().size());
        for (std::size_t f = 0; f < re.functions().size(); ++f) {
          if (re.functions()[f].qualified_name == site.enclosing_function) {
            continue;
          }
          EXPECT_FALSE(re.functions()[f].has_error)
              << site.original << " -> " << site.candidates[c] << " in "
              << site.enclosing_function;
        }
      }
    }
  }
}

}  // namespace
}  // namespace crashloc
