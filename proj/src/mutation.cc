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

#include <algorithm>
#include <cctype>
#include <map>
#include <tuple>

#include "crashloc/error.h"

namespace crashloc {

namespace {

struct KindInfo {
  MutatorKind kind;
  std::string_view name;
};

constexpr KindInfo kKindNames[] = {
    {MutatorKind::kAssignment, "Assignment"},
    {MutatorKind::kNumber, "Number"},
    {MutatorKind::kLineOrder, "LineOrder"},
    {MutatorKind::kBooleanAssignment, "BooleanAssignment"},
    {MutatorKind::kDelete, "Delete"},
    {MutatorKind::kComparison, "Comparison"},
    {MutatorKind::kSymbol, "Symbol"},
    {MutatorKind::kArithmetic, "Arithmetic"},
    {MutatorKind::kIncrementDecrement, "IncrementDecrement"},
    {MutatorKind::kBooleanArithmetic, "BooleanArithmetic"},
    {MutatorKind::kLogical, "Logical"},
};

bool Contains(const std::vector<std::string>& set, std::string_view s) {
  return std::find(set.begin(), set.end(), s) != set.end();
}

// Whether `token` in its classified role can host a site of `kind`.
bool TokenMatches(const Token& token, MutatorKind kind, Language language) {
  const std::vector<std::string>& set = ReplacementSet(kind);
  if (!Contains(set, token.text)) return false;
  if (token.kind == TokenKind::kKeyword) {
    return kind == MutatorKind::kLogical && language == Language::kCpp &&
           (token.role == OperatorRole::kBinary ||
            token.role == OperatorRole::kPrefix);
  }
  if (token.kind != TokenKind::kPunct) return false;
  if (kind == MutatorKind::kIncrementDecrement) {
    return token.role == OperatorRole::kPrefix ||
           token.role == OperatorRole::kPostfix;
  }
  return token.role == OperatorRole::kBinary;
}

std::vector<std::string> Without(const std::vector<std::string>& set,
                                 std::string_view original) {
  std::vector<std::string> out;
  for (const std::string& s : set) {
    if (s != original) out.push_back(s);
  }
  return out;
}

struct StatementLine {
  Span span;
  std::string text;
};

std::vector<StatementLine> StatementLines(const SyntaxIndex& index,
                                          std::string_view source,
                                          const FunctionSpan& f, int fid) {
  const std::vector<Token>& toks = index.tokens();
  std::map<std::size_t, std::vector<std::size_t>> by_line;
  for (std::size_t k = f.first_token; k < f.end_token && k < toks.size(); ++k) {
    by_line[index.LineOf(toks[k].span.offset)].push_back(k);
  }
  std::vector<StatementLine> out;
  for (const auto& [line, members] : by_line) {
    const Span span = index.LineSpan(line);
    // Every token that starts on this line must belong to this body.
    bool inside = true;
    int depth = 0;
    const std::size_t first = members.front();
    const std::size_t last = members.back();
    if (first > 0 && toks[first - 1].span.end() > span.offset &&
        toks[first - 1].function != fid) {
      inside = false;
    }
    if (last + 1 < toks.size() && toks[last + 1].span.offset < span.end() &&
        toks[last + 1].function != fid) {
      inside = false;
    }
    // Multi-line tokens (block comments excluded by the lexer, strings) must
    // not straddle the line.
    if (toks[last].span.end() > span.end()) inside = false;
    if (!inside || !(toks[last].kind == TokenKind::kPunct &&
                     toks[last].text == ";")) {
      continue;
    }
    bool balanced = true;
    for (std::size_t k : members) {
      const Token& t = toks[k];
      if (t.kind != TokenKind::kPunct) continue;
      if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
      if (t.text == ")" || t.text == "]" || t.text == "}") {
        if (--depth < 0) balanced = false;
      }
    }
    if (!balanced || depth != 0) continue;
    std::string text(source.substr(span.offset, span.length));
    if (!text.empty() && text.back() == '\r') {
      text.pop_back();
    }
    out.push_back({{span.offset, text.size()}, std::move(text)});
  }
  return out;
}

bool EligibleSymbol(const std::vector<Token>& toks, std::size_t k,
                    const FunctionSpan& f) {
  const Token& t = toks[k];
  if (t.kind != TokenKind::kIdentifier) return false;
  if (k > f.first_token) {
    const Token& p = toks[k - 1];
    if (p.kind == TokenKind::kPunct &&
        (p.text == "." || p.text == "->" || p.text == "::")) {
      return false;
    }
    if (p.text == "goto" || p.text == "case") return false;
  }
  if (k + 1 < f.end_token) {
    const Token& n = toks[k + 1];
    if (n.kind == TokenKind::kPunct && n.text == "::") return false;
    // Labels.
    if (n.kind == TokenKind::kPunct && n.text == ":" &&
        (k == f.first_token || toks[k - 1].text == ";" ||
         toks[k - 1].text == "{" || toks[k - 1].text == "}")) {
      return false;
    }
  }
  return true;
}

std::string ToDecimal(__int128 v) {
  if (v == 0) return "0";
  const bool negative = v < 0;
  unsigned __int128 u = negative ? static_cast<unsigned __int128>(-v)
                                 : static_cast<unsigned __int128>(v);
  std::string digits;
  while (u > 0) {
    digits += static_cast<char>('0' + static_cast<int>(u % 10));
    u /= 10;
  }
  if (negative) digits += '-';
  std::reverse(digits.begin(), digits.end());
  return digits;
}

// Length of the lexeme at `offset` as the mutation of `kind` would have left
// it in the source.
std::size_t LexemeLengthAt(std::string_view text, std::size_t offset,
                           MutatorKind kind) {
  if (kind == MutatorKind::kNumber && offset < text.size() &&
      text[offset] == '-') {
    const std::size_t rest = TokenLengthAt(text, offset + 1);
    return rest == 0 ? 0 : rest + 1;
  }
  return TokenLengthAt(text, offset);
}

void CheckBounds(std::string_view text, const Span& span,
                 const std::string& id) {
  if (span.offset > text.size() || span.length > text.size() - span.offset) {
    throw Error(ErrorCode::kStaleSite, "span out of range for " + id);
  }
}

bool IsLineEnd(std::string_view text, std::size_t offset) {
  return offset == text.size() || text[offset] == '\n' ||
         (text[offset] == '\r' && offset + 1 < text.size() &&
          text[offset + 1] == '\n') ||
         (text[offset] == '\r' && offset + 1 == text.size());
}

std::string Swap(std::string_view text, Span first, std::string_view first_new,
                 Span second, std::string_view second_new) {
  // Precondition: first.offset < second.offset and the spans are disjoint.
  std::string out;
  out.reserve(text.size() + first_new.size() + second_new.size());
  out.append(text.substr(0, first.offset));
  out.append(first_new);
  out.append(text.substr(first.end(), second.offset - first.end()));
  out.append(second_new);
  out.append(text.substr(second.end()));
  return out;
}

}  // namespace

std::string_view MutatorName(MutatorKind kind) {
  for (const KindInfo& info : kKindNames) {
    if (info.kind == kind) return info.name;
  }
  return "Unknown";
}

std::optional<MutatorKind> ParseMutatorKind(std::string_view name) {
  for (const KindInfo& info : kKindNames) {
    if (info.name == name) return info.kind;
  }
  return std::nullopt;
}

const std::vector<std::string>& ReplacementSet(MutatorKind kind) {
  static const std::vector<std::string> kEmpty;
  static const std::vector<std::string> kAssignment = {"=",  "+=", "-=",
                                                       "*=", "/=", "%="};
  static const std::vector<std::string> kNumber = {"+255", "+1", "-1", "-255",
                                                   "*(-1)"};
  static const std::vector<std::string> kBooleanAssignment = {"=", "&=", "|=",
                                                              "^="};
  static const std::vector<std::string> kComparison = {"==", "!=", "<",
                                                       ">",  "<=", ">="};
  static const std::vector<std::string> kArithmetic = {"+", "-", "*", "/",
                                                       "%"};
  static const std::vector<std::string> kIncrementDecrement = {"++", "--"};
  static const std::vector<std::string> kBooleanArithmetic = {"&", "|", "^",
                                                              "<<", ">>"};
  static const std::vector<std::string> kLogical = {"&&", "and", "||",
                                                    "or", "!=",  "not"};
  switch (kind) {
    case MutatorKind::kAssignment: return kAssignment;
    case MutatorKind::kNumber: return kNumber;
    case MutatorKind::kBooleanAssignment: return kBooleanAssignment;
    case MutatorKind::kComparison: return kComparison;
    case MutatorKind::kArithmetic: return kArithmetic;
    case MutatorKind::kIncrementDecrement: return kIncrementDecrement;
    case MutatorKind::kBooleanArithmetic: return kBooleanArithmetic;
    case MutatorKind::kLogical: return kLogical;
    case MutatorKind::kLineOrder:
    case MutatorKind::kDelete:
    case MutatorKind::kSymbol:
      return kEmpty;
  }
  return kEmpty;
}

bool IsSetBased(MutatorKind kind) { return !ReplacementSet(kind).empty(); }

MutatorSet AllMutators() {
  return MutatorSet(kAllMutatorKinds.begin(), kAllMutatorKinds.end());
}

std::optional<std::vector<std::string>> NumberCandidates(
    std::string_view lexeme) {
  std::string digits;
  for (char c : lexeme) {
    if (c != '\'') digits += c;
  }
  std::size_t suffix_at = digits.size();
  while (suffix_at > 0 && std::string_view("uUlLzZ").find(
                              digits[suffix_at - 1]) != std::string_view::npos) {
    --suffix_at;
  }
  const std::string suffix = digits.substr(suffix_at);
  std::string body = digits.substr(0, suffix_at);
  int base = 10;
  if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X')) {
    base = 16;
    body = body.substr(2);
  } else if (body.size() > 2 && body[0] == '0' &&
             (body[1] == 'b' || body[1] == 'B')) {
    base = 2;
    body = body.substr(2);
  } else if (body.size() > 1 && body[0] == '0') {
    base = 8;
    body = body.substr(1);
  }
  if (body.empty()) return std::nullopt;
  __int128 value = 0;
  constexpr __int128 kLimit = static_cast<__int128>(INT64_MAX);
  for (char c : body) {
    int d;
    if (c >= '0' && c <= '9') {
      d = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      d = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      d = c - 'A' + 10;
    } else {
      return std::nullopt;
    }
    if (d >= base) return std::nullopt;
    value = value * base + d;
    if (value > kLimit) return std::nullopt;
  }
  const __int128 results[] = {value + 255, value + 1, value - 1, value - 255,
                              -value};
  std::vector<std::string> out;
  for (__int128 r : results) {
    if (r == value) continue;
    out.push_back(ToDecimal(r) + suffix);
  }
  return out;
}

std::vector<MutationSite> EnumerateSites(const SyntaxIndex& index,
                                         std::string_view source,
                                         const MutatorSet& kinds) {
  std::vector<MutationSite> sites;
  const std::vector<Token>& toks = index.tokens();
  const Language language = index.language();

  for (std::size_t fid = 0; fid < index.functions().size(); ++fid) {
    const FunctionSpan& f = index.functions()[fid];
    if (f.has_error) continue;
    const std::size_t end = std::min(f.end_token, toks.size());

    auto make_site = [&](MutatorKind kind, Span span, std::string original) {
      MutationSite site;
      site.file = index.path();
      site.span = span;
      site.original = std::move(original);
      site.kind = kind;
      site.enclosing_function = f.qualified_name;
      site.enclosing_file = index.path();
      return site;
    };

    std::vector<std::string> symbols;
    if (kinds.count(MutatorKind::kSymbol)) {
      for (std::size_t k = f.first_token; k < end; ++k) {
        if (EligibleSymbol(toks, k, f) && !Contains(symbols, toks[k].text)) {
          symbols.push_back(toks[k].text);
        }
      }
    }

    for (std::size_t k = f.first_token; k < end; ++k) {
      const Token& t = toks[k];
      for (MutatorKind kind : kinds) {
        if (kind == MutatorKind::kNumber) {
          if (t.kind != TokenKind::kInteger) continue;
          auto candidates = NumberCandidates(t.text);
          if (!candidates || candidates->empty()) continue;
          MutationSite site = make_site(kind, t.span, t.text);
          site.candidates = std::move(*candidates);
          sites.push_back(std::move(site));
        } else if (kind == MutatorKind::kSymbol) {
          if (!EligibleSymbol(toks, k, f)) continue;
          std::vector<std::string> others = Without(symbols, t.text);
          if (others.empty()) continue;
          MutationSite site = make_site(kind, t.span, t.text);
          site.candidates = std::move(others);
          sites.push_back(std::move(site));
        } else if (IsSetBased(kind)) {
          if (!TokenMatches(t, kind, language)) continue;
          MutationSite site = make_site(kind, t.span, t.text);
          site.candidates = Without(ReplacementSet(kind), t.text);
          sites.push_back(std::move(site));
        }
      }
    }

    const bool want_delete = kinds.count(MutatorKind::kDelete) > 0;
    const bool want_swap = kinds.count(MutatorKind::kLineOrder) > 0;
    if (want_delete || want_swap) {
      const std::vector<StatementLine> lines =
          StatementLines(index, source, f, static_cast<int>(fid));
      for (const StatementLine& line : lines) {
        if (want_delete) {
          sites.push_back(make_site(MutatorKind::kDelete, line.span, line.text));
        }
        if (want_swap) {
          MutationSite site =
              make_site(MutatorKind::kLineOrder, line.span, line.text);
          for (const StatementLine& other : lines) {
            if (other.span == line.span || other.text == line.text) continue;
            site.swap_partners.push_back({other.span, other.text});
          }
          if (!site.swap_partners.empty()) sites.push_back(std::move(site));
        }
      }
    }
  }

  std::stable_sort(sites.begin(), sites.end(),
                   [](const MutationSite& a, const MutationSite& b) {
                     return std::tie(a.file, a.span.offset, a.kind) <
                            std::tie(b.file, b.span.offset, b.kind);
                   });
  return sites;
}

std::string ApplyMutation(std::string_view text, const Mutation& m) {
  const MutationSite& site = m.site;
  CheckBounds(text, site.span, m.id);
  if (text.substr(site.span.offset, site.span.length) != site.original) {
    throw Error(ErrorCode::kStaleSite,
                m.id + ": expected '" + site.original + "' at offset " +
                    std::to_string(site.span.offset));
  }
  if (site.kind == MutatorKind::kLineOrder) {
    if (!m.swap) {
      throw Error(ErrorCode::kStaleSite, m.id + ": missing swap partner");
    }
    const LineSwap& swap = *m.swap;
    CheckBounds(text, swap.partner, m.id);
    if (text.substr(swap.partner.offset, swap.partner.length) !=
        swap.partner_text) {
      throw Error(ErrorCode::kStaleSite, m.id + ": partner line changed");
    }
    if (site.span.offset < swap.partner.offset) {
      return Swap(text, site.span, swap.partner_text, swap.partner,
                  site.original);
    }
    return Swap(text, swap.partner, site.original, site.span,
                swap.partner_text);
  }
  std::string out;
  out.reserve(text.size() + m.replacement.size());
  out.append(text.substr(0, site.span.offset));
  out.append(m.replacement);
  out.append(text.substr(site.span.end()));
  return out;
}

std::vector<Span> MutatedRegions(const Mutation& m) {
  const MutationSite& site = m.site;
  if (site.kind != MutatorKind::kLineOrder || !m.swap) {
    return {{site.span.offset, m.replacement.size()}};
  }
  const Span a = site.span;
  const Span b = m.swap->partner;
  if (a.offset < b.offset) {
    return {{a.offset, b.length},
            {b.offset + b.length - a.length, a.length}};
  }
  return {{b.offset, a.length}, {a.offset + a.length - b.length, b.length}};
}

std::string RevertMutation(std::string_view text, const Mutation& m) {
  const MutationSite& site = m.site;
  const std::vector<Span> regions = MutatedRegions(m);
  for (const Span& r : regions) CheckBounds(text, r, m.id);

  if (site.kind == MutatorKind::kLineOrder) {
    const LineSwap& swap = *m.swap;
    const bool site_first = site.span.offset < swap.partner.offset;
    // regions[0] is the earlier line in the file.
    const std::string_view early_expected =
        site_first ? std::string_view(swap.partner_text)
                   : std::string_view(site.original);
    const std::string_view late_expected =
        site_first ? std::string_view(site.original)
                   : std::string_view(swap.partner_text);
    if (text.substr(regions[0].offset, regions[0].length) != early_expected ||
        text.substr(regions[1].offset, regions[1].length) != late_expected) {
      throw Error(ErrorCode::kStaleSite, m.id + ": swapped lines not found");
    }
    return Swap(text, regions[0], late_expected, regions[1], early_expected);
  }

  const Span r = regions[0];
  if (site.kind == MutatorKind::kDelete) {
    if (!IsLineEnd(text, r.offset)) {
      throw Error(ErrorCode::kStaleSite, m.id + ": deleted line not blank");
    }
  } else {
    const bool replacement_present =
        text.substr(r.offset, r.length) == m.replacement;
    const bool original_present =
        text.substr(r.offset, site.original.size()) == site.original &&
        LexemeLengthAt(text, r.offset, site.kind) == site.original.size();
    if (!replacement_present || original_present) {
      throw Error(ErrorCode::kStaleSite,
                  m.id + ": replacement '" + m.replacement +
                      "' not found at offset " + std::to_string(r.offset));
    }
  }
  std::string out;
  out.reserve(text.size() + site.original.size());
  out.append(text.substr(0, r.offset));
  out.append(site.original);
  out.append(text.substr(r.end()));
  return out;
}

}  // namespace crashloc
