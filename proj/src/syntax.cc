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

#include "crashloc/syntax.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include "crashloc/error.h"

namespace crashloc {

namespace {

bool IsIdentStart(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c == '$' || c >= 0x80;
}

bool IsDigit(unsigned char c) { return c >= '0' && c <= '9'; }

bool IsIdentChar(unsigned char c) { return IsIdentStart(c) || IsDigit(c); }

bool IsSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

// Longest first so that maximal munch is a linear scan.
constexpr std::array<std::string_view, 27> kMultiCharPunct = {
    "<<=", ">>=", "<=>", "...", "->*", "->", "++", "--", "<<",
    ">>",  "<=",  ">=",  "==",  "!=",  "&&", "||", "+=", "-=",
    "*=",  "/=",  "%=",  "&=",  "|=",  "^=", "::", ".*", "##"};

const std::unordered_set<std::string_view>& CKeywords() {
  static const std::unordered_set<std::string_view> kSet = {
      "auto",     "break",          "case",          "char",
      "const",    "continue",       "default",       "do",
      "double",   "else",           "enum",          "extern",
      "float",    "for",            "goto",          "if",
      "inline",   "int",            "long",          "register",
      "restrict", "return",         "short",         "signed",
      "sizeof",   "static",         "struct",        "switch",
      "typedef",  "union",          "unsigned",      "void",
      "volatile", "while",          "_Bool",         "_Complex",
      "_Alignas", "_Alignof",       "_Atomic",       "_Generic",
      "_Noreturn", "_Static_assert", "_Thread_local", "bool",
      "true",     "false"};
  return kSet;
}

const std::unordered_set<std::string_view>& CppKeywords() {
  static const std::unordered_set<std::string_view> kSet = {
      "alignas",   "alignof",      "and",          "and_eq",
      "asm",       "bitand",       "bitor",        "catch",
      "char8_t",   "char16_t",     "char32_t",     "class",
      "compl",     "concept",      "consteval",    "constexpr",
      "constinit", "const_cast",   "co_await",     "co_return",
      "co_yield",  "decltype",     "delete",       "dynamic_cast",
      "explicit",  "export",       "friend",       "mutable",
      "namespace", "new",          "noexcept",     "not",
      "not_eq",    "nullptr",      "operator",     "or",
      "or_eq",     "private",      "protected",    "public",
      "reinterpret_cast",          "requires",     "static_assert",
      "static_cast", "template",   "this",         "thread_local",
      "throw",     "try",          "typeid",       "typename",
      "using",     "virtual",      "wchar_t",      "xor",
      "xor_eq",    "override",     "final"};
  return kSet;
}

bool IsKeyword(std::string_view word, Language language) {
  if (CKeywords().count(word)) return true;
  return language == Language::kCpp && CppKeywords().count(word) > 0;
}

// Keywords that can begin or continue a type in a declaration.
bool IsTypeKeyword(std::string_view word) {
  static const std::unordered_set<std::string_view> kSet = {
      "void",     "char",     "short",    "int",      "long",
      "float",    "double",   "signed",   "unsigned", "bool",
      "_Bool",    "const",    "volatile", "struct",   "union",
      "enum",     "class",    "typename", "auto",     "static",
      "register", "extern",   "restrict", "wchar_t",  "char8_t",
      "char16_t", "char32_t", "constexpr", "inline",  "mutable"};
  return kSet.count(word) > 0;
}

struct Lexer {
  std::string_view text;
  Language language;
  std::size_t pos = 0;

  bool AtLineStart(std::size_t at) const {
    while (at > 0) {
      const char c = text[at - 1];
      if (c == '\n') return true;
      if (c != ' ' && c != '\t') return false;
      --at;
    }
    return true;
  }

  void SkipPreprocessorLine() {
    while (pos < text.size()) {
      if (text[pos] == '\\' && pos + 1 < text.size() &&
          (text[pos + 1] == '\n' ||
           (text[pos + 1] == '\r' && pos + 2 < text.size() &&
            text[pos + 2] == '\n'))) {
        pos += text[pos + 1] == '\n' ? 2 : 3;
        continue;
      }
      if (text.compare(pos, 2, "/*") == 0) {
        const std::size_t end = text.find("*/", pos + 2);
        pos = end == std::string_view::npos ? text.size() : end + 2;
        continue;
      }
      if (text[pos] == '\n') return;
      ++pos;
    }
  }

  std::size_t QuotedEnd(std::size_t start, char quote) const {
    std::size_t i = start + 1;
    while (i < text.size()) {
      const char c = text[i];
      if (c == '\\') {
        i += 2;
        continue;
      }
      if (c == quote) return i + 1;
      // Unterminated literals stop at the end of the line.
      if (c == '\n') return i;
      ++i;
    }
    return text.size();
  }

  std::size_t RawStringEnd(std::size_t quote) const {
    const std::size_t paren = text.find('(', quote + 1);
    if (paren == std::string_view::npos) return text.size();
    std::string closing = ")";
    closing += text.substr(quote + 1, paren - quote - 1);
    closing += '"';
    const std::size_t end = text.find(closing, paren + 1);
    return end == std::string_view::npos ? text.size() : end + closing.size();
  }

  std::size_t NumberEnd(std::size_t start) const {
    std::size_t i = start;
    while (i < text.size()) {
      const unsigned char c = text[i];
      if ((c == '+' || c == '-') && i > start) {
        const char p = text[i - 1];
        if (p == 'e' || p == 'E' || p == 'p' || p == 'P') {
          ++i;
          continue;
        }
        break;
      }
      if (c == '\'' && i + 1 < text.size() && IsIdentChar(text[i + 1]) &&
          IsIdentChar(text[i - 1])) {
        ++i;
        continue;
      }
      if (IsIdentChar(c) || c == '.') {
        ++i;
        continue;
      }
      break;
    }
    return i;
  }

  static TokenKind ClassifyNumber(std::string_view lexeme) {
    std::string s;
    for (char c : lexeme) {
      if (c != '\'') s += static_cast<char>(std::tolower(c));
    }
    if (s.size() > 1 && s[0] == '0' && (s[1] == 'x')) {
      return s.find_first_of(".p") != std::string::npos ? TokenKind::kFloat
                                                        : TokenKind::kInteger;
    }
    if (s.size() > 1 && s[0] == '0' && s[1] == 'b') return TokenKind::kInteger;
    if (s.find_first_of(".e") != std::string::npos) return TokenKind::kFloat;
    if (!s.empty() && s.back() == 'f') return TokenKind::kFloat;
    return TokenKind::kInteger;
  }

  std::vector<Token> Run() {
    std::vector<Token> out;
    while (pos < text.size()) {
      const unsigned char c = text[pos];
      if (IsSpace(c)) {
        ++pos;
        continue;
      }
      if (c == '/' && pos + 1 < text.size() && text[pos + 1] == '/') {
        const std::size_t end = text.find('\n', pos);
        pos = end == std::string_view::npos ? text.size() : end;
        continue;
      }
      if (c == '/' && pos + 1 < text.size() && text[pos + 1] == '*') {
        const std::size_t end = text.find("*/", pos + 2);
        pos = end == std::string_view::npos ? text.size() : end + 2;
        continue;
      }
      if (c == '#' && AtLineStart(pos)) {
        SkipPreprocessorLine();
        continue;
      }
      const std::size_t start = pos;
      Token token;
      if (IsIdentStart(c)) {
        while (pos < text.size() && IsIdentChar(text[pos])) ++pos;
        const std::string_view word = text.substr(start, pos - start);
        if (pos < text.size() && (text[pos] == '"' || text[pos] == '\'') &&
            (word == "L" || word == "u" || word == "U" || word == "u8" ||
             word == "R" || word == "LR" || word == "uR" || word == "UR" ||
             word == "u8R")) {
          const bool raw = word.back() == 'R' && text[pos] == '"' &&
                           language == Language::kCpp;
          const char quote = text[pos];
          pos = raw ? RawStringEnd(pos) : QuotedEnd(pos, quote);
          token.kind = quote == '"' ? TokenKind::kString : TokenKind::kChar;
        } else {
          token.kind = IsKeyword(word, language) ? TokenKind::kKeyword
                                                 : TokenKind::kIdentifier;
        }
      } else if (IsDigit(c) || (c == '.' && pos + 1 < text.size() &&
                                IsDigit(text[pos + 1]))) {
        pos = NumberEnd(pos);
        token.kind = ClassifyNumber(text.substr(start, pos - start));
      } else if (c == '"' || c == '\'') {
        pos = QuotedEnd(pos, static_cast<char>(c));
        token.kind = c == '"' ? TokenKind::kString : TokenKind::kChar;
      } else {
        std::size_t len = 1;
        for (std::string_view p : kMultiCharPunct) {
          if (text.compare(pos, p.size(), p) == 0) {
            len = p.size();
            break;
          }
        }
        pos += len;
        token.kind = TokenKind::kPunct;
      }
      token.span = {start, pos - start};
      token.text = std::string(text.substr(start, pos - start));
      out.push_back(std::move(token));
    }
    return out;
  }
};

bool IsPunct(const Token& t, std::string_view text) {
  return t.kind == TokenKind::kPunct && t.text == text;
}

std::size_t MatchClose(const std::vector<Token>& toks, std::size_t open,
                       std::size_t limit) {
  const std::string& o = toks[open].text;
  const std::string_view c = o == "{" ? "}" : (o == "(" ? ")" : "]");
  int depth = 0;
  for (std::size_t i = open; i < limit; ++i) {
    if (toks[i].kind != TokenKind::kPunct) continue;
    if (toks[i].text == o) {
      ++depth;
    } else if (toks[i].text == c) {
      if (--depth == 0) return i;
    }
  }
  return limit;
}

enum class HeaderKind {
  kFunction,
  kMemberInitBrace,
  kNamespace,
  kClass,
  kTransparent,
  kOther,
};

struct Header {
  HeaderKind kind = HeaderKind::kOther;
  std::string name;
  std::size_t first = 0;
};

bool IsNonDeclaratorWord(std::string_view w) {
  static const std::unordered_set<std::string_view> kSet = {
      "__attribute__", "__declspec", "alignas",  "decltype", "__asm__",
      "asm",           "throw",      "noexcept", "sizeof",   "_Alignas",
      "__typeof__",    "typeof",     "if",       "while",    "for",
      "switch",        "return",     "requires"};
  return kSet.count(w) > 0;
}

// Skips backwards over a balanced `<...>` group ending at `close`; returns
// the index of the opening `<` or npos.
std::size_t SkipAnglesBack(const std::vector<Token>& toks, std::size_t close,
                           std::size_t floor) {
  int depth = 0;
  for (std::size_t j = close + 1; j-- > floor;) {
    const Token& t = toks[j];
    if (t.kind != TokenKind::kPunct) continue;
    if (t.text == ">") ++depth;
    if (t.text == ">>") depth += 2;
    if (t.text == "<") {
      if (--depth == 0) return j;
    }
    if (t.text == ";" || t.text == "{" || t.text == "}") break;
  }
  return std::string::npos;
}

std::size_t SkipAnglesForward(const std::vector<Token>& toks, std::size_t open,
                              std::size_t limit) {
  int depth = 0;
  for (std::size_t j = open; j < limit; ++j) {
    const Token& t = toks[j];
    if (t.kind != TokenKind::kPunct) continue;
    if (t.text == "<") ++depth;
    if (t.text == ">") --depth;
    if (t.text == ">>") depth -= 2;
    if (depth <= 0) return j;
  }
  return limit;
}

// Reads the declarator name that ends just before the parameter list opening
// at `paren`. Returns an empty string when the tokens do not form a name.
std::string DeclaratorName(const std::vector<Token>& toks, std::size_t first,
                           std::size_t paren) {
  if (paren == first) return {};
  std::size_t j = paren - 1;
  std::string name;
  const Token& last = toks[j];
  if (last.kind == TokenKind::kIdentifier ||
      (last.kind == TokenKind::kKeyword && last.text == "operator")) {
    if (last.text == "operator") return {};
    name = last.text;
  } else {
    // operator forms: `operator+`, `operator()`, `operator[]`, `operator new`
    std::size_t k = j;
    while (k > first && toks[k].text != "operator" && j - k < 3) --k;
    if (toks[k].text != "operator") return {};
    for (std::size_t m = k; m <= j; ++m) name += toks[m].text;
    j = k;
  }
  if (IsNonDeclaratorWord(name)) return {};
  while (j > first) {
    const Token& prev = toks[j - 1];
    if (IsPunct(prev, "~")) {
      name = "~" + name;
      --j;
      continue;
    }
    if (IsPunct(prev, "::") && j - 1 > first) {
      std::size_t q = j - 2;
      if (IsPunct(toks[q], ">")) {
        const std::size_t open = SkipAnglesBack(toks, q, first);
        if (open == std::string::npos || open == first) break;
        q = open - 1;
      }
      if (toks[q].kind != TokenKind::kIdentifier) break;
      name = toks[q].text + "::" + name;
      j = q;
      continue;
    }
    break;
  }
  return name;
}

Header AnalyzeHeader(const std::vector<Token>& toks, std::size_t begin,
                     std::size_t brace) {
  Header h;
  std::size_t b = begin;
  // Leading `template <...>` clauses and `[[...]]` attributes.
  for (bool changed = true; changed && b < brace;) {
    changed = false;
    if (toks[b].text == "template" && b + 1 < brace &&
        IsPunct(toks[b + 1], "<")) {
      b = SkipAnglesForward(toks, b + 1, brace) + 1;
      changed = true;
    } else if (IsPunct(toks[b], "[") && b + 1 < brace &&
               IsPunct(toks[b + 1], "[")) {
      b = MatchClose(toks, b, brace) + 1;
      changed = true;
    }
  }
  h.first = b;
  if (b >= brace) return h;

  for (std::size_t k = b; k < brace; ++k) {
    if (toks[k].kind == TokenKind::kKeyword && toks[k].text == "namespace") {
      h.kind = HeaderKind::kNamespace;
      for (std::size_t m = k + 1; m < brace; ++m) {
        if (toks[m].kind == TokenKind::kIdentifier || IsPunct(toks[m], "::")) {
          h.name += toks[m].text;
        }
      }
      return h;
    }
  }
  if (toks[b].text == "extern" && b + 1 < brace &&
      toks[b + 1].kind == TokenKind::kString) {
    h.kind = HeaderKind::kTransparent;
    return h;
  }

  for (std::size_t k = b; k < brace; ++k) {
    const Token& t = toks[k];
    if (t.kind != TokenKind::kPunct) continue;
    if (t.text == "=" && !(k > b && toks[k - 1].text == "operator")) {
      return h;
    }
    if (t.text == "[") {
      k = MatchClose(toks, k, brace);
      continue;
    }
    if (t.text != "(") continue;
    const std::size_t close = MatchClose(toks, k, brace);
    // `operator()` owns its first paren pair; the parameters follow it.
    if (k > b && toks[k - 1].text == "operator" && close + 1 < brace &&
        IsPunct(toks[close + 1], "(")) {
      k = close;
      continue;
    }
    std::string name = DeclaratorName(toks, b, k);
    if (name.empty()) {
      k = close;
      continue;
    }
    h.kind = HeaderKind::kFunction;
    h.name = std::move(name);
    // Constructor initializer lists contain `member{...}` braces before the
    // body; those are recognized by the identifier right before the brace.
    for (std::size_t m = close + 1; m < brace; ++m) {
      if (IsPunct(toks[m], ":")) {
        const Token& before = toks[brace - 1];
        if (before.kind == TokenKind::kIdentifier || IsPunct(before, ">")) {
          h.kind = HeaderKind::kMemberInitBrace;
        }
        break;
      }
    }
    return h;
  }

  for (std::size_t k = b; k < brace; ++k) {
    const Token& t = toks[k];
    if (t.kind != TokenKind::kKeyword) continue;
    if (t.text == "enum") return h;
    if (t.text == "class" || t.text == "struct" || t.text == "union") {
      h.kind = HeaderKind::kClass;
      for (std::size_t m = k + 1; m < brace; ++m) {
        if (IsPunct(toks[m], ":")) break;
        if (IsPunct(toks[m], "(")) {
          m = MatchClose(toks, m, brace);
          continue;
        }
        if (toks[m].kind == TokenKind::kIdentifier) h.name = toks[m].text;
      }
      return h;
    }
  }
  return h;
}

bool EndsOperand(const Token& t) {
  switch (t.kind) {
    case TokenKind::kIdentifier:
    case TokenKind::kInteger:
    case TokenKind::kFloat:
    case TokenKind::kString:
    case TokenKind::kChar:
      return true;
    case TokenKind::kKeyword:
      return t.text == "this" || t.text == "true" || t.text == "false" ||
             t.text == "nullptr";
    case TokenKind::kPunct:
      return t.text == ")" || t.text == "]" || t.text == "++" ||
             t.text == "--" || t.role == OperatorRole::kTemplate;
  }
  return false;
}

bool IsBinaryCapable(std::string_view op) {
  static const std::unordered_set<std::string_view> kSet = {
      "+",  "-",  "*",  "/",  "%",  "&",  "|",  "^",  "<<", ">>",
      "<",  ">",  "<=", ">=", "==", "!=", "&&", "||", "=",  "+=",
      "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", "?"};
  return kSet.count(op) > 0;
}

// Operators that cannot legally be followed by a closing token.
bool NeedsRightOperand(std::string_view op) {
  static const std::unordered_set<std::string_view> kSet = {
      "=",  "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=",
      "==", "!=", "<=", ">=", "<",  "/",  "%",  "<<", "||", "|",  "^",
      "?",  ".",  "->", "+",  "-",  "!",  "~"};
  return kSet.count(op) > 0;
}

}  // namespace

class SyntaxIndexBuilder {
 public:
  SyntaxIndexBuilder(std::string_view text, Language language, std::string path)
      : text_(text) {
    index_.path_ = std::move(path);
    index_.language_ = language;
    index_.size_ = text.size();
  }

  SyntaxIndex Build() {
    BuildLineTable();
    Lexer lexer{text_, index_.language_};
    index_.tokens_ = lexer.Run();
    FindFunctions();
    for (std::size_t f = 0; f < index_.functions_.size(); ++f) {
      CheckStructure(index_.functions_[f]);
      AssignRoles(index_.functions_[f]);
    }
    return std::move(index_);
  }

 private:
  struct Scope {
    HeaderKind kind;
    std::string name;
  };

  void BuildLineTable() {
    index_.line_starts_.push_back(0);
    for (std::size_t i = 0; i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        index_.line_starts_.push_back(i + 1);
        index_.crlf_.push_back(i > 0 && text_[i - 1] == '\r');
      }
    }
  }

  std::string Qualify(const std::vector<Scope>& scopes,
                      const std::string& name) const {
    std::string out;
    for (const Scope& s : scopes) {
      if ((s.kind == HeaderKind::kNamespace || s.kind == HeaderKind::kClass) &&
          !s.name.empty()) {
        out += s.name + "::";
      }
    }
    return out + name;
  }

  void FindFunctions() {
    std::vector<Token>& toks = index_.tokens_;
    const std::size_t n = toks.size();
    std::vector<Scope> scopes;
    std::size_t stmt_start = 0;
    std::size_t i = 0;
    while (i < n) {
      const Token& t = toks[i];
      if (IsPunct(t, "{")) {
        const Header h = AnalyzeHeader(toks, stmt_start, i);
        switch (h.kind) {
          case HeaderKind::kFunction: {
            const std::size_t close = MatchClose(toks, i, n);
            FunctionSpan f;
            f.qualified_name = Qualify(scopes, h.name);
            f.definition_offset = toks[h.first].span.offset;
            const std::size_t end =
                close < n ? toks[close].span.end() : text_.size();
            f.body = {t.span.offset, end - t.span.offset};
            f.first_token = i + 1;
            f.end_token = close;
            f.has_error = close >= n;
            const int id = static_cast<int>(index_.functions_.size());
            for (std::size_t k = i + 1; k < close && k < n; ++k) {
              toks[k].function = id;
            }
            index_.functions_.push_back(std::move(f));
            i = close + 1;
            stmt_start = i;
            continue;
          }
          case HeaderKind::kMemberInitBrace:
          case HeaderKind::kOther:
            i = MatchClose(toks, i, n) + 1;
            continue;
          case HeaderKind::kNamespace:
          case HeaderKind::kClass:
          case HeaderKind::kTransparent:
            scopes.push_back({h.kind, h.name});
            ++i;
            stmt_start = i;
            continue;
        }
      }
      if (IsPunct(t, "}")) {
        if (!scopes.empty()) scopes.pop_back();
        stmt_start = i + 1;
      } else if (IsPunct(t, ";")) {
        stmt_start = i + 1;
      } else if (IsPunct(t, ":") && i > 0 &&
                 (toks[i - 1].text == "public" ||
                  toks[i - 1].text == "private" ||
                  toks[i - 1].text == "protected")) {
        stmt_start = i + 1;
      }
      ++i;
    }
  }

  void CheckStructure(FunctionSpan& f) {
    const std::vector<Token>& toks = index_.tokens_;
    const std::size_t end = std::min(f.end_token, toks.size());
    std::vector<char> stack;
    for (std::size_t k = f.first_token; k < end; ++k) {
      const Token& t = toks[k];
      if (t.kind != TokenKind::kPunct) continue;
      const std::string& s = t.text;
      if (s == "(" || s == "[" || s == "{") {
        stack.push_back(s[0]);
      } else if (s == ")" || s == "]" || s == "}") {
        const char want = s == ")" ? '(' : (s == "]" ? '[' : '{');
        if (stack.empty() || stack.back() != want) {
          f.has_error = true;
          return;
        }
        stack.pop_back();
      }
      if (NeedsRightOperand(s) && k + 1 < end) {
        const Token& next = toks[k + 1];
        if (next.kind == TokenKind::kPunct &&
            (next.text == ";" || next.text == ")" || next.text == "]" ||
             next.text == "}" || next.text == ",")) {
          f.has_error = true;
          return;
        }
      }
      // `*`, `&` and `&&` may close a declarator (`(int*)`, `T&&,`), but never
      // end a statement or subscript.
      if ((s == "*" || s == "&" || s == "&&") && k + 1 < end &&
          (IsPunct(toks[k + 1], ";") || IsPunct(toks[k + 1], "]") ||
           IsPunct(toks[k + 1], "}"))) {
        f.has_error = true;
        return;
      }
      if (s == "," && k + 1 < end && IsPunct(toks[k + 1], ")")) {
        f.has_error = true;
        return;
      }
    }
    if (!stack.empty()) f.has_error = true;
  }

  bool StartsStatement(std::size_t k, const FunctionSpan& f) const {
    if (k <= f.first_token) return true;
    const Token& p = index_.tokens_[k - 1];
    return IsPunct(p, ";") || IsPunct(p, "{") || IsPunct(p, "}");
  }

  // `T *x = ...`, `const T &r`, `(T *)p`: the star or ampersand belongs to a
  // type, not to an expression.
  bool LooksLikeDeclarator(std::size_t k, const FunctionSpan& f) const {
    const std::vector<Token>& toks = index_.tokens_;
    const std::size_t end = std::min(f.end_token, toks.size());
    if (k + 1 < end) {
      const Token& next = toks[k + 1];
      if (IsPunct(next, ")") || IsPunct(next, "*") || IsPunct(next, ">") ||
          IsPunct(next, ",") || IsPunct(next, "&") ||
          (next.kind == TokenKind::kKeyword && next.text == "const")) {
        return true;
      }
    }
    const std::size_t p = k - 1;
    if (toks[p].kind != TokenKind::kIdentifier) return false;
    bool type_position = StartsStatement(p, f);
    if (p > f.first_token) {
      const Token& pp = toks[p - 1];
      if (pp.kind == TokenKind::kKeyword && IsTypeKeyword(pp.text)) {
        type_position = true;
      }
      if (IsPunct(pp, "::") && p - 1 > f.first_token &&
          StartsStatement(p - 2, f)) {
        type_position = true;
      }
      if (IsPunct(pp, "(") && p - 1 > f.first_token &&
          toks[p - 2].text == "for") {
        type_position = true;
      }
    }
    if (!type_position) return false;
    if (k + 2 < end && toks[k + 1].kind == TokenKind::kIdentifier) {
      const Token& after = toks[k + 2];
      return IsPunct(after, "=") || IsPunct(after, ";") ||
             IsPunct(after, ",") || IsPunct(after, "[") ||
             IsPunct(after, ")") || IsPunct(after, "(") ||
             IsPunct(after, ":");
    }
    return false;
  }

  // Marks `<` ... `>` pairs that enclose template arguments.
  void MarkTemplates(const FunctionSpan& f) {
    std::vector<Token>& toks = index_.tokens_;
    const std::size_t end = std::min(f.end_token, toks.size());
    for (std::size_t k = f.first_token; k < end; ++k) {
      if (!IsPunct(toks[k], "<") || k == f.first_token) continue;
      const Token& prev = toks[k - 1];
      const bool forced =
          prev.kind == TokenKind::kKeyword &&
          (prev.text == "template" || prev.text == "static_cast" ||
           prev.text == "dynamic_cast" || prev.text == "const_cast" ||
           prev.text == "reinterpret_cast");
      if (prev.kind != TokenKind::kIdentifier && !forced) continue;
      int depth = 0;
      int parens = 0;
      std::vector<std::size_t> opens;
      std::size_t close = 0;
      for (std::size_t j = k; j < end && j < k + 64; ++j) {
        const Token& t = toks[j];
        if (t.kind != TokenKind::kPunct) continue;
        const std::string& s = t.text;
        if (s == "<") {
          ++depth;
          opens.push_back(j);
        } else if (s == ">" || s == ">>") {
          depth -= s == ">" ? 1 : 2;
          if (depth <= 0) {
            close = j;
            break;
          }
        } else if (s == "(") {
          ++parens;
        } else if (s == ")") {
          if (--parens < 0) break;
        } else if (s == "::" || s == "," || s == "*" || s == "&" ||
                   s == "[" || s == "]" || s == "...") {
        } else {
          break;
        }
      }
      if (close == 0 || depth < 0) continue;
      bool accept = forced;
      if (!accept && close + 1 < end) {
        const Token& after = toks[close + 1];
        accept = after.kind == TokenKind::kIdentifier ||
                 IsPunct(after, "(") || IsPunct(after, "::") ||
                 IsPunct(after, "{") || IsPunct(after, ">") ||
                 IsPunct(after, ";") || IsPunct(after, "&") ||
                 IsPunct(after, "*") || IsPunct(after, ")");
      }
      if (!accept) continue;
      for (std::size_t o : opens) toks[o].role = OperatorRole::kTemplate;
      toks[close].role = OperatorRole::kTemplate;
      for (std::size_t j = k; j < close; ++j) {
        if (IsPunct(toks[j], ">")) toks[j].role = OperatorRole::kTemplate;
      }
    }
  }

  void AssignRoles(const FunctionSpan& f) {
    if (index_.language_ == Language::kCpp) MarkTemplates(f);
    std::vector<Token>& toks = index_.tokens_;
    const std::size_t end = std::min(f.end_token, toks.size());
    for (std::size_t k = f.first_token; k < end; ++k) {
      Token& t = toks[k];
      if (t.role == OperatorRole::kTemplate) continue;
      const bool has_prev = k > f.first_token;
      const bool prev_operand = has_prev && EndsOperand(toks[k - 1]);
      if (t.kind == TokenKind::kKeyword) {
        if (t.text == "and" || t.text == "or") t.role = OperatorRole::kBinary;
        if (t.text == "not") t.role = OperatorRole::kPrefix;
        continue;
      }
      if (t.kind != TokenKind::kPunct) continue;
      if (t.text == "++" || t.text == "--") {
        const bool postfix =
            has_prev && EndsOperand(toks[k - 1]) &&
            !(IsPunct(toks[k - 1], "++") || IsPunct(toks[k - 1], "--"));
        t.role = postfix ? OperatorRole::kPostfix : OperatorRole::kPrefix;
        continue;
      }
      if (t.text == "!") {
        t.role = OperatorRole::kPrefix;
        continue;
      }
      if (!IsBinaryCapable(t.text)) continue;
      if (!prev_operand) {
        t.role = OperatorRole::kPrefix;
        continue;
      }
      if ((t.text == "*" || t.text == "&" || t.text == "&&") &&
          LooksLikeDeclarator(k, f)) {
        continue;
      }
      t.role = OperatorRole::kBinary;
    }
  }

  std::string_view text_;
  SyntaxIndex index_;
};

Language LanguageForPath(std::string_view path) {
  const std::size_t dot = path.rfind('.');
  const std::string_view ext =
      dot == std::string_view::npos ? std::string_view{} : path.substr(dot + 1);
  if (ext == "c" || ext == "h") return Language::kC;
  if (ext == "cc" || ext == "cpp" || ext == "cxx" || ext == "hh" ||
      ext == "hpp" || ext == "hxx" || ext == "C" || ext == "ipp") {
    return Language::kCpp;
  }
  throw Error(ErrorCode::kUnsupportedLanguage, std::string(path));
}

std::optional<Language> ParseLanguage(std::string_view name) {
  if (name == "c" || name == "C") return Language::kC;
  if (name == "cpp" || name == "c++" || name == "Cpp" || name == "C++") {
    return Language::kCpp;
  }
  return std::nullopt;
}

int SyntaxIndex::FunctionAt(std::size_t offset) const {
  auto it = std::upper_bound(
      functions_.begin(), functions_.end(), offset,
      [](std::size_t o, const FunctionSpan& f) { return o < f.body.offset; });
  if (it == functions_.begin()) return -1;
  --it;
  if (!it->body.Contains(offset)) return -1;
  return static_cast<int>(std::distance(functions_.begin(), it));
}

std::size_t SyntaxIndex::LineOf(std::size_t offset) const {
  auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
  return static_cast<std::size_t>(std::distance(line_starts_.begin(), it)) - 1;
}

Span SyntaxIndex::LineSpan(std::size_t line) const {
  const std::size_t begin = line_starts_[line];
  std::size_t end =
      line + 1 < line_starts_.size() ? line_starts_[line + 1] - 1 : size_;
  if (line + 1 < line_starts_.size() && crlf_[line]) {
    --end;
  }
  return {begin, end - begin};
}

std::size_t SyntaxIndex::ErrorCount() const {
  return static_cast<std::size_t>(
      std::count_if(functions_.begin(), functions_.end(),
                    [](const FunctionSpan& f) { return f.has_error; }));
}

SyntaxIndex ParseSource(std::string_view text, Language language,
                        std::string path) {
  return SyntaxIndexBuilder(text, language, std::move(path)).Build();
}

SyntaxIndex ParseFile(const std::string& full_path,
                      const std::string& relative_path) {
  const Language language = LanguageForPath(full_path);
  const std::string text = ReadFileBytes(full_path);
  return ParseSource(text, language, relative_path);
}

std::optional<EnclosingFunction> EnclosingFunctionAt(const SyntaxIndex& index,
                                                     std::size_t offset) {
  const int f = index.FunctionAt(offset);
  if (f < 0) return std::nullopt;
  return EnclosingFunction{index.functions()[f].qualified_name, index.path()};
}

std::optional<std::string> FunctionSourceText(const SyntaxIndex& index,
                                              std::string_view source,
                                              std::string_view name) {
  auto unqualified = [](std::string_view q) {
    const std::size_t pos = q.rfind("::");
    return pos == std::string_view::npos ? q : q.substr(pos + 2);
  };
  const FunctionSpan* match = nullptr;
  for (const FunctionSpan& f : index.functions()) {
    if (f.qualified_name == name) {
      match = &f;
      break;
    }
    if (!match && unqualified(f.qualified_name) == unqualified(name)) {
      match = &f;
    }
  }
  if (!match || match->body.end() > source.size()) return std::nullopt;
  return std::string(source.substr(
      match->definition_offset, match->body.end() - match->definition_offset));
}

std::size_t TokenLengthAt(std::string_view text, std::size_t offset) {
  if (offset >= text.size()) return 0;
  Lexer lexer{text, Language::kCpp, offset};
  const unsigned char c = text[offset];
  if (IsSpace(c)) return 0;
  if (IsIdentStart(c)) {
    std::size_t i = offset;
    while (i < text.size() && IsIdentChar(text[i])) ++i;
    return i - offset;
  }
  if (IsDigit(c)) return lexer.NumberEnd(offset) - offset;
  for (std::string_view p : kMultiCharPunct) {
    if (text.compare(offset, p.size(), p) == 0) return p.size();
  }
  return 1;
}

std::string ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoError, "read failed: " + path);
  return buf.str();
}

void WriteFileBytes(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

}  // namespace crashloc
