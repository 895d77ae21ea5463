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

#ifndef CRASHLOC_SYNTAX_H_
#define CRASHLOC_SYNTAX_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crashloc {

enum class Language { kC, kCpp };

// Picks a language from a file extension; throws kUnsupportedLanguage for
// anything that is not a C or C++ source/header.
Language LanguageForPath(std::string_view path);
std::optional<Language> ParseLanguage(std::string_view name);

struct Span {
  std::size_t offset = 0;
  std::size_t length = 0;

  std::size_t end() const { return offset + length; }
  bool Contains(std::size_t pos) const { return pos >= offset && pos < end(); }
  bool operator==(const Span&) const = default;
};

enum class TokenKind {
  kIdentifier,
  kKeyword,
  kInteger,
  kFloat,
  kString,
  kChar,
  kPunct,
};

// Role an operator plays in its expression, decided from the surrounding
// tokens. Only kBinary / kPrefix / kPostfix operators are mutation sites.
enum class OperatorRole { kNone, kBinary, kPrefix, kPostfix, kTemplate };

struct Token {
  TokenKind kind = TokenKind::kPunct;
  Span span;
  std::string text;
  OperatorRole role = OperatorRole::kNone;
  // Index into SyntaxIndex::functions when the token sits inside a function
  // body (braces excluded), otherwise -1.
  int function = -1;
};

struct FunctionSpan {
  std::string qualified_name;
  // Offset of the first token of the definition (return type, qualifiers).
  std::size_t definition_offset = 0;
  // Byte range of the body including the braces.
  Span body;
  // Token range of the body interior: [first_token, end_token).
  std::size_t first_token = 0;
  std::size_t end_token = 0;
  // Set when the body failed the structural checks; such bodies yield no
  // mutation sites.
  bool has_error = false;
};

// Token-level view of one C/C++ file: function bodies with their qualified
// names, the classified tokens inside them, and a line table. Immutable once
// built.
class SyntaxIndex {
 public:
  SyntaxIndex() = default;

  const std::string& path() const { return path_; }
  Language language() const { return language_; }
  std::size_t size() const { return size_; }
  const std::vector<Token>& tokens() const { return tokens_; }
  const std::vector<FunctionSpan>& functions() const { return functions_; }
  const std::vector<std::size_t>& line_starts() const { return line_starts_; }

  // Innermost function whose body contains `offset`, or -1.
  int FunctionAt(std::size_t offset) const;

  // Line number (0-based) containing `offset`.
  std::size_t LineOf(std::size_t offset) const;
  // Byte span of a line without its terminator ("\n" or "\r\n").
  Span LineSpan(std::size_t line) const;

  // Number of functions flagged with structural errors.
  std::size_t ErrorCount() const;

 private:
  friend class SyntaxIndexBuilder;

  std::string path_;
  Language language_ = Language::kC;
  std::size_t size_ = 0;
  std::vector<Token> tokens_;
  std::vector<FunctionSpan> functions_;
  std::vector<std::size_t> line_starts_;
  // Per line terminator: true when it is "\r\n".
  std::vector<bool> crlf_;
};

// Tokenizes `text` and recovers function bodies. Never throws on malformed
// input: regions that fail structural checks are flagged instead.
SyntaxIndex ParseSource(std::string_view text, Language language,
                        std::string path = {});

// Reads and parses a file; throws kIoError when unreadable.
SyntaxIndex ParseFile(const std::string& full_path,
                      const std::string& relative_path);

struct EnclosingFunction {
  std::string name;
  std::string file;
  bool operator==(const EnclosingFunction&) const = default;
};

std::optional<EnclosingFunction> EnclosingFunctionAt(const SyntaxIndex& index,
                                                     std::size_t offset);

// Full definition text of a function, looked up by qualified name first and
// unqualified name second.
std::optional<std::string> FunctionSourceText(const SyntaxIndex& index,
                                              std::string_view source,
                                              std::string_view name);

// Returns the lexeme length of the token starting at `offset` by maximal
// munch, or 0 if nothing lexes there. Used to check that an edited region
// still forms exactly one token.
std::size_t TokenLengthAt(std::string_view text, std::size_t offset);

std::string ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::string_view bytes);

}  // namespace crashloc

#endif  // CRASHLOC_SYNTAX_H_
