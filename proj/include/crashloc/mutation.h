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

#ifndef CRASHLOC_MUTATION_H_
#define CRASHLOC_MUTATION_H_

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "crashloc/syntax.h"

namespace crashloc {

enum class MutatorKind {
  kAssignment,
  kNumber,
  kLineOrder,
  kBooleanAssignment,
  kDelete,
  kComparison,
  kSymbol,
  kArithmetic,
  kIncrementDecrement,
  kBooleanArithmetic,
  kLogical,
};

inline constexpr std::array<MutatorKind, 11> kAllMutatorKinds = {
    MutatorKind::kAssignment,        MutatorKind::kNumber,
    MutatorKind::kLineOrder,         MutatorKind::kBooleanAssignment,
    MutatorKind::kDelete,            MutatorKind::kComparison,
    MutatorKind::kSymbol,            MutatorKind::kArithmetic,
    MutatorKind::kIncrementDecrement, MutatorKind::kBooleanArithmetic,
    MutatorKind::kLogical};

std::string_view MutatorName(MutatorKind kind);
std::optional<MutatorKind> ParseMutatorKind(std::string_view name);

// Replacement lexemes for the set-based mutators, in table order. The Number
// mutator's set holds the increments applied to the literal's value. Empty
// for LineOrder, Delete and Symbol.
const std::vector<std::string>& ReplacementSet(MutatorKind kind);

bool IsSetBased(MutatorKind kind);

using MutatorSet = std::set<MutatorKind>;
MutatorSet AllMutators();

// A line exchanged with the site's line by the LineOrder mutator.
struct LineSwap {
  Span partner;
  std::string partner_text;
  bool operator==(const LineSwap&) const = default;
};

struct MutationSite {
  std::string file;
  Span span;
  std::string original;
  MutatorKind kind = MutatorKind::kAssignment;
  std::string enclosing_function;
  std::string enclosing_file;
  // Replacement lexemes (set-based kinds and Symbol).
  std::vector<std::string> candidates;
  // LineOrder only.
  std::vector<LineSwap> swap_partners;
};

struct Mutation {
  std::string id;
  MutationSite site;
  // Empty for Delete; the partner's text for LineOrder.
  std::string replacement;
  std::optional<LineSwap> swap;
};

// Integer literal value arithmetic used by the Number mutator. Returns the
// candidate literals for `lexeme` (decimal, original suffix kept) with no-op
// results removed, or nullopt when the lexeme is not a mutable integer.
std::optional<std::vector<std::string>> NumberCandidates(
    std::string_view lexeme);

// Sites in deterministic (file, offset, kind) order. Functions flagged with
// structural errors contribute nothing.
std::vector<MutationSite> EnumerateSites(const SyntaxIndex& index,
                                         std::string_view source,
                                         const MutatorSet& kinds);

// Returns `text` with `m` applied. Throws kStaleSite when the site's original
// bytes are not at the recorded span.
std::string ApplyMutation(std::string_view text, const Mutation& m);

// Inverse of ApplyMutation. Throws kStaleSite when the replacement is not
// found where ApplyMutation would have put it.
std::string RevertMutation(std::string_view text, const Mutation& m);

// The byte regions of the mutated text that differ from the original.
std::vector<Span> MutatedRegions(const Mutation& m);

}  // namespace crashloc

#endif  // CRASHLOC_MUTATION_H_
