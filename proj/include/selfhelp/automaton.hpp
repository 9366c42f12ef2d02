// SPDX-License-Identifier: Apache-2.0
//
// Word-level acyclic automata compiled from grammars, and the language
// operations over them.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "selfhelp/grammar.hpp"
#include "selfhelp/tokens.hpp"

namespace selfhelp {

/// Display token for a wildcard position under WildcardPolicy::EmitMarker.
inline constexpr std::string_view kWildcardMarker = "*";

enum class WildcardPolicy {
  CollapseToEpsilon,  // a wildcard contributes nothing
  EmitMarker,         // a wildcard contributes one kWildcardMarker token
};

/// Deterministic, trimmed, acyclic automaton over words plus a wildcard
/// label. A wildcard arc consumes any run of words, including none. States
/// are numbered in topological order: every arc goes from a lower to a
/// higher state id. Immutable after construction.
class WordAutomaton {
 public:
  using Label = std::int32_t;
  static constexpr Label kWildcard = -1;

  struct Arc {
    Label label;
    std::int32_t target;
  };

  struct RawArc {
    std::int32_t from;
    Label label;
    std::int32_t to;
  };

  /// Builds from an arbitrary epsilon-free acyclic NFA: `labels` index into
  /// `vocab`, kWildcard marks wildcard arcs. The result is determinized,
  /// trimmed and topologically renumbered. Throws std::invalid_argument on a
  /// cycle or an out-of-range id.
  WordAutomaton(std::vector<std::string> vocab, std::int32_t num_states, std::int32_t start,
                const std::vector<std::int32_t>& finals, const std::vector<RawArc>& arcs);

  std::size_t num_states() const { return final_.size(); }
  std::int32_t start() const { return 0; }
  bool is_final(std::int32_t s) const { return final_[static_cast<std::size_t>(s)]; }
  std::span<const Arc> arcs(std::int32_t s) const;
  std::size_t num_arcs() const { return arcs_.size(); }

  /// Word for a non-wildcard label. Vocabulary ids follow lexicographic order.
  const std::string& word(Label label) const { return vocab_[static_cast<std::size_t>(label)]; }
  std::optional<Label> find_word(std::string_view w) const;
  bool has_wildcard() const { return has_wildcard_; }
  bool empty_language() const;

 private:
  std::vector<std::string> vocab_;
  std::vector<bool> final_;
  std::vector<std::size_t> offsets_;  // num_states + 1
  std::vector<Arc> arcs_;
  bool has_wildcard_ = false;
};

/// Compiles the toplevel rule. Throws GrammarError (UnresolvedRuleRef,
/// RecursiveRule).
WordAutomaton compile(const GrammarAst& ast);

struct Enumeration {
  std::vector<TokenSeq> strings;
  bool truncated = false;
};

/// Distinct strings in (length, lexicographic) order, at most `limit` of them.
Enumeration enumerate_language(const WordAutomaton& a, WildcardPolicy policy, std::size_t limit);

/// Number of distinct strings, by path counting. Saturates at UINT64_MAX.
std::uint64_t count_language(const WordAutomaton& a, WildcardPolicy policy = WildcardPolicy::CollapseToEpsilon);

/// Membership with wildcards matching any (possibly empty) word run.
bool matches(const WordAutomaton& a, const TokenSeq& s);

}  // namespace selfhelp
