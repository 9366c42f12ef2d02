// SPDX-License-Identifier: Apache-2.0
//
// AST and parser for the XML-like speech grammar dialect:
//
//   <GRAMMAR>
//    <RULE NAME="F_3" TOPLEVEL="ACTIVE">
//     <o> <RULEREF NAME="StartTag"/> </o>
//     <RULEREF NAME="KeyConcept"/>
//     <o> of <o> the </o> </o>
//     ...
//    </RULE>
//    <RULE NAME="KeyConcept">
//     <P> Surrender Value </P>
//     <P> Maturity Value </P>
//    </RULE>
//   </GRAMMAR>
//
// Consecutive <P> children of a body form one alternation group; everything
// else in a body composes in sequence. <o> is an optional, nestable group.
// DonotCare is a builtin rule matching any (possibly empty) word run.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace selfhelp {

inline constexpr std::string_view kWildcardRule = "DonotCare";

class GrammarError : public std::runtime_error {
 public:
  enum class Code {
    MalformedDocument,
    DuplicateRuleName,
    NoToplevelRule,
    MultipleToplevelRules,
    UnresolvedRuleRef,
    RecursiveRule,
  };

  GrammarError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

struct GrammarItem;

struct Words {
  std::vector<std::string> tokens;
  friend bool operator==(const Words&, const Words&) = default;
};

struct RuleRef {
  std::string name;
  friend bool operator==(const RuleRef&, const RuleRef&) = default;
};

struct OptionalGroup {
  std::vector<GrammarItem> body;
  friend bool operator==(const OptionalGroup&, const OptionalGroup&);
};

struct PhraseAlt {
  std::vector<std::vector<std::string>> phrases;
  friend bool operator==(const PhraseAlt&, const PhraseAlt&) = default;
};

struct GrammarItem {
  std::variant<Words, RuleRef, OptionalGroup, PhraseAlt> node;
  friend bool operator==(const GrammarItem&, const GrammarItem&) = default;
};

inline bool operator==(const OptionalGroup& a, const OptionalGroup& b) { return a.body == b.body; }

struct Rule {
  std::string name;
  bool toplevel = false;
  std::vector<GrammarItem> body;
  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Parsed grammar. Exactly one rule is toplevel and no rule shadows the
/// builtin wildcard; reference resolution and cycle checks happen in compile().
struct GrammarAst {
  std::vector<Rule> rules;

  const Rule& toplevel() const;
  const Rule* find(std::string_view name) const;

  friend bool operator==(const GrammarAst&, const GrammarAst&) = default;
};

GrammarAst parse_grammar(std::string_view text);
GrammarAst load_grammar_file(const std::string& path);

}  // namespace selfhelp
