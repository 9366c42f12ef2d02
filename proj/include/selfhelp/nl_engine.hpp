// SPDX-License-Identifier: Apache-2.0
//
// Rule-based natural-language engine: repairs recognizer output against a
// concept lexicon, reduces it to a canonical query frame and validates the
// frame against an intent schema.

#pragma once

#include <map>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

#include "selfhelp/tokens.hpp"

namespace selfhelp {

class KvFile;

class NlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kPolicySlot = "policy_id";

enum class ValueCase { Upper, Lower, AsSpoken };

struct SlotSpec {
  std::string id;
  std::vector<TokenSeq> phrases;
  /// Whole-token, case-insensitive value pattern; when absent the slot's
  /// value is the phrase that mentioned it.
  std::optional<std::string> pattern;
  ValueCase value_case = ValueCase::Upper;

  std::optional<std::string> match_value(const std::string& token) const;

 private:
  friend struct ConceptLexicon;
  std::optional<std::regex> compiled_;
};

struct ConceptLexicon {
  /// intent id -> surface phrases, ordered by intent id.
  std::map<std::string, std::vector<TokenSeq>> key_concepts;
  /// Ordered by slot id.
  std::vector<SlotSpec> key_words;

  /// Compiles patterns and checks invariants. Throws NlError.
  void finalize();
  const SlotSpec* slot(std::string_view id) const;
};

struct IntentSpec {
  std::vector<std::string> required;
  std::vector<std::string> optional;
  std::string answer_template;
  bool needs_agent = false;
};

struct IntentSchema {
  std::map<std::string, IntentSpec> intents;
  const IntentSpec* find(std::string_view id) const;
};

class FrameStatus {
 public:
  enum class Kind { Valid, Invalid, Assumed };

  static FrameStatus valid() { return FrameStatus(Kind::Valid, {}, {}); }
  /// `reason` is one of no_intent, ambiguous_intent, missing_slot:<id>.
  static FrameStatus invalid(std::string reason) { return FrameStatus(Kind::Invalid, std::move(reason), {}); }
  static FrameStatus assumed(std::vector<std::string> slots) { return FrameStatus(Kind::Assumed, {}, std::move(slots)); }

  Kind kind() const { return kind_; }
  const std::string& reason() const { return reason_; }
  const std::vector<std::string>& assumed_slots() const { return assumed_; }
  bool answerable() const { return kind_ != Kind::Invalid; }
  /// Valid, Invalid(<reason>) or Assumed(<slot>,...).
  std::string str() const;

  friend bool operator==(const FrameStatus&, const FrameStatus&) = default;

 private:
  FrameStatus(Kind k, std::string reason, std::vector<std::string> assumed)
      : kind_(k), reason_(std::move(reason)), assumed_(std::move(assumed)) {}
  Kind kind_;
  std::string reason_;
  std::vector<std::string> assumed_;
};

/// Canonical query. Equality compares intent, slots and status; `source`
/// only records the corrected word sequence the frame came from.
struct QueryFrame {
  std::optional<std::string> intent;
  std::map<std::string, std::string> slots;
  FrameStatus status = FrameStatus::invalid("no_intent");
  TokenSeq source;

  /// e.g. "surrender_value(policy_id=TRS1027465) Valid".
  std::string str() const;

  friend bool operator==(const QueryFrame& a, const QueryFrame& b) {
    return a.intent == b.intent && a.slots == b.slots && a.status == b.status;
  }
};

struct AgentContext {
  std::string agent_id;
  std::vector<std::string> owned_policies;
  std::optional<std::string> last_commission_ref;
};

/// Lexicon, schema and intent bookkeeping loaded from one file.
struct Domain {
  ConceptLexicon lexicon;
  IntentSchema schema;
};

/// Sections: [intent:<id>] phrases, required, optional, template, context;
/// [slot:<id>] phrases, pattern, value_case. Lists use '|' between phrases
/// and ',' between ids. Throws ConfigError or NlError.
Domain load_domain(const KvFile& file);
Domain load_domain_file(const std::string& path);

inline constexpr std::size_t kDefaultMaxEdit = 2;

/// Replaces word spans within character edit distance `max_edit` of a
/// lexicon phrase with that phrase. Scans left to right; at each position
/// the longest span wins, then the lowest distance, then the earliest
/// intent id (concept phrases precede slot phrases). A span is skipped when
/// dropping its first or last word brings it strictly closer to the phrase.
/// Scans repeat until the output is stable, so correct is idempotent.
TokenSeq correct(const TokenSeq& observed, const ConceptLexicon& lex, std::size_t max_edit = kDefaultMaxEdit);

/// Finds the key concept and slot values anywhere in the sequence, then
/// validates. Invalid(no_intent) without a concept, Invalid(ambiguous_intent)
/// with two or more distinct ones.
QueryFrame extract_frame(const TokenSeq& corrected, const ConceptLexicon& lex, const IntentSchema& schema);

/// Valid iff all required slots are present, else Invalid(missing_slot:<first
/// missing>). Frames without an intent pass through. Assumed frames that are
/// complete stay Assumed. Throws NlError for an intent missing from the schema.
QueryFrame validate_frame(QueryFrame f, const IntentSchema& schema);

/// Fills a missing policy_id when the caller owns exactly one policy.
QueryFrame fill_assumptions(QueryFrame f, const AgentContext& ctx);

/// correct, extract_frame, then fill_assumptions when a slot is missing.
QueryFrame understand(const TokenSeq& recognized, const Domain& domain, const AgentContext& ctx,
                      std::size_t max_edit = kDefaultMaxEdit);

}  // namespace selfhelp
