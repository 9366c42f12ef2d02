// SPDX-License-Identifier: Apache-2.0
//
// Simulated speech recognition front end: a seeded word-level noise channel
// followed by minimum-edit-distance decoding against a grammar automaton.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "selfhelp/automaton.hpp"
#include "selfhelp/tokens.hpp"

namespace selfhelp {

/// Grammar strictness of the front end: F1 has no grammar, F2 a liberal
/// keyword-spotting grammar, F3 a constrained one.
enum class Mode { F1, F2, F3 };

std::string to_string(Mode m);
/// Accepts "f1"/"F1" etc. Throws std::invalid_argument otherwise.
Mode parse_mode(std::string_view s);
inline constexpr Mode kAllModes[] = {Mode::F1, Mode::F2, Mode::F3};

class NoiseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ConfusionTable = std::map<std::string, std::vector<std::string>>;

struct NoiseModel {
  double p_sub = 0.0;
  double p_del = 0.0;
  double p_ins = 0.0;
  ConfusionTable confusions;
  std::vector<std::string> vocab;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument unless 0 <= p_sub + p_del <= 1 and
  /// 0 <= p_ins <= 1.
  void validate() const;
};

/// Reads `word<TAB>confusable[,confusable...]` lines; '#' starts a comment.
ConfusionTable load_confusion_table(const std::string& path);

/// Per word: deleted with p_del, else substituted with p_sub (from the
/// confusion table when the word has an entry, else uniformly from vocab);
/// after every position a uniform vocab word is inserted with p_ins.
/// Identical (truth, model) gives identical output. Throws NoiseError when a
/// substitution or insertion is drawn and there is no candidate word.
TokenSeq apply_noise(const TokenSeq& truth, const NoiseModel& nm);

/// Maximum accepted decode cost.
class RejectThreshold {
 public:
  /// ceil(|observed| / 2).
  static RejectThreshold automatic() { return RejectThreshold(Kind::Auto, 0); }
  static RejectThreshold fixed(std::size_t cost) { return RejectThreshold(Kind::Fixed, cost); }
  static RejectThreshold unbounded() { return RejectThreshold(Kind::Unbounded, 0); }

  /// nullopt means no limit.
  std::optional<std::size_t> resolve(std::size_t observed_len) const;
  std::string str() const;
  /// "auto", "inf" or a non-negative integer.
  static RejectThreshold parse(std::string_view s);

  friend bool operator==(const RejectThreshold&, const RejectThreshold&) = default;

 private:
  enum class Kind { Auto, Fixed, Unbounded };
  RejectThreshold(Kind k, std::size_t v) : kind_(k), value_(v) {}
  Kind kind_;
  std::size_t value_;
};

struct RecognitionResult {
  TokenSeq observed;               // channel output fed to the decoder
  TokenSeq hypothesis;             // empty when rejected
  std::optional<std::size_t> cost; // absent when rejected
  bool accepted = false;
  std::optional<Mode> mode;        // set by recognize()
};

/// Finds the grammar string closest to `observed` in word edit distance.
/// Wildcard arcs absorb any run of observed words at zero cost and copy them
/// into the hypothesis. Ties go to the shorter, then lexicographically
/// smaller hypothesis.
RecognitionResult decode(const WordAutomaton& a, const TokenSeq& observed,
                         RejectThreshold threshold = RejectThreshold::automatic());

using GrammarSet = std::map<Mode, WordAutomaton>;

/// The pure-wildcard grammar used for F1.
WordAutomaton wildcard_automaton();

/// Noise then decode with the grammar loaded for `mode`. Throws
/// std::out_of_range when no grammar is loaded for the mode.
RecognitionResult recognize(Mode mode, const GrammarSet& grammars, const TokenSeq& truth, const NoiseModel& nm,
                            RejectThreshold threshold = RejectThreshold::automatic());

}  // namespace selfhelp
