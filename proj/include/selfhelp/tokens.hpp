// SPDX-License-Identifier: Apache-2.0
//
// Word-level token sequences shared by the grammar, recognizer and NL stages.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace selfhelp {

/// An ordered list of normalized words: lowercase, no empty tokens and no
/// whitespace inside a token. Used for the true query, the recognized query
/// and the NL-corrected query alike.
class TokenSeq {
 public:
  TokenSeq() = default;

  /// Wraps already-normalized tokens. Throws std::invalid_argument when a
  /// token is empty or contains whitespace.
  explicit TokenSeq(std::vector<std::string> tokens);

  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens_[i]; }

  auto begin() const { return tokens_.begin(); }
  auto end() const { return tokens_.end(); }

  /// Space-joined rendering.
  std::string str() const;

  friend bool operator==(const TokenSeq&, const TokenSeq&) = default;
  friend auto operator<=>(const TokenSeq&, const TokenSeq&) = default;

 private:
  std::vector<std::string> tokens_;
};

/// Lowercases, splits on whitespace and strips punctuation from both ends of
/// every word. Internal punctuation survives ("what's", "trs-1027465").
TokenSeq tokenize(std::string_view text);

/// True for the ordering used by enumeration: shorter first, then
/// lexicographic token by token.
bool shortlex_less(const TokenSeq& a, const TokenSeq& b);

}  // namespace selfhelp
