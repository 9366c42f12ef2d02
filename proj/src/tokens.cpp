// SPDX-License-Identifier: Apache-2.0

#include "selfhelp/tokens.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace selfhelp {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

}  // namespace

TokenSeq::TokenSeq(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (const auto& t : tokens_) {
    if (t.empty()) throw std::invalid_argument("TokenSeq: empty token");
    if (std::any_of(t.begin(), t.end(), is_space))
      throw std::invalid_argument("TokenSeq: whitespace inside token '" + t + "'");
  }
}

std::string TokenSeq::str() const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i) out += ' ';
    out += tokens_[i];
  }
  return out;
}

TokenSeq tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    std::size_t b = i, e = j;
    while (b < e && is_punct(text[b])) ++b;
    while (e > b && is_punct(text[e - 1])) --e;
    if (b < e) {
      std::string word(text.substr(b, e - b));
      std::transform(word.begin(), word.end(), word.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      out.push_back(std::move(word));
    }
    i = j;
  }
  return TokenSeq(std::move(out));
}

bool shortlex_less(const TokenSeq& a, const TokenSeq& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.tokens() < b.tokens();
}

}  // namespace selfhelp
