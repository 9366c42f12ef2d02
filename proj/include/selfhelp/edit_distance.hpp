// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <string_view>
#include <vector>

#include "selfhelp/tokens.hpp"

namespace selfhelp {

/// Unit-cost Levenshtein distance over any two random-access sequences.
template <class SeqA, class SeqB>
std::size_t levenshtein(const SeqA& a, const SeqB& b) {
  const std::size_t n = std::size(a), m = std::size(b);
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

/// d(a, b): word-level Levenshtein distance with unit costs.
std::size_t word_edit_distance(const TokenSeq& a, const TokenSeq& b);

/// Character-level Levenshtein distance with unit costs.
std::size_t char_edit_distance(std::string_view a, std::string_view b);

}  // namespace selfhelp
