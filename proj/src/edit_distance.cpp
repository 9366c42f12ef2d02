// SPDX-License-Identifier: Apache-2.0

#include "selfhelp/edit_distance.hpp"

namespace selfhelp {

std::size_t word_edit_distance(const TokenSeq& a, const TokenSeq& b) {
  return levenshtein(a.tokens(), b.tokens());
}

std::size_t char_edit_distance(std::string_view a, std::string_view b) { return levenshtein(a, b); }

}  // namespace selfhelp
