// SPDX-License-Identifier: Apache-2.0
//
// Reference implementations used only by the tests. Each one is written
// from the definition rather than from the library code it checks.

#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "selfhelp/grammar.hpp"
#include "selfhelp/tokens.hpp"

namespace oracle {

using Str = std::vector<std::string>;
using Lang = std::set<Str>;

inline const std::string kStar = "*";

inline Lang concat(const Lang& a, const Lang& b) {
  Lang out;
  for (const auto& x : a)
    for (const auto& y : b) {
      Str s = x;
      s.insert(s.end(), y.begin(), y.end());
      out.insert(std::move(s));
    }
  return out;
}

// Recursive expansion of an AST. With `marker`, every wildcard reference
// becomes one "*" token; otherwise it becomes the empty string.
class Expander {
 public:
  Expander(const selfhelp::GrammarAst& ast, bool marker) : ast_(ast), marker_(marker) {}

  Lang toplevel() { return body(ast_.toplevel().body); }

 private:
  Lang body(const std::vector<selfhelp::GrammarItem>& items) {
    Lang acc{Str{}};
    for (const auto& it : items) acc = concat(acc, item(it));
    return acc;
  }

  Lang item(const selfhelp::GrammarItem& it) {
    if (auto* w = std::get_if<selfhelp::Words>(&it.node)) return {w->tokens};
    if (auto* r = std::get_if<selfhelp::RuleRef>(&it.node)) {
      if (r->name == selfhelp::kWildcardRule) return marker_ ? Lang{Str{kStar}} : Lang{Str{}};
      return body(ast_.find(r->name)->body);
    }
    if (auto* o = std::get_if<selfhelp::OptionalGroup>(&it.node)) {
      Lang l = body(o->body);
      l.insert(Str{});
      return l;
    }
    const auto& alt = std::get<selfhelp::PhraseAlt>(it.node);
    return Lang(alt.phrases.begin(), alt.phrases.end());
  }

  const selfhelp::GrammarAst& ast_;
  bool marker_;
};

inline Lang expand(const selfhelp::GrammarAst& ast, bool marker = false) { return Expander(ast, marker).toplevel(); }

// Glob match: "*" in the pattern matches any run of words.
inline bool glob(const Str& pat, std::size_t p, const Str& s, std::size_t i) {
  if (p == pat.size()) return i == s.size();
  if (pat[p] == kStar) {
    for (std::size_t j = i; j <= s.size(); ++j)
      if (glob(pat, p + 1, s, j)) return true;
    return false;
  }
  return i < s.size() && pat[p] == s[i] && glob(pat, p + 1, s, i + 1);
}

inline bool in_language(const Lang& marker_lang, const Str& s) {
  return std::any_of(marker_lang.begin(), marker_lang.end(), [&](const Str& p) { return glob(p, 0, s, 0); });
}

// Shortlex order as defined: shorter first, then lexicographic.
inline bool shortlex(const Str& a, const Str& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

// Edit distance as the length of a shortest path in the graph whose
// vertices are sequences and whose edges are single insertions, deletions
// and substitutions drawn from `alphabet`. Returns distances from `from` to
// every sequence of length <= max_len.
template <class Seq>
std::map<Seq, std::size_t> bfs_distances(const Seq& from, const std::vector<typename Seq::value_type>& alphabet,
                                         std::size_t max_len) {
  std::map<Seq, std::size_t> dist{{from, 0}};
  std::deque<Seq> queue{from};
  while (!queue.empty()) {
    Seq cur = queue.front();
    queue.pop_front();
    std::size_t d = dist[cur];
    std::vector<Seq> next;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      Seq del = cur;
      del.erase(del.begin() + static_cast<std::ptrdiff_t>(i));
      next.push_back(del);
      for (const auto& c : alphabet) {
        if (c == cur[i]) continue;
        Seq sub = cur;
        sub[i] = c;
        next.push_back(sub);
      }
    }
    if (cur.size() < max_len)
      for (std::size_t i = 0; i <= cur.size(); ++i)
        for (const auto& c : alphabet) {
          Seq ins = cur;
          ins.insert(ins.begin() + static_cast<std::ptrdiff_t>(i), c);
          next.push_back(ins);
        }
    for (auto& n : next)
      if (dist.emplace(n, d + 1).second) queue.push_back(std::move(n));
  }
  return dist;
}

// Direct exhaustive recursion over the three edit operations.
inline std::size_t naive_distance(const Str& a, std::size_t i, const Str& b, std::size_t j) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  if (a[i] == b[j]) return naive_distance(a, i + 1, b, j + 1);
  return 1 + std::min({naive_distance(a, i + 1, b, j + 1), naive_distance(a, i + 1, b, j),
                       naive_distance(a, i, b, j + 1)});
}

inline std::size_t naive_distance(const Str& a, const Str& b) { return naive_distance(a, 0, b, 0); }

inline Str words(const selfhelp::TokenSeq& t) { return t.tokens(); }

}  // namespace oracle
