// SPDX-License-Identifier: Apache-2.0

#include "selfhelp/automaton.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace selfhelp {

namespace {

using Label = WordAutomaton::Label;
constexpr Label kEpsilon = -2;
constexpr Label kWildcard = WordAutomaton::kWildcard;

// Working representation for construction passes. May hold epsilon arcs and
// be nondeterministic.
struct Graph {
  std::int32_t start = 0;
  std::vector<bool> final;
  std::vector<std::vector<std::pair<Label, std::int32_t>>> out;

  std::int32_t add_state() {
    final.push_back(false);
    out.emplace_back();
    return static_cast<std::int32_t>(final.size() - 1);
  }
  void add_arc(std::int32_t from, Label label, std::int32_t to) { out[from].emplace_back(label, to); }
  std::size_t size() const { return final.size(); }
};

// Kahn's algorithm; empty result when the graph has a cycle.
std::vector<std::int32_t> topological_order(const Graph& g) {
  std::vector<int> indeg(g.size(), 0);
  for (const auto& arcs : g.out)
    for (auto [l, t] : arcs) ++indeg[t];
  std::vector<std::int32_t> order;
  std::vector<std::int32_t> ready;
  for (std::size_t s = 0; s < g.size(); ++s)
    if (indeg[s] == 0) ready.push_back(static_cast<std::int32_t>(s));
  while (!ready.empty()) {
    auto s = ready.back();
    ready.pop_back();
    order.push_back(s);
    for (auto [l, t] : g.out[s])
      if (--indeg[t] == 0) ready.push_back(t);
  }
  if (order.size() != g.size()) return {};
  return order;
}

// Subset construction. Epsilon arcs, and wildcard arcs when
// `wildcard_as_epsilon`, are followed by closure.
Graph determinize(const Graph& g, bool wildcard_as_epsilon) {
  auto silent = [&](Label l) { return l == kEpsilon || (wildcard_as_epsilon && l == kWildcard); };
  auto closure = [&](std::vector<std::int32_t> seed) {
    std::set<std::int32_t> set(seed.begin(), seed.end());
    while (!seed.empty()) {
      auto s = seed.back();
      seed.pop_back();
      for (auto [l, t] : g.out[s])
        if (silent(l) && set.insert(t).second) seed.push_back(t);
    }
    return std::vector<std::int32_t>(set.begin(), set.end());
  };

  Graph d;
  std::map<std::vector<std::int32_t>, std::int32_t> ids;
  std::vector<std::vector<std::int32_t>> pending;
  auto intern = [&](std::vector<std::int32_t> set) {
    auto [it, fresh] = ids.emplace(set, static_cast<std::int32_t>(d.size()));
    if (fresh) {
      d.add_state();
      d.final[it->second] = std::any_of(set.begin(), set.end(), [&](auto s) { return g.final[s]; });
      pending.push_back(std::move(set));
    }
    return it->second;
  };
  d.start = intern(closure({g.start}));
  while (!pending.empty()) {
    auto set = std::move(pending.back());
    pending.pop_back();
    auto from = ids.at(set);
    std::map<Label, std::vector<std::int32_t>> moves;
    for (auto s : set)
      for (auto [l, t] : g.out[s])
        if (!silent(l)) moves[l].push_back(t);
    for (auto& [l, targets] : moves) {
      auto to = intern(closure(std::move(targets)));
      d.add_arc(from, l, to);
    }
  }
  return d;
}

// Drops states that are unreachable or cannot reach a final state, renumbers
// topologically with the start state first, and sorts arcs by label. An empty
// language yields a lone non-final start state.
Graph trim(const Graph& g) {
  std::vector<bool> reach(g.size(), false), coreach(g.size(), false);
  std::vector<std::int32_t> stack{g.start};
  reach[g.start] = true;
  while (!stack.empty()) {
    auto s = stack.back();
    stack.pop_back();
    for (auto [l, t] : g.out[s])
      if (!reach[t]) reach[t] = true, stack.push_back(t);
  }
  auto order = topological_order(g);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    auto s = *it;
    if (g.final[s]) coreach[s] = true;
    for (auto [l, t] : g.out[s])
      if (coreach[t]) coreach[s] = true;
  }

  Graph out;
  if (!coreach[g.start]) {
    out.start = out.add_state();
    return out;
  }
  std::vector<std::int32_t> remap(g.size(), -1);
  for (auto s : order)
    if (reach[s] && coreach[s]) remap[s] = out.add_state();
  out.start = remap[g.start];
  for (auto s : order) {
    if (remap[s] < 0) continue;
    out.final[remap[s]] = g.final[s];
    for (auto [l, t] : g.out[s])
      if (remap[t] >= 0) out.add_arc(remap[s], l, remap[t]);
    std::sort(out.out[remap[s]].begin(), out.out[remap[s]].end());
  }
  return out;
}

Graph to_graph(const WordAutomaton& a) {
  Graph g;
  for (std::size_t s = 0; s < a.num_states(); ++s) g.add_state();
  g.start = a.start();
  for (std::int32_t s = 0; s < static_cast<std::int32_t>(a.num_states()); ++s) {
    g.final[s] = a.is_final(s);
    for (auto arc : a.arcs(s)) g.add_arc(s, arc.label, arc.target);
  }
  return g;
}

// Deterministic trimmed graph whose paths are exactly the distinct strings of
// the language under `policy`.
Graph language_dfa(const WordAutomaton& a, WildcardPolicy policy) {
  Graph g = to_graph(a);
  if (policy == WildcardPolicy::EmitMarker || !a.has_wildcard()) return g;
  return trim(determinize(g, true));
}

std::uint64_t saturating_add(std::uint64_t x, std::uint64_t y) {
  return x > std::numeric_limits<std::uint64_t>::max() - y ? std::numeric_limits<std::uint64_t>::max() : x + y;
}

std::uint64_t count_paths(const Graph& g) {
  // Trimmed graphs are numbered topologically, so a reverse sweep suffices.
  std::vector<std::uint64_t> count(g.size(), 0);
  for (auto s = static_cast<std::int64_t>(g.size()) - 1; s >= 0; --s) {
    std::uint64_t c = g.final[s] ? 1 : 0;
    for (auto [l, t] : g.out[s]) c = saturating_add(c, count[t]);
    count[s] = c;
  }
  return count[g.start];
}

class GrammarCompiler {
 public:
  explicit GrammarCompiler(const GrammarAst& ast) : ast_(ast) {}

  WordAutomaton run() {
    check_references();
    std::set<std::string> words;
    for (const auto& r : ast_.rules) collect_words(r.body, words);
    vocab_.assign(words.begin(), words.end());

    const Rule& top = ast_.toplevel();
    g_.start = g_.add_state();
    auto end = build(top.body, g_.start);
    g_.final[end] = true;

    Graph dfa = trim(determinize(g_, false));
    std::vector<std::int32_t> finals;
    std::vector<WordAutomaton::RawArc> arcs;
    for (std::int32_t s = 0; s < static_cast<std::int32_t>(dfa.size()); ++s) {
      if (dfa.final[s]) finals.push_back(s);
      for (auto [l, t] : dfa.out[s]) arcs.push_back({s, l, t});
    }
    return WordAutomaton(std::move(vocab_), static_cast<std::int32_t>(dfa.size()), dfa.start, finals, arcs);
  }

 private:
  void check_references() const {
    enum class Mark { None, Active, Done };
    std::map<std::string, Mark> mark;
    std::function<void(const Rule&)> visit;
    std::function<void(const Rule&, const std::vector<GrammarItem>&)> scan = [&](const Rule& owner,
                                                                               const std::vector<GrammarItem>& body) {
      for (const auto& item : body) {
        if (auto* ref = std::get_if<RuleRef>(&item.node)) {
          if (ref->name == kWildcardRule) continue;
          const Rule* target = ast_.find(ref->name);
          if (!target)
            throw GrammarError(GrammarError::Code::UnresolvedRuleRef,
                               "rule " + owner.name + " references undefined rule " + ref->name);
          if (mark[target->name] == Mark::Active)
            throw GrammarError(GrammarError::Code::RecursiveRule,
                               "rule " + target->name + " is recursive (reached from " + owner.name + ")");
          visit(*target);
        } else if (auto* opt = std::get_if<OptionalGroup>(&item.node)) {
          scan(owner, opt->body);
        }
      }
    };
    visit = [&](const Rule& r) {
      if (mark[r.name] == Mark::Done) return;
      mark[r.name] = Mark::Active;
      scan(r, r.body);
      mark[r.name] = Mark::Done;
    };
    for (const auto& r : ast_.rules) visit(r);
  }

  static void collect_words(const std::vector<GrammarItem>& body, std::set<std::string>& words) {
    for (const auto& item : body) {
      std::visit(
          [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Words>) {
              words.insert(n.tokens.begin(), n.tokens.end());
            } else if constexpr (std::is_same_v<T, PhraseAlt>) {
              for (const auto& p : n.phrases) words.insert(p.begin(), p.end());
            } else if constexpr (std::is_same_v<T, OptionalGroup>) {
              collect_words(n.body, words);
            }
          },
          item.node);
    }
  }

  Label label_of(const std::string& w) const {
    auto it = std::lower_bound(vocab_.begin(), vocab_.end(), w);
    return static_cast<Label>(it - vocab_.begin());
  }

  std::int32_t chain(const std::vector<std::string>& tokens, std::int32_t from) {
    for (const auto& w : tokens) {
      auto next = g_.add_state();
      g_.add_arc(from, label_of(w), next);
      from = next;
    }
    return from;
  }

  // Appends the fragment for `body` at `from` and returns its exit state.
  std::int32_t build(const std::vector<GrammarItem>& body, std::int32_t from) {
    for (const auto& item : body) {
      std::visit(
          [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Words>) {
              from = chain(n.tokens, from);
            } else if constexpr (std::is_same_v<T, RuleRef>) {
              if (n.name == kWildcardRule) {
                auto next = g_.add_state();
                g_.add_arc(from, kWildcard, next);
                from = next;
              } else {
                from = build(ast_.find(n.name)->body, from);
              }
            } else if constexpr (std::is_same_v<T, OptionalGroup>) {
              auto exit = build(n.body, from);
              g_.add_arc(from, kEpsilon, exit);
              from = exit;
            } else {
              auto exit = g_.add_state();
              for (const auto& p : n.phrases) g_.add_arc(chain(p, from), kEpsilon, exit);
              from = exit;
            }
          },
          item.node);
    }
    return from;
  }

  const GrammarAst& ast_;
  std::vector<std::string> vocab_;
  Graph g_;
};

}  // namespace

WordAutomaton::WordAutomaton(std::vector<std::string> vocab, std::int32_t num_states, std::int32_t start,
                             const std::vector<std::int32_t>& finals, const std::vector<RawArc>& arcs) {
  if (num_states <= 0 || start < 0 || start >= num_states)
    throw std::invalid_argument("WordAutomaton: start state out of range");

  // Relabel so vocabulary ids follow lexicographic order.
  std::vector<std::string> sorted = vocab;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<Label> relabel(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i)
    relabel[i] = static_cast<Label>(std::lower_bound(sorted.begin(), sorted.end(), vocab[i]) - sorted.begin());

  Graph g;
  for (std::int32_t s = 0; s < num_states; ++s) g.add_state();
  g.start = start;
  for (auto f : finals) {
    if (f < 0 || f >= num_states) throw std::invalid_argument("WordAutomaton: final state out of range");
    g.final[f] = true;
  }
  for (const auto& a : arcs) {
    if (a.from < 0 || a.from >= num_states || a.to < 0 || a.to >= num_states)
      throw std::invalid_argument("WordAutomaton: arc state out of range");
    if (a.label != kWildcard && (a.label < 0 || static_cast<std::size_t>(a.label) >= vocab.size()))
      throw std::invalid_argument("WordAutomaton: arc label out of range");
    g.add_arc(a.from, a.label == kWildcard ? kWildcard : relabel[a.label], a.to);
  }
  if (topological_order(g).empty()) throw std::invalid_argument("WordAutomaton: automaton is cyclic");

  Graph d = trim(determinize(g, false));
  // trim() numbers states topologically; make the start state id 0.
  if (d.start != 0) throw std::logic_error("WordAutomaton: start state is not first in topological order");

  vocab_ = std::move(sorted);
  final_ = d.final;
  offsets_.assign(d.size() + 1, 0);
  for (std::size_t s = 0; s < d.size(); ++s) {
    offsets_[s + 1] = offsets_[s] + d.out[s].size();
    for (auto [l, t] : d.out[s]) {
      arcs_.push_back({l, t});
      if (l == kWildcard) has_wildcard_ = true;
    }
  }
}

std::span<const WordAutomaton::Arc> WordAutomaton::arcs(std::int32_t s) const {
  auto b = offsets_[static_cast<std::size_t>(s)], e = offsets_[static_cast<std::size_t>(s) + 1];
  return std::span<const Arc>(arcs_.data() + b, e - b);
}

std::optional<WordAutomaton::Label> WordAutomaton::find_word(std::string_view w) const {
  auto it = std::lower_bound(vocab_.begin(), vocab_.end(), w);
  if (it == vocab_.end() || *it != w) return std::nullopt;
  return static_cast<Label>(it - vocab_.begin());
}

bool WordAutomaton::empty_language() const {
  return num_states() == 1 && !final_[0] && arcs_.empty();
}

WordAutomaton compile(const GrammarAst& ast) { return GrammarCompiler(ast).run(); }

std::uint64_t count_language(const WordAutomaton& a, WildcardPolicy policy) {
  return count_paths(language_dfa(a, policy));
}

Enumeration enumerate_language(const WordAutomaton& a, WildcardPolicy policy, std::size_t limit) {
  if (limit == 0) throw std::invalid_argument("enumerate_language: limit must be positive");
  Graph d = language_dfa(a, policy);

  // finish[s][k]: some path of exactly k arcs leads from s to a final state.
  std::size_t longest = 0;
  std::vector<std::vector<bool>> finish(d.size());
  for (auto s = static_cast<std::int64_t>(d.size()) - 1; s >= 0; --s) {
    auto& row = finish[s];
    if (d.final[s]) row.assign(1, true);
    for (auto [l, t] : d.out[s]) {
      const auto& next = finish[t];
      if (row.size() < next.size() + 1) row.resize(next.size() + 1, false);
      for (std::size_t k = 0; k < next.size(); ++k)
        if (next[k]) row[k + 1] = true;
    }
    longest = std::max(longest, row.size());
  }

  auto token = [&](Label l) -> std::string {
    return l == kWildcard ? std::string(kWildcardMarker) : a.word(l);
  };

  Enumeration out;
  std::vector<std::string> prefix;
  std::function<bool(std::int32_t, std::size_t)> walk = [&](std::int32_t s, std::size_t remaining) {
    if (remaining == 0) {
      out.strings.emplace_back(prefix);
      return out.strings.size() < limit;
    }
    for (auto [l, t] : d.out[s]) {
      const auto& row = finish[t];
      if (remaining - 1 >= row.size() || !row[remaining - 1]) continue;
      prefix.push_back(token(l));
      bool more = walk(t, remaining - 1);
      prefix.pop_back();
      if (!more) return false;
    }
    return true;
  };

  const auto& start_row = finish[d.start];
  for (std::size_t len = 0; len < longest; ++len) {
    if (len >= start_row.size() || !start_row[len]) continue;
    if (!walk(d.start, len)) break;
  }
  out.truncated = count_paths(d) > out.strings.size();
  return out;
}

bool matches(const WordAutomaton& a, const TokenSeq& s) {
  const std::size_t n = s.size();
  const std::size_t states = a.num_states();
  // reach[i][q]: q is reachable after consuming the first i tokens.
  std::vector<std::vector<bool>> reach(n + 1, std::vector<bool>(states, false));
  std::vector<std::optional<WordAutomaton::Label>> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = a.find_word(s[i]);

  reach[0][a.start()] = true;
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::int32_t q = 0; q < static_cast<std::int32_t>(states); ++q) {
      if (!reach[i][q]) continue;
      for (auto arc : a.arcs(q)) {
        if (arc.label == WordAutomaton::kWildcard) {
          for (std::size_t j = i; j <= n; ++j) reach[j][arc.target] = true;
        } else if (i < n && labels[i] && *labels[i] == arc.label) {
          reach[i + 1][arc.target] = true;
        }
      }
    }
  }
  for (std::int32_t q = 0; q < static_cast<std::int32_t>(states); ++q)
    if (reach[n][q] && a.is_final(q)) return true;
  return false;
}

}  // namespace selfhelp
