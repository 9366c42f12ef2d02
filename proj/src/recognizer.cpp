// SPDX-License-Identifier: Apache-2.0

#include "selfhelp/recognizer.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string_view>

namespace selfhelp {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::F1: return "F1";
    case Mode::F2: return "F2";
    case Mode::F3: return "F3";
  }
  return "?";
}

Mode parse_mode(std::string_view s) {
  if (s == "f1" || s == "F1") return Mode::F1;
  if (s == "f2" || s == "F2") return Mode::F2;
  if (s == "f3" || s == "F3") return Mode::F3;
  throw std::invalid_argument("unknown recognizer mode '" + std::string(s) + "' (expected f1, f2 or f3)");
}

void NoiseModel::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(p_sub) || !prob(p_del) || !prob(p_sub + p_del))
    throw std::invalid_argument("noise model: need 0 <= p_sub, p_del and p_sub + p_del <= 1");
  if (!prob(p_ins)) throw std::invalid_argument("noise model: need 0 <= p_ins <= 1");
}

ConfusionTable load_confusion_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open confusion table " + path);
  ConfusionTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (tokenize(line).empty()) continue;
    auto tab = line.find('\t');
    auto where = path + ":" + std::to_string(lineno);
    if (tab == std::string::npos) throw std::runtime_error(where + ": expected word<TAB>confusables");
    auto word = tokenize(line.substr(0, tab));
    if (word.size() != 1) throw std::runtime_error(where + ": left column must be a single word");
    auto& entry = table[word[0]];
    std::stringstream rest(line.substr(tab + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      auto c = tokenize(item);
      if (c.size() != 1) throw std::runtime_error(where + ": confusable '" + item + "' must be a single word");
      entry.push_back(c[0]);
    }
    if (entry.empty()) throw std::runtime_error(where + ": no confusables for '" + word[0] + "'");
  }
  return table;
}

namespace {

// Portable draws from a standardized engine; the std distributions are
// implementation-defined.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

const std::string& pick(std::mt19937_64& rng, const std::vector<std::string>& from) {
  return from[static_cast<std::size_t>(rng() % from.size())];
}

}  // namespace

TokenSeq apply_noise(const TokenSeq& truth, const NoiseModel& nm) {
  nm.validate();
  std::mt19937_64 rng(nm.seed);
  std::vector<std::string> out;
  auto from_vocab = [&](const char* why) -> const std::string& {
    if (nm.vocab.empty()) throw NoiseError(std::string("empty noise vocabulary: cannot draw ") + why);
    return pick(rng, nm.vocab);
  };
  for (const auto& word : truth) {
    double u = unit(rng);
    if (u < nm.p_del) {
      // deleted
    } else if (u < nm.p_del + nm.p_sub) {
      auto it = nm.confusions.find(word);
      out.push_back(it != nm.confusions.end() && !it->second.empty() ? pick(rng, it->second)
                                                                      : from_vocab("a substitution"));
    } else {
      out.push_back(word);
    }
    if (unit(rng) < nm.p_ins) out.push_back(from_vocab("an insertion"));
  }
  return TokenSeq(std::move(out));
}

std::optional<std::size_t> RejectThreshold::resolve(std::size_t observed_len) const {
  switch (kind_) {
    case Kind::Auto: return (observed_len + 1) / 2;
    case Kind::Fixed: return value_;
    case Kind::Unbounded: return std::nullopt;
  }
  return std::nullopt;
}

std::string RejectThreshold::str() const {
  switch (kind_) {
    case Kind::Auto: return "auto";
    case Kind::Unbounded: return "inf";
    case Kind::Fixed: return std::to_string(value_);
  }
  return "?";
}

RejectThreshold RejectThreshold::parse(std::string_view s) {
  if (s == "auto") return automatic();
  if (s == "inf" || s == "unbounded") return unbounded();
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument("reject threshold must be auto, inf or a non-negative integer, got '" +
                                std::string(s) + "'");
  return fixed(v);
}

namespace {

constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();

// Best completion from (state, observed position): minimal cost, then
// shortest emission, then lexicographically smallest emission.
struct Cell {
  std::size_t cost = kInf;
  std::vector<std::string_view> suffix;
};

class Decoder {
 public:
  Decoder(const WordAutomaton& a, const TokenSeq& observed)
      : a_(a), obs_(observed), n_(observed.size()), table_(a.num_states() * (observed.size() + 1)) {}

  const Cell& run() {
    const auto states = static_cast<std::int32_t>(a_.num_states());
    for (auto i = static_cast<std::int64_t>(n_); i >= 0; --i)
      for (std::int32_t q = states - 1; q >= 0; --q) fill(q, static_cast<std::size_t>(i));
    return at(a_.start(), 0);
  }

 private:
  Cell& at(std::int32_t q, std::size_t i) { return table_[static_cast<std::size_t>(q) * (n_ + 1) + i]; }

  // Offers `emit` followed by the completion stored at `next`.
  void offer(Cell& best, std::size_t step_cost, std::span<const std::string_view> emit, const Cell& next) {
    if (next.cost == kInf) return;
    std::size_t cost = step_cost + next.cost;
    std::size_t len = emit.size() + next.suffix.size();
    if (cost > best.cost || (cost == best.cost && len > best.suffix.size())) return;
    std::vector<std::string_view> cand;
    cand.reserve(len);
    cand.insert(cand.end(), emit.begin(), emit.end());
    cand.insert(cand.end(), next.suffix.begin(), next.suffix.end());
    if (cost == best.cost && len == best.suffix.size() && !(cand < best.suffix)) return;
    best.cost = cost;
    best.suffix = std::move(cand);
  }

  void fill(std::int32_t q, std::size_t i) {
    Cell best;
    if (i == n_ && a_.is_final(q)) best.cost = 0;
    if (i < n_) offer(best, 1, {}, at(q, i + 1));  // observed word with no hypothesis counterpart
    for (auto arc : a_.arcs(q)) {
      if (arc.label == WordAutomaton::kWildcard) {
        for (std::size_t j = i; j <= n_; ++j) {
          std::vector<std::string_view> run(obs_.begin() + static_cast<std::ptrdiff_t>(i),
                                            obs_.begin() + static_cast<std::ptrdiff_t>(j));
          offer(best, 0, run, at(arc.target, j));
        }
        continue;
      }
      std::string_view w = a_.word(arc.label);
      std::string_view emit[] = {w};
      if (i < n_) offer(best, obs_[i] == w ? 0 : 1, emit, at(arc.target, i + 1));
      offer(best, 1, emit, at(arc.target, i));  // hypothesis word the channel dropped
    }
    at(q, i) = std::move(best);
  }

  const WordAutomaton& a_;
  const TokenSeq& obs_;
  std::size_t n_;
  std::vector<Cell> table_;
};

}  // namespace

RecognitionResult decode(const WordAutomaton& a, const TokenSeq& observed, RejectThreshold threshold) {
  Decoder decoder(a, observed);
  const Cell& best = decoder.run();
  RecognitionResult r;
  r.observed = observed;
  auto limit = threshold.resolve(observed.size());
  if (best.cost == kInf || (limit && best.cost > *limit)) return r;
  r.accepted = true;
  r.cost = best.cost;
  r.hypothesis = TokenSeq(std::vector<std::string>(best.suffix.begin(), best.suffix.end()));
  return r;
}

WordAutomaton wildcard_automaton() {
  return WordAutomaton({}, 2, 0, {1}, {{0, WordAutomaton::kWildcard, 1}});
}

RecognitionResult recognize(Mode mode, const GrammarSet& grammars, const TokenSeq& truth, const NoiseModel& nm,
                            RejectThreshold threshold) {
  auto it = grammars.find(mode);
  if (it == grammars.end()) throw std::out_of_range("no grammar loaded for mode " + to_string(mode));
  auto r = decode(it->second, apply_noise(truth, nm), threshold);
  r.mode = mode;
  return r;
}

}  // namespace selfhelp
