// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"

#include "fixtures.hpp"
#include "oracles.hpp"
#include "random_grammar.hpp"
#include "selfhelp/edit_distance.hpp"
#include "selfhelp/experiment.hpp"
#include "selfhelp/recognizer.hpp"

using namespace selfhelp;

namespace {

constexpr std::size_t kNoLimit = std::numeric_limits<std::size_t>::max();

WordAutomaton f3_mini() { return compile(load_grammar_file(fixture("grammars/f3_mini.xml"))); }

// Best hypothesis by brute force over the enumerated language:
// (distance, length, lexicographic).
std::pair<std::size_t, TokenSeq> brute_decode(const std::vector<TokenSeq>& lang, const TokenSeq& obs) {
  std::size_t best = kNoLimit;
  TokenSeq arg;
  for (const auto& w : lang) {
    auto d = word_edit_distance(w, obs);
    if (d < best || (d == best && shortlex_less(w, arg))) {
      best = d;
      arg = w;
    }
  }
  return {best, arg};
}

// Minimum distance when "*" absorbs any run of observed words for free.
std::size_t glob_distance(const oracle::Str& p, std::size_t i, const oracle::Str& o, std::size_t j) {
  if (i == p.size()) return o.size() - j;
  if (p[i] == oracle::kStar) {
    std::size_t best = kNoLimit;
    for (std::size_t k = j; k <= o.size(); ++k) best = std::min(best, glob_distance(p, i + 1, o, k));
    return best;
  }
  std::size_t best = 1 + glob_distance(p, i + 1, o, j);
  if (j < o.size()) {
    best = std::min(best, 1 + glob_distance(p, i, o, j + 1));
    best = std::min(best, (p[i] == o[j] ? 0 : 1) + glob_distance(p, i + 1, o, j + 1));
  }
  return best;
}

TokenSeq random_observation(std::mt19937_64& rng, const std::vector<std::string>& vocab, std::size_t max_len) {
  std::vector<std::string> s(rng() % (max_len + 1));
  for (auto& w : s) w = vocab[rng() % vocab.size()];
  return TokenSeq(std::move(s));
}

// Independent reading of the channel definition.
TokenSeq reference_noise(const TokenSeq& truth, const NoiseModel& nm) {
  std::mt19937_64 rng(nm.seed);
  auto unit = [&] { return std::ldexp(static_cast<double>(rng() >> 11), -53); };
  std::vector<std::string> out;
  for (const auto& w : truth) {
    double u = unit();
    if (u < nm.p_del) {
    } else if (u < nm.p_del + nm.p_sub) {
      auto it = nm.confusions.find(w);
      const auto& pool = it != nm.confusions.end() ? it->second : nm.vocab;
      out.push_back(pool[rng() % pool.size()]);
    } else {
      out.push_back(w);
    }
    if (unit() < nm.p_ins) out.push_back(nm.vocab[rng() % nm.vocab.size()]);
  }
  return TokenSeq(out);
}

NoiseModel experiment_noise(double p_sub) {
  NoiseModel nm;
  nm.p_sub = p_sub;
  nm.confusions = load_confusion_table(fixture("confusions.tsv"));
  nm.vocab = {"a", "an", "and", "for", "in", "it", "my", "on", "please", "so", "that", "to", "uh", "um", "was", "with"};
  return nm;
}

std::string noise_golden_text() {
  auto nm = experiment_noise(0.15);
  std::string out;
  std::uint64_t i = 0;
  for (const auto& truth : load_corpus(fixture("corpus/in_grammar.txt"))) {
    nm.seed = 42 ^ i++;
    out += truth.str() + "\t" + apply_noise(truth, nm).str() + "\n";
  }
  return out;
}

}  // namespace

TEST_SUITE("recognizer") {
  TEST_CASE("modes") {
    CHECK(parse_mode("f2") == Mode::F2);
    CHECK(parse_mode("F3") == Mode::F3);
    CHECK(to_string(Mode::F1) == "F1");
    CHECK_THROWS_AS(parse_mode("f4"), std::invalid_argument);
  }

  TEST_CASE("zero-rate channel is the identity") {
    NoiseModel nm;
    nm.seed = 99;
    auto t = tokenize("what is the surrender value of policy trs1027465");
    CHECK(apply_noise(t, nm) == t);
  }

  TEST_CASE("rate-one substitution channel") {
    NoiseModel nm;
    nm.p_sub = 1.0;
    nm.confusions = {{"value", {"values"}}};
    nm.vocab = {"x"};
    CHECK(apply_noise(tokenize("surrender value of policy trs1027465"), nm).str() == "x values x x x");
  }

  TEST_CASE("channel matches the reference reading") {
    std::mt19937_64 rng(11);
    auto base = experiment_noise(0.0);
    auto corpus = load_corpus(fixture("corpus/in_grammar.txt"));
    for (int k = 0; k < 500; ++k) {
      auto nm = base;
      nm.p_sub = std::ldexp(static_cast<double>(rng() >> 11), -53) * 0.5;
      nm.p_del = std::ldexp(static_cast<double>(rng() >> 11), -53) * 0.3;
      nm.p_ins = std::ldexp(static_cast<double>(rng() >> 11), -53) * 0.3;
      nm.seed = rng();
      const auto& truth = corpus[rng() % corpus.size()];
      REQUIRE(apply_noise(truth, nm) == reference_noise(truth, nm));
    }
  }

  TEST_CASE("substitution rate converges") {
    NoiseModel nm;
    nm.p_sub = 0.15;
    nm.vocab = {"zz"};
    nm.seed = 5;
    TokenSeq truth(std::vector<std::string>(20000, "w"));
    auto out = apply_noise(truth, nm);
    REQUIRE(out.size() == truth.size());
    double rate = static_cast<double>(std::count(out.begin(), out.end(), "zz")) / 20000.0;
    CHECK(rate == doctest::Approx(0.15).epsilon(0.07));
  }

  TEST_CASE("channel errors") {
    NoiseModel nm;
    nm.p_sub = 1.0;
    CHECK_THROWS_AS(apply_noise(tokenize("a"), nm), NoiseError);
    nm.p_sub = 0.7;
    nm.p_del = 0.5;
    CHECK_THROWS_AS(nm.validate(), std::invalid_argument);
    nm.p_del = 0.0;
    nm.p_ins = 1.5;
    CHECK_THROWS_AS(nm.validate(), std::invalid_argument);
    nm.p_ins = 0.0;
    nm.p_sub = -0.1;
    CHECK_THROWS_AS(nm.validate(), std::invalid_argument);
  }

  TEST_CASE("confusion table loader") {
    auto t = load_confusion_table(fixture("confusions.tsv"));
    CHECK(t.at("surrender") == std::vector<std::string>{"surrendered", "surrenders", "sender"});
    auto path = std::filesystem::temp_directory_path() / "selfhelp_bad_confusions.tsv";
    std::ofstream(path) << "value values\n";
    CHECK_THROWS_AS(load_confusion_table(path.string()), std::runtime_error);
    CHECK_THROWS_AS(load_confusion_table("/nonexistent/confusions.tsv"), std::runtime_error);
  }

  TEST_CASE("noise over the in-grammar corpus matches the golden file") {
    auto text = noise_golden_text();
    CHECK(text == noise_golden_text());
    std::ifstream in(std::string(SELFHELP_GOLDEN_DIR) + "/noise_f3_seed42.txt", std::ios::binary);
    REQUIRE(in);
    std::stringstream golden;
    golden << in.rdbuf();
    CHECK(text == golden.str());
  }

  TEST_CASE("reject thresholds") {
    CHECK(RejectThreshold::automatic().resolve(5) == 3);
    CHECK(RejectThreshold::automatic().resolve(4) == 2);
    CHECK(RejectThreshold::automatic().resolve(0) == 0);
    CHECK_FALSE(RejectThreshold::unbounded().resolve(9).has_value());
    CHECK(RejectThreshold::parse("3") == RejectThreshold::fixed(3));
    CHECK(RejectThreshold::parse("inf") == RejectThreshold::unbounded());
    CHECK(RejectThreshold::parse("auto").str() == "auto");
    CHECK_THROWS_AS(RejectThreshold::parse("-1"), std::invalid_argument);
    CHECK_THROWS_AS(RejectThreshold::parse("2x"), std::invalid_argument);
  }

  TEST_CASE("decode examples") {
    auto pair = compile(parse_grammar(R"(<GRAMMAR><RULE NAME="k" TOPLEVEL="ACTIVE">
      <P>surrender value</P><P>maturity value</P></RULE></GRAMMAR>)"));
    auto r = decode(pair, tokenize("surrender values"), RejectThreshold::unbounded());
    CHECK(r.accepted);
    CHECK(r.hypothesis.str() == "surrender value");
    CHECK(r.cost == 1);

    auto a = f3_mini();
    for (const auto& s : enumerate_language(a, WildcardPolicy::CollapseToEpsilon, kNoLimit).strings) {
      auto m = decode(a, s, RejectThreshold::fixed(0));
      CHECK(m.accepted);
      CHECK(m.hypothesis == s);
      CHECK(m.cost == 0);
    }
    auto lang = enumerate_language(a, WildcardPolicy::CollapseToEpsilon, kNoLimit).strings;
    auto obs = tokenize("what does this system do");
    CHECK(brute_decode(lang, obs).first > 1);
    auto rej = decode(a, obs, RejectThreshold::fixed(1));
    CHECK_FALSE(rej.accepted);
    CHECK(rej.hypothesis.empty());
    CHECK_FALSE(rej.cost.has_value());
    CHECK(rej.observed == obs);
  }

  TEST_CASE("decode is optimal against brute force") {
    auto a = f3_mini();
    auto lang = enumerate_language(a, WildcardPolicy::CollapseToEpsilon, kNoLimit).strings;
    std::vector<std::string> vocab{"what", "is", "the", "surrender", "value", "of", "policy", "number",
                                   "can", "you", "tell", "me", "thank", "please", "trs1027465"};
    std::mt19937_64 rng(42);
    for (int k = 0; k < 200; ++k) {
      auto obs = random_observation(rng, vocab, 14);
      auto r = decode(a, obs, RejectThreshold::unbounded());
      auto [cost, hyp] = brute_decode(lang, obs);
      REQUIRE(r.accepted);
      REQUIRE(*r.cost == cost);
      REQUIRE(r.hypothesis == hyp);
    }
  }

  TEST_CASE("decode is optimal on random grammars") {
    std::vector<std::string> vocab{"a", "b", "c", "dd", "zz"};
    for (std::uint64_t seed = 1; seed <= 120; ++seed) {
      bool wild = seed % 2 == 0;
      auto doc = testgen::GrammarGen(seed, wild).document();
      CAPTURE(doc);
      auto ast = parse_grammar(doc);
      auto a = compile(ast);
      if (count_language(a, WildcardPolicy::EmitMarker) > 200) continue;
      auto patterns = oracle::expand(ast, true);
      auto lang = enumerate_language(a, WildcardPolicy::CollapseToEpsilon, kNoLimit).strings;
      std::mt19937_64 rng(seed);
      for (int k = 0; k < 30; ++k) {
        auto obs = random_observation(rng, vocab, 7);
        auto r = decode(a, obs, RejectThreshold::unbounded());
        REQUIRE(r.accepted);
        std::size_t expected = kNoLimit;
        for (const auto& p : patterns) expected = std::min(expected, glob_distance(p, 0, obs.tokens(), 0));
        REQUIRE(*r.cost == expected);
        REQUIRE(matches(a, r.hypothesis));
        REQUIRE(word_edit_distance(r.hypothesis, obs) == *r.cost);
        if (!a.has_wildcard()) REQUIRE(r.hypothesis == brute_decode(lang, obs).second);
      }
    }
  }

  TEST_CASE("rejection is monotone in the threshold") {
    auto a = f3_mini();
    std::vector<std::string> vocab{"what", "is", "the", "surrender", "value", "policy", "number", "hello", "do"};
    std::mt19937_64 rng(3);
    for (int k = 0; k < 200; ++k) {
      auto obs = random_observation(rng, vocab, 10);
      auto inf = decode(a, obs, RejectThreshold::unbounded());
      bool seen_accept = false;
      for (std::size_t t = 0; t <= obs.size() + 8; ++t) {
        auto r = decode(a, obs, RejectThreshold::fixed(t));
        if (seen_accept) REQUIRE(r.accepted);
        if (r.accepted) {
          seen_accept = true;
          REQUIRE(r.hypothesis == inf.hypothesis);
          REQUIRE(*r.cost <= t);
        } else {
          REQUIRE(*inf.cost > t);
          REQUIRE(r.hypothesis.empty());
        }
      }
      REQUIRE(seen_accept);
    }
  }

  TEST_CASE("wildcard decoding") {
    auto f1 = wildcard_automaton();
    auto obs = tokenize("anything the caller says");
    auto r = decode(f1, obs);
    CHECK(r.accepted);
    CHECK(r.cost == 0);
    CHECK(r.hypothesis == obs);

    auto f2 = compile(load_grammar_file(fixture("grammars/f2_mini.xml")));
    auto q = tokenize("please tell me surrender value of policy number now");
    auto r2 = decode(f2, q);
    CHECK(r2.accepted);
    CHECK(r2.cost == 0);
    CHECK(r2.hypothesis == q);
    auto r3 = decode(f2, tokenize("please tell me surrender values of policy number now"));
    CHECK(r3.cost == 1);
    CHECK(r3.hypothesis == q);
  }

  TEST_CASE("recognize") {
    GrammarSet g;
    g.emplace(Mode::F1, wildcard_automaton());
    g.emplace(Mode::F3, f3_mini());
    auto truth = tokenize("can you tell me maturity value of the policy number");
    auto r = recognize(Mode::F1, g, truth, NoiseModel{});
    CHECK(r.accepted);
    CHECK(r.cost == 0);
    CHECK(r.hypothesis == truth);
    CHECK(r.mode == Mode::F1);

    auto nm = experiment_noise(0.15);
    nm.seed = 7;
    auto r3 = recognize(Mode::F3, g, truth, nm, RejectThreshold::unbounded());
    CHECK(matches(g.at(Mode::F3), r3.hypothesis));
    auto again = recognize(Mode::F3, g, truth, nm, RejectThreshold::unbounded());
    CHECK(again.hypothesis == r3.hypothesis);
    CHECK(again.observed == r3.observed);
    CHECK(again.cost == r3.cost);

    CHECK_THROWS_AS(recognize(Mode::F2, g, truth, nm), std::out_of_range);
  }

  TEST_CASE("zero-noise exactness over f3_mini") {
    GrammarSet g;
    g.emplace(Mode::F3, f3_mini());
    for (const auto& s : enumerate_language(g.at(Mode::F3), WildcardPolicy::CollapseToEpsilon, kNoLimit).strings) {
      auto r = recognize(Mode::F3, g, s, NoiseModel{});
      CHECK(r.hypothesis == s);
      CHECK(r.cost == 0);
    }
  }
}
