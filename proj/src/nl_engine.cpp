// SPDX-License-Identifier: Apache-2.0

#include "selfhelp/nl_engine.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "selfhelp/edit_distance.hpp"
#include "selfhelp/kvfile.hpp"

namespace selfhelp {

std::optional<std::string> SlotSpec::match_value(const std::string& token) const {
  if (!pattern) return std::nullopt;
  bool ok = compiled_ ? std::regex_match(token, *compiled_)
                      : std::regex_match(token, std::regex(*pattern, std::regex::ECMAScript | std::regex::icase));
  if (!ok) return std::nullopt;
  std::string v = token;
  if (value_case == ValueCase::Upper)
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  else if (value_case == ValueCase::Lower)
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return v;
}

void ConceptLexicon::finalize() {
  std::set<std::string> ids;
  for (const auto& [intent, phrases] : key_concepts) {
    if (intent.empty()) throw NlError("lexicon: empty intent id");
    if (phrases.empty()) throw NlError("lexicon: intent " + intent + " has no phrases");
    for (const auto& p : phrases)
      if (p.empty()) throw NlError("lexicon: intent " + intent + " has an empty phrase");
  }
  std::sort(key_words.begin(), key_words.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (auto& s : key_words) {
    if (s.id.empty()) throw NlError("lexicon: empty slot id");
    if (!ids.insert(s.id).second) throw NlError("lexicon: duplicate slot id " + s.id);
    for (const auto& p : s.phrases)
      if (p.empty()) throw NlError("lexicon: slot " + s.id + " has an empty phrase");
    if (s.phrases.empty() && !s.pattern) throw NlError("lexicon: slot " + s.id + " has neither phrases nor pattern");
    if (s.pattern) {
      try {
        s.compiled_ = std::regex(*s.pattern, std::regex::ECMAScript | std::regex::icase);
      } catch (const std::regex_error& e) {
        throw NlError("lexicon: slot " + s.id + " has an invalid pattern: " + e.what());
      }
    }
  }
}

const SlotSpec* ConceptLexicon::slot(std::string_view id) const {
  for (const auto& s : key_words)
    if (s.id == id) return &s;
  return nullptr;
}

const IntentSpec* IntentSchema::find(std::string_view id) const {
  auto it = intents.find(std::string(id));
  return it == intents.end() ? nullptr : &it->second;
}

std::string FrameStatus::str() const {
  switch (kind_) {
    case Kind::Valid: return "Valid";
    case Kind::Invalid: return "Invalid(" + reason_ + ")";
    case Kind::Assumed: {
      std::string s = "Assumed(";
      for (std::size_t i = 0; i < assumed_.size(); ++i) s += (i ? "," : "") + assumed_[i];
      return s + ")";
    }
  }
  return "?";
}

std::string QueryFrame::str() const {
  std::string s = intent.value_or("-") + "(";
  bool first = true;
  for (const auto& [k, v] : slots) {
    s += (first ? "" : ",") + k + "=" + v;
    first = false;
  }
  return s + ") " + status.str();
}

namespace {

std::vector<TokenSeq> parse_phrases(const KvFile& f, const std::string& section) {
  std::vector<TokenSeq> out;
  for (const auto& p : f.get_list(section, "phrases", '|')) {
    auto t = tokenize(p);
    if (t.empty()) throw ConfigError(section + ".phrases", "phrase '" + p + "' has no words");
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

Domain load_domain(const KvFile& f) {
  Domain d;
  for (const auto& section : f.sections()) {
    auto colon = section.find(':');
    auto kind = section.substr(0, colon);
    auto id = colon == std::string::npos ? std::string() : section.substr(colon + 1);
    if (id.empty()) throw ConfigError(section, "expected [intent:<id>] or [slot:<id>]");
    if (kind == "intent") {
      auto phrases = parse_phrases(f, section);
      if (phrases.empty()) throw ConfigError(section + ".phrases", "intent needs at least one phrase");
      d.lexicon.key_concepts[id] = std::move(phrases);
      IntentSpec spec;
      spec.required = f.get_list(section, "required", ',');
      spec.optional = f.get_list(section, "optional", ',');
      spec.answer_template = f.find(section, "template").value_or(id);
      auto ctx = f.find(section, "context").value_or("none");
      if (ctx != "none" && ctx != "agent") throw ConfigError(section + ".context", "expected none or agent");
      spec.needs_agent = ctx == "agent";
      d.schema.intents[id] = std::move(spec);
    } else if (kind == "slot") {
      SlotSpec s;
      s.id = id;
      s.phrases = parse_phrases(f, section);
      s.pattern = f.find(section, "pattern");
      if (s.pattern && s.pattern->empty()) s.pattern.reset();
      auto vc = f.find(section, "value_case").value_or("upper");
      if (vc == "upper") s.value_case = ValueCase::Upper;
      else if (vc == "lower") s.value_case = ValueCase::Lower;
      else if (vc == "as_spoken") s.value_case = ValueCase::AsSpoken;
      else throw ConfigError(section + ".value_case", "expected upper, lower or as_spoken");
      d.lexicon.key_words.push_back(std::move(s));
    } else {
      throw ConfigError(section, "unknown section kind '" + kind + "'");
    }
  }
  try {
    d.lexicon.finalize();
  } catch (const NlError& e) {
    throw ConfigError(f.origin(), e.what());
  }
  for (const auto& [intent, spec] : d.schema.intents) {
    for (const auto* list : {&spec.required, &spec.optional})
      for (const auto& slot : *list)
        if (!d.lexicon.slot(slot))
          throw ConfigError("intent:" + intent, "references undefined slot " + slot);
  }
  return d;
}

Domain load_domain_file(const std::string& path) { return load_domain(KvFile::load(path)); }

namespace {

struct Candidate {
  std::string text;  // phrase words joined by single spaces
  const TokenSeq* phrase;
};

std::vector<Candidate> candidates(const ConceptLexicon& lex) {
  std::vector<Candidate> out;
  for (const auto& [intent, phrases] : lex.key_concepts)
    for (const auto& p : phrases) out.push_back({p.str(), &p});
  for (const auto& s : lex.key_words)
    for (const auto& p : s.phrases) out.push_back({p.str(), &p});
  return out;
}

std::string join(const TokenSeq& t, std::size_t b, std::size_t e) {
  std::string s;
  for (std::size_t i = b; i < e; ++i) {
    if (i > b) s += ' ';
    s += t[i];
  }
  return s;
}

// Distance bounded by `limit`: returns limit + 1 when the lengths alone
// already rule a match out.
std::size_t bounded_distance(const std::string& a, const std::string& b, std::size_t limit) {
  auto diff = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
  if (diff > limit) return limit + 1;
  return char_edit_distance(a, b);
}

bool contains(const TokenSeq& hay, const TokenSeq& needle) {
  if (needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

TokenSeq correction_pass(const TokenSeq& observed, const std::vector<Candidate>& cands, std::size_t longest,
                         std::size_t max_edit) {
  std::vector<std::string> out;
  const std::size_t n = observed.size();
  std::size_t i = 0;
  while (i < n) {
    const TokenSeq* best = nullptr;
    std::size_t best_len = 0, best_dist = 0;
    // Spans may be one word longer than the longest phrase to catch splits.
    for (std::size_t len = std::min(n - i, longest + 1); len >= 1 && !best; --len) {
      std::string span = join(observed, i, i + len);
      for (const auto& c : cands) {
        auto d = bounded_distance(span, c.text, max_edit);
        if (d > max_edit) continue;
        if (len > 1) {
          if (bounded_distance(join(observed, i + 1, i + len), c.text, max_edit) < d) continue;
          if (bounded_distance(join(observed, i, i + len - 1), c.text, max_edit) < d) continue;
        }
        if (!best || d < best_dist) {
          best = c.phrase;
          best_len = len;
          best_dist = d;
        }
      }
    }
    if (best) {
      out.insert(out.end(), best->begin(), best->end());
      i += best_len;
    } else {
      out.push_back(observed[i]);
      ++i;
    }
  }
  return TokenSeq(std::move(out));
}

}  // namespace

TokenSeq correct(const TokenSeq& observed, const ConceptLexicon& lex, std::size_t max_edit) {
  const auto cands = candidates(lex);
  std::size_t longest = 0;
  for (const auto& c : cands) longest = std::max(longest, c.phrase->size());

  // A repair can bring its neighbours within range of a longer phrase
  // ("police a number" -> "policy a number" -> "policy number"), so passes
  // repeat until nothing changes.
  TokenSeq cur = observed;
  for (std::size_t pass = 0; pass <= observed.size() + 4; ++pass) {
    TokenSeq next = correction_pass(cur, cands, longest, max_edit);
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

QueryFrame validate_frame(QueryFrame f, const IntentSchema& schema) {
  if (!f.intent) return f;
  const IntentSpec* spec = schema.find(*f.intent);
  if (!spec) throw NlError("unknown intent " + *f.intent);
  for (const auto& slot : spec->required) {
    if (!f.slots.count(slot)) {
      f.status = FrameStatus::invalid("missing_slot:" + slot);
      return f;
    }
  }
  if (f.status.kind() != FrameStatus::Kind::Assumed) f.status = FrameStatus::valid();
  return f;
}

QueryFrame extract_frame(const TokenSeq& corrected, const ConceptLexicon& lex, const IntentSchema& schema) {
  QueryFrame f;
  f.source = corrected;

  std::vector<std::string> found;
  for (const auto& [intent, phrases] : lex.key_concepts)
    if (std::any_of(phrases.begin(), phrases.end(), [&](const auto& p) { return contains(corrected, p); }))
      found.push_back(intent);

  for (const auto& s : lex.key_words) {
    if (s.pattern) {
      for (const auto& tok : corrected)
        if (auto v = s.match_value(tok)) {
          f.slots[s.id] = *v;
          break;
        }
    } else {
      for (const auto& p : s.phrases)
        if (contains(corrected, p)) {
          f.slots[s.id] = p.str();
          break;
        }
    }
  }

  if (found.empty()) {
    f.status = FrameStatus::invalid("no_intent");
    return f;
  }
  if (found.size() > 1) {
    f.status = FrameStatus::invalid("ambiguous_intent");
    return f;
  }
  f.intent = found.front();
  return validate_frame(std::move(f), schema);
}

QueryFrame fill_assumptions(QueryFrame f, const AgentContext& ctx) {
  if (f.status.kind() != FrameStatus::Kind::Invalid) return f;
  if (f.status.reason() != "missing_slot:" + std::string(kPolicySlot)) return f;
  if (ctx.owned_policies.size() != 1) return f;
  f.slots[std::string(kPolicySlot)] = ctx.owned_policies.front();
  f.status = FrameStatus::assumed({std::string(kPolicySlot)});
  return f;
}

QueryFrame understand(const TokenSeq& recognized, const Domain& domain, const AgentContext& ctx,
                      std::size_t max_edit) {
  auto frame = extract_frame(correct(recognized, domain.lexicon, max_edit), domain.lexicon, domain.schema);
  if (frame.status.kind() == FrameStatus::Kind::Invalid && frame.intent) {
    frame = fill_assumptions(std::move(frame), ctx);
    // Another required slot may still be missing.
    frame = validate_frame(std::move(frame), domain.schema);
  }
  return frame;
}

}  // namespace selfhelp
