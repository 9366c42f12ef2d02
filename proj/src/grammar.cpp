// SPDX-License-Identifier: Apache-2.0

#include "selfhelp/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "selfhelp/tokens.hpp"

namespace selfhelp {

namespace {

using Code = GrammarError::Code;

struct Tag {
  std::string name;
  std::map<std::string, std::string> attrs;
  bool closing = false;
  bool self_closing = false;
};

class DocumentParser {
 public:
  explicit DocumentParser(std::string_view src) : src_(src) {}

  GrammarAst parse() {
    skip_misc();
    Tag root = expect_open_tag();
    if (root.name != "GRAMMAR") fail("root element must be <GRAMMAR>, got <" + root.name + ">");
    check_attrs(root, {"LANGID"});
    GrammarAst ast;
    if (!root.self_closing) {
      for (;;) {
        skip_misc();
        if (at_end()) fail("unterminated <GRAMMAR>");
        if (peek() != '<') fail("text is not allowed directly inside <GRAMMAR>");
        Tag tag = read_tag();
        if (tag.closing) {
          if (tag.name != "GRAMMAR") fail("mismatched </" + tag.name + ">, expected </GRAMMAR>");
          break;
        }
        if (tag.name != "RULE") fail("unexpected <" + tag.name + "> inside <GRAMMAR>");
        ast.rules.push_back(parse_rule(tag));
      }
    }
    skip_misc();
    if (!at_end()) fail("trailing content after </GRAMMAR>");
    return ast;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    int line = 1 + static_cast<int>(std::count(src_.begin(), src_.begin() + pos_, '\n'));
    throw GrammarError(Code::MalformedDocument, "line " + std::to_string(line) + ": " + msg);
  }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }
  bool starts_with(std::string_view s) const { return src_.substr(pos_).starts_with(s); }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  // Skips the terminator too.
  void skip_past(std::string_view terminator, const char* what) {
    auto end = src_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
    pos_ = end + terminator.size();
  }

  // Whitespace, comments and processing instructions.
  void skip_misc() {
    for (;;) {
      skip_space();
      if (starts_with("<!--")) {
        skip_past("-->", "comment");
      } else if (starts_with("<?")) {
        skip_past("?>", "processing instruction");
      } else {
        return;
      }
    }
  }

  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':' || c == '.';
  }

  std::string read_name() {
    std::size_t b = pos_;
    while (!at_end() && is_name_char(peek())) ++pos_;
    if (b == pos_) fail("expected a name");
    return std::string(src_.substr(b, pos_ - b));
  }

  std::string decode_entities(std::string_view raw) const {
    std::string out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out += raw[i];
        continue;
      }
      auto semi = raw.find(';', i);
      if (semi == std::string_view::npos) fail("unterminated entity reference");
      auto ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "amp") out += '&';
      else if (ent == "lt") out += '<';
      else if (ent == "gt") out += '>';
      else if (ent == "quot") out += '"';
      else if (ent == "apos") out += '\'';
      else fail("unknown entity &" + std::string(ent) + ";");
      i = semi;
    }
    return out;
  }

  Tag read_tag() {
    ++pos_;  // '<'
    Tag tag;
    if (!at_end() && peek() == '/') {
      tag.closing = true;
      ++pos_;
    }
    tag.name = read_name();
    for (;;) {
      skip_space();
      if (at_end()) fail("unterminated tag <" + tag.name);
      if (peek() == '>') {
        ++pos_;
        return tag;
      }
      if (starts_with("/>")) {
        if (tag.closing) fail("malformed closing tag </" + tag.name + "/>");
        tag.self_closing = true;
        pos_ += 2;
        return tag;
      }
      if (tag.closing) fail("attributes on closing tag </" + tag.name + ">");
      std::string attr = read_name();
      skip_space();
      if (at_end() || peek() != '=') fail("attribute " + attr + " has no value");
      ++pos_;
      skip_space();
      if (at_end() || (peek() != '"' && peek() != '\'')) fail("attribute " + attr + " value must be quoted");
      char quote = peek();
      ++pos_;
      auto end = src_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated value for attribute " + attr);
      std::string value = decode_entities(src_.substr(pos_, end - pos_));
      pos_ = end + 1;
      if (!tag.attrs.emplace(attr, std::move(value)).second) fail("duplicate attribute " + attr + " on <" + tag.name + ">");
    }
  }

  Tag expect_open_tag() {
    if (at_end() || peek() != '<') fail("expected an element");
    Tag tag = read_tag();
    if (tag.closing) fail("unexpected </" + tag.name + ">");
    return tag;
  }

  void check_attrs(const Tag& tag, std::initializer_list<std::string_view> allowed) const {
    for (const auto& [k, v] : tag.attrs) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
        fail("unknown attribute " + k + " on <" + tag.name + ">");
    }
  }

  std::string text_until_tag() {
    std::size_t b = pos_;
    while (!at_end() && peek() != '<') ++pos_;
    return decode_entities(src_.substr(b, pos_ - b));
  }

  Rule parse_rule(const Tag& open) {
    check_attrs(open, {"NAME", "TOPLEVEL"});
    auto name = open.attrs.find("NAME");
    if (name == open.attrs.end() || name->second.empty()) fail("<RULE> requires a NAME attribute");
    Rule rule;
    rule.name = name->second;
    if (auto top = open.attrs.find("TOPLEVEL"); top != open.attrs.end()) {
      if (top->second == "ACTIVE") rule.toplevel = true;
      else if (top->second != "INACTIVE") fail("TOPLEVEL must be ACTIVE or INACTIVE, got \"" + top->second + "\"");
    }
    if (!open.self_closing) rule.body = parse_body("RULE");
    return rule;
  }

  std::vector<std::string> parse_phrase() {
    std::string text = text_until_tag();
    if (at_end()) fail("unterminated <P>");
    Tag close = read_tag();
    if (!close.closing || close.name != "P") fail("<P> may only contain words, found <" + close.name + ">");
    return tokenize(text).tokens();
  }

  std::vector<GrammarItem> parse_body(const std::string& closing) {
    std::vector<GrammarItem> body;
    // Index of the PhraseAlt currently collecting consecutive <P> children.
    std::optional<std::size_t> open_alt;
    bool alt_saw_phrase = false;

    auto close_alt = [&] {
      if (open_alt && std::get<PhraseAlt>(body[*open_alt].node).phrases.empty())
        body.erase(body.begin() + static_cast<std::ptrdiff_t>(*open_alt));
      open_alt.reset();
      alt_saw_phrase = false;
    };

    for (;;) {
      if (at_end()) fail("unterminated <" + closing + ">");
      std::string text = text_until_tag();
      auto words = tokenize(text);
      if (!words.empty()) {
        close_alt();
        if (!body.empty())
          if (auto* prev = std::get_if<Words>(&body.back().node)) {
            prev->tokens.insert(prev->tokens.end(), words.begin(), words.end());
            continue;
          }
        body.push_back({Words{words.tokens()}});
        continue;
      }
      if (at_end()) fail("unterminated <" + closing + ">");
      if (starts_with("<!--")) {
        skip_past("-->", "comment");
        continue;
      }
      Tag tag = read_tag();
      if (tag.closing) {
        if (tag.name != closing) fail("mismatched </" + tag.name + ">, expected </" + closing + ">");
        close_alt();
        return body;
      }
      if (tag.name == "P") {
        check_attrs(tag, {});
        if (!open_alt) {
          open_alt = body.size();
          body.push_back({PhraseAlt{}});
        }
        alt_saw_phrase = true;
        if (tag.self_closing) continue;
        // An empty phrase is an elision marker ("...") and contributes nothing.
        auto phrase = parse_phrase();
        if (!phrase.empty()) std::get<PhraseAlt>(body[*open_alt].node).phrases.push_back(std::move(phrase));
        continue;
      }
      close_alt();
      if (tag.name == "RULEREF") {
        check_attrs(tag, {"NAME"});
        auto name = tag.attrs.find("NAME");
        if (name == tag.attrs.end() || name->second.empty()) fail("<RULEREF> requires a NAME attribute");
        if (!tag.self_closing) {
          skip_space();
          if (at_end() || peek() != '<') fail("<RULEREF> must be empty");
          Tag close = read_tag();
          if (!close.closing || close.name != "RULEREF") fail("<RULEREF> must be empty");
        }
        body.push_back({RuleRef{name->second}});
      } else if (tag.name == "o") {
        check_attrs(tag, {});
        if (tag.self_closing) continue;
        auto inner = parse_body("o");
        if (!inner.empty()) body.push_back({OptionalGroup{std::move(inner)}});
      } else {
        fail("unknown element <" + tag.name + ">");
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

const Rule& GrammarAst::toplevel() const {
  for (const auto& r : rules)
    if (r.toplevel) return r;
  throw GrammarError(Code::NoToplevelRule, "grammar has no toplevel rule");
}

const Rule* GrammarAst::find(std::string_view name) const {
  for (const auto& r : rules)
    if (r.name == name) return &r;
  return nullptr;
}

GrammarAst parse_grammar(std::string_view text) {
  GrammarAst ast = DocumentParser(text).parse();

  std::map<std::string, int> seen;
  int toplevel = 0;
  for (const auto& r : ast.rules) {
    if (r.name == kWildcardRule)
      throw GrammarError(Code::DuplicateRuleName, "rule name " + r.name + " is reserved for the builtin wildcard");
    if (seen[r.name]++)
      throw GrammarError(Code::DuplicateRuleName, "duplicate rule name " + r.name);
    if (r.toplevel) ++toplevel;
  }
  if (toplevel == 0) throw GrammarError(Code::NoToplevelRule, "grammar has no TOPLEVEL=\"ACTIVE\" rule");
  if (toplevel > 1)
    throw GrammarError(Code::MultipleToplevelRules,
                       "grammar has " + std::to_string(toplevel) + " toplevel rules, expected exactly one");
  return ast;
}

GrammarAst load_grammar_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open grammar file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_grammar(ss.str());
}

}  // namespace selfhelp
