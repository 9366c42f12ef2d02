// SPDX-License-Identifier: Apache-2.0
//
// Inspect the language of a grammar file: count, enumerate, match.

#include <iostream>

#include "CLI11.hpp"

#include "selfhelp/automaton.hpp"
#include "selfhelp/grammar.hpp"

using namespace selfhelp;

int main(int argc, char** argv) {
  CLI::App app{"Grammar language inspection"};
  app.require_subcommand(1);
  std::string file, text;
  bool marker = false;
  std::size_t limit = 1000;

  auto* count = app.add_subcommand("count", "Number of distinct strings");
  auto* list = app.add_subcommand("enumerate", "Strings in length-then-lexicographic order");
  auto* match = app.add_subcommand("match", "Exit 0 when the text is in the language, 1 otherwise");
  for (auto* sub : {count, list, match}) sub->add_option("grammar", file, "Grammar file")->required()->check(CLI::ExistingFile);
  for (auto* sub : {count, list}) sub->add_flag("--emit-marker", marker, "Show wildcards as '*' instead of dropping them");
  list->add_option("--limit", limit, "Maximum strings to print")->check(CLI::PositiveNumber);
  match->add_option("text", text, "Utterance")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    auto automaton = compile(load_grammar_file(file));
    auto policy = marker ? WildcardPolicy::EmitMarker : WildcardPolicy::CollapseToEpsilon;
    if (*count) {
      std::cout << count_language(automaton, policy) << "\n";
    } else if (*list) {
      auto e = enumerate_language(automaton, policy, limit);
      for (const auto& s : e.strings) std::cout << (s.empty() ? "<empty>" : s.str()) << "\n";
      if (e.truncated) std::cerr << "(truncated at " << limit << ")\n";
    } else {
      bool ok = matches(automaton, tokenize(text));
      std::cout << (ok ? "match" : "no match") << "\n";
      return ok ? 0 : 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
