// SPDX-License-Identifier: Apache-2.0
//
// Runs one spoken query through the whole self-help pipeline: simulated
// recognition, NL correction and canonicalization, database answer, and
// optional SMS delivery.
//
// Exit codes: 0 answered, 2 invalid query, 3 recognition rejected,
// 1 usage or data errors.

#include <iostream>

#include "CLI11.hpp"

#include "selfhelp/backend.hpp"
#include "selfhelp/experiment.hpp"
#include "selfhelp/nl_engine.hpp"
#include "selfhelp/recognizer.hpp"
#include "selfhelp/sms.hpp"

using namespace selfhelp;

int main(int argc, char** argv) {
  CLI::App app{"Answer an insurance agent's spoken query"};

  std::string grammar_file, mode_name = "f3", lexicon_file, data_file, query, agent_id;
  std::string threshold = "auto", confusions_file, sms_gateway, sms_to;
  std::string sms_user = "selfhelp", sms_password = "selfhelp";
  std::size_t max_edit = kDefaultMaxEdit;
  NoiseModel noise;
  int sms_timeout_ms = 2000;

  app.add_option("--grammar", grammar_file, "Grammar file (optional for f1)");
  app.add_option("--mode", mode_name, "Front end: f1, f2 or f3")->check(CLI::IsMember({"f1", "f2", "f3"}));
  app.add_option("--lexicon", lexicon_file, "Lexicon and intent schema file")->required()->check(CLI::ExistingFile);
  app.add_option("--data", data_file, "Policy/agent data file")->required()->check(CLI::ExistingFile);
  app.add_option("--query", query, "The query as spoken")->required();
  app.add_option("--agent", agent_id, "Calling agent id (default: first agent in the data file)");
  app.add_option("--max-edit", max_edit, "NL correction strength (character edits per span)");
  app.add_option("--reject-threshold", threshold, "auto, inf or a maximum decode cost");
  app.add_option("--p-sub", noise.p_sub, "Simulated substitution rate");
  app.add_option("--p-del", noise.p_del, "Simulated deletion rate");
  app.add_option("--p-ins", noise.p_ins, "Simulated insertion rate");
  app.add_option("--seed", noise.seed, "Noise seed");
  app.add_option("--confusions", confusions_file, "Confusion table for simulated noise")->check(CLI::ExistingFile);
  app.add_option("--sms-gateway", sms_gateway, "Kannel-style gateway, e.g. http://127.0.0.1:13013");
  app.add_option("--sms-to", sms_to, "Destination number for the SMS answer");
  app.add_option("--sms-user", sms_user, "Gateway username");
  app.add_option("--sms-password", sms_password, "Gateway password");
  app.add_option("--sms-timeout-ms", sms_timeout_ms, "Gateway timeout in milliseconds");
  CLI11_PARSE(app, argc, argv);

  try {
    Mode mode = parse_mode(mode_name);
    if (grammar_file.empty() && mode != Mode::F1) {
      std::cerr << "--grammar is required for mode " << mode_name << "\n";
      return 1;
    }
    GrammarSet grammars;
    grammars.emplace(mode, grammar_file.empty() ? wildcard_automaton() : load_automaton(grammar_file));
    Domain domain = load_domain_file(lexicon_file);
    DataStore store = DataStore::load_file(data_file);
    if (agent_id.empty()) {
      if (store.agents().empty()) throw std::runtime_error("data file has no agents; pass --agent");
      agent_id = store.agents().begin()->first;
    }
    const AgentContext& ctx = store.agent(agent_id);
    if (!confusions_file.empty()) noise.confusions = load_confusion_table(confusions_file);
    for (const auto& [w, cs] : noise.confusions) noise.vocab.push_back(w);

    auto truth = tokenize(query);
    auto rec = recognize(mode, grammars, truth, noise, RejectThreshold::parse(threshold));
    std::cout << "heard:      " << rec.observed.str() << "\n";
    if (!rec.accepted) {
      std::cout << "recognized: <rejected>\n";
      return 3;
    }
    std::cout << "recognized: " << rec.hypothesis.str() << " (cost " << *rec.cost << ")\n";
    auto corrected = correct(rec.hypothesis, domain.lexicon, max_edit);
    std::cout << "corrected:  " << corrected.str() << "\n";
    auto frame = understand(rec.hypothesis, domain, ctx, max_edit);
    std::cout << "frame:      " << frame.str() << "\n";
    if (!frame.status.answerable()) {
      std::cout << "answer:     <none>\n";
      return 2;
    }
    auto text = answer(frame, domain.schema, store, ctx);
    std::cout << "answer:     " << text.text << "\n";

    if (!sms_gateway.empty()) {
      if (sms_to.empty()) {
        std::cerr << "--sms-to is required with --sms-gateway\n";
        return 1;
      }
      SmsGateway gw{sms_gateway, sms_user, sms_password, std::chrono::milliseconds(sms_timeout_ms)};
      auto receipt = send_sms(gw, sms_to, text);
      std::cout << "sms:        " << to_string(receipt.status) << " (http " << receipt.http_status << ")\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
