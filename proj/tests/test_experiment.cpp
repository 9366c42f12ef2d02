// SPDX-License-Identifier: Apache-2.0

#include <fstream>

#include "doctest.h"

#include "fixtures.hpp"
#include "oracles.hpp"
#include "selfhelp/experiment.hpp"
#include "selfhelp/kvfile.hpp"
#include "selfhelp/nl_engine.hpp"

using namespace selfhelp;
namespace fs = std::filesystem;

namespace {

ExperimentConfig fixture_config() { return load_experiment_config(fixture("experiment.ini")); }

fs::path write_ini(const std::string& ini) {
  auto dir = fs::temp_directory_path() / "selfhelp_cfg_test";
  fs::create_directories(dir);
  auto path = dir / "config.ini";
  std::ofstream(path) << ini;
  return path;
}

ConfigError config_error(const std::string& ini) {
  try {
    load_experiment_config(write_ini(ini));
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected ConfigError");
  return ConfigError("", "");
}

std::string valid_ini(const std::string& engine_extra = "", const std::string& noise = "p_sub = 0.1\n") {
  auto d = std::string(SELFHELP_DATA_DIR);
  return "[grammars]\nf1 = wildcard\nf3 = " + d + "/grammars/f3_mini.xml\n[noise]\n" + noise +
         "vocab = a, b\n[corpus]\nin_grammar = " + d + "/corpus/in_grammar.txt\nnatural = " + d +
         "/corpus/natural.txt\n[engine]\nlexicon = " + d + "/domain.ini\ndata = " + d +
         "/insurance.ini\nagent = AG1001\n" + engine_extra;
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("corpora") {
    auto natural = load_corpus(fixture("corpus/natural.txt"));
    CHECK(natural.size() == 50);
    auto in_grammar = load_corpus(fixture("corpus/in_grammar.txt"));
    CHECK(in_grammar.size() == 24);
    CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.txt"), ConfigError);
  }

  TEST_CASE("ux_score") {
    auto natural = load_corpus(fixture("corpus/natural.txt"));
    CHECK(ux_score(wildcard_automaton(), natural) == 1.0);
    auto ast = load_grammar_file(fixture("grammars/f3_mini.xml"));
    auto f3 = compile(ast);
    auto own = enumerate_language(f3, WildcardPolicy::CollapseToEpsilon, 100).strings;
    CHECK(ux_score(f3, own) == 1.0);
    CHECK_THROWS_AS(ux_score(f3, {}), EmptyCorpus);

    // The seven surrender-value phrasings all name the policy by its id, so
    // none fits a grammar that ends in the literal "policy number".
    std::vector<TokenSeq> seven(natural.begin(), natural.begin() + 7);
    auto lang = oracle::expand(ast);
    std::size_t members = 0;
    for (const auto& s : seven) members += lang.count(s.tokens());
    CHECK(members == 0);
    CHECK(ux_score(f3, seven) == 0.0);
  }

  TEST_CASE("config loading") {
    auto cfg = fixture_config();
    CHECK(cfg.grammars.size() == 3);
    CHECK(cfg.trials == 1000);
    CHECK(cfg.seed == 42);
    CHECK(cfg.noise.p_sub == doctest::Approx(0.15));
    CHECK(cfg.noise.vocab.size() == 16);
    CHECK(cfg.noise.confusions.count("surrender") == 1);
    CHECK(cfg.sweep == std::vector<std::size_t>{0, 1, 2});
    CHECK(cfg.reject_threshold == RejectThreshold::automatic());
    CHECK(cfg.lexicon == fs::path(fixture("domain.ini")));

    auto defaults = load_experiment_config(write_ini(valid_ini()));
    CHECK(defaults.trials == 1000);
    CHECK(defaults.seed == 42);
    CHECK(defaults.max_edit == kDefaultMaxEdit);
    CHECK(defaults.report_name == "report");
    CHECK(defaults.sweep.empty());
    CHECK_FALSE(defaults.confusions.has_value());
  }

  TEST_CASE("config errors name the field") {
    CHECK(config_error(valid_ini("trials = 0\n")).field() == "engine.trials");
    CHECK(config_error(valid_ini("", "p_sub = 1.5\n")).field() == "noise");
    CHECK(config_error(valid_ini("", "p_sub = often\n")).field() == "noise.p_sub");
    CHECK(config_error(valid_ini("reject_threshold = sometimes\n")).field() == "engine.reject_threshold");
    CHECK(config_error(valid_ini("sweep = 1, x\n")).field() == "engine.sweep");
    CHECK(config_error(valid_ini() + "[output]\nname = ../escape\n").field() == "output.name");
    CHECK(config_error("[grammars]\nf9 = wildcard\n").field().rfind("grammars", 0) == 0);
    auto missing = valid_ini();
    missing.replace(missing.find("f3_mini.xml"), 11, "absent.xml");
    CHECK(config_error(missing).field() == "grammars.f3");
  }

  TEST_CASE("zero noise is exact in every mode") {
    auto cfg = fixture_config();
    cfg.noise.p_sub = 0.0;
    cfg.trials = 200;
    auto r = run_experiment(cfg);
    for (const auto& m : r.modes) {
      CAPTURE(to_string(m.mode));
      CHECK(m.mean_distance == 0.0);
      CHECK(m.mean_corrected_distance == 0.0);
      CHECK(m.frame_accuracy == 1.0);
      CHECK(m.acceptance_rate == 1.0);
    }
  }

  TEST_CASE("report invariants and language accounting") {
    auto cfg = fixture_config();
    cfg.trials = 300;
    auto r = run_experiment(cfg);
    REQUIRE(r.modes.size() == 3);
    for (const auto& m : r.modes) {
      for (double rate : {m.acceptance_rate, m.frame_accuracy, m.ux_score}) {
        CHECK(rate >= 0.0);
        CHECK(rate <= 1.0);
      }
      CHECK(m.valid_frames + m.invalid_frames == m.processed);
      CHECK(m.language_valid + m.language_invalid == m.language_count);
      CHECK(m.frontier.size() == 3);
    }
    // Every f3_mini string asks for a value of "policy number" without an id,
    // and AG1001 owns exactly one policy, so all 24 are answerable.
    CHECK(r.mode(Mode::F3).language_count == 24);
    CHECK(r.mode(Mode::F3).language_valid == 24);
    CHECK(r.mode(Mode::F2).language_valid == 2);
    CHECK(r.mode(Mode::F1).language_invalid == 1);
  }

  TEST_CASE("reports are deterministic and round-trip") {
    auto cfg = fixture_config();
    cfg.trials = 200;
    auto a = run_experiment(cfg);
    auto b = run_experiment(cfg);
    CHECK(render_report(a, ReportFormat::Json) == render_report(b, ReportFormat::Json));
    CHECK(render_report(a, ReportFormat::Table) == render_report(b, ReportFormat::Table));
    CHECK(parse_report(render_report(a, ReportFormat::Json)) == a);
    CHECK(render_report(parse_report(render_report(a, ReportFormat::Json)), ReportFormat::Json) ==
          render_report(a, ReportFormat::Json));
    CHECK_THROWS_AS(parse_report("{"), std::invalid_argument);
    CHECK_THROWS_AS(parse_report("{\"seed\": 1}"), std::invalid_argument);

    cfg.seed = 43;
    CHECK(run_experiment(cfg).config_hash != a.config_hash);
  }

  TEST_CASE("table has one row per mode") {
    auto cfg = fixture_config();
    cfg.trials = 20;
    cfg.sweep.clear();
    auto table = render_report(run_experiment(cfg), ReportFormat::Table);
    CHECK(table.find("\nF1 ") != std::string::npos);
    CHECK(table.find("\nF3 ") != std::string::npos);
    CHECK(table.find("frontier") == std::string::npos);

    cfg.grammars = {{Mode::F3, fs::path(fixture("grammars/f3_mini.xml"))}};
    auto single = render_report(run_experiment(cfg), ReportFormat::Table);
    CHECK(single.find("\nF1 ") == std::string::npos);
    CHECK(single.find("\nF3 ") != std::string::npos);
    CHECK(std::count(single.begin(), single.end(), '\n') == 3);
  }
}
