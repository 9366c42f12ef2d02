// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include "fixtures.hpp"
#include "selfhelp/backend.hpp"
#include "selfhelp/kvfile.hpp"

using namespace selfhelp;

namespace {

const DataStore& store() {
  static const DataStore s = DataStore::load_file(fixture("insurance.ini"));
  return s;
}

const IntentSchema& schema() {
  static const Domain d = load_domain_file(fixture("domain.ini"));
  return d.schema;
}

QueryFrame frame(std::string intent, std::optional<std::string> policy, FrameStatus status = FrameStatus::valid()) {
  QueryFrame f;
  f.intent = std::move(intent);
  if (policy) f.slots["policy_id"] = *policy;
  f.status = std::move(status);
  return f;
}

}  // namespace

TEST_SUITE("backend") {
  TEST_CASE("money") {
    CHECK(Money::parse("184250").str() == "184250.00");
    CHECK(Money::parse("184250.5").str() == "184250.50");
    CHECK(Money::parse("0.07").cents() == 7);
    CHECK(Money::from_cents(1234567).str() == "12345.67");
    CHECK(Money::parse("1.10") < Money::parse("1.2"));
    for (const char* bad : {"", "-1", "1.234", "1,000", "abc", ".5", "99999999999999999999"})
      CHECK_THROWS_AS(Money::parse(bad), std::invalid_argument);
    CHECK_THROWS_AS(Money::from_cents(-1), std::invalid_argument);
  }

  TEST_CASE("lookup_policy") {
    const auto& r = lookup_policy(store(), "TRS1027465");
    CHECK(r.holder == "Anil Kumar");
    CHECK(r.surrender_value.str() == "184250.00");
    CHECK(r.maturity_value.str() == "500000.00");
    for (const char* absent : {"TRS0000000", "XYZ", "trs1027465"}) {
      try {
        lookup_policy(store(), absent);
        FAIL("expected NotFound");
      } catch (const BackendError& e) {
        CHECK(e.code() == BackendError::Code::NotFound);
      }
    }
  }

  TEST_CASE("store contents and validation") {
    CHECK(store().policies().size() == 3);
    CHECK(store().agent("AG1001").owned_policies == std::vector<std::string>{"TRS1027465"});
    CHECK(store().agent("AG2002").owned_policies.size() == 2);
    CHECK_THROWS_AS(store().agent("AG9999"), BackendError);
    DataStore s;
    PolicyRecord bad;
    bad.policy_id = "TR1027465";
    CHECK_THROWS_AS(s.add_policy(bad), std::invalid_argument);
    CHECK_THROWS_AS(s.add_agent({"", {}, std::nullopt}), std::invalid_argument);
    CHECK_THROWS_AS(DataStore::load(KvFile::parse("[policy:TRS1027465]\nsurrender_value = -5\n")), ConfigError);
    CHECK_THROWS_AS(DataStore::load(KvFile::parse("[vehicle:X]\na = b\n")), ConfigError);
  }

  TEST_CASE("answers") {
    auto ctx = store().agent("AG1001");
    auto a = answer(frame("surrender_value", "TRS1027465"), schema(), store(), ctx);
    CHECK(a.text == "Surrender value of policy TRS1027465 is 184250.00.");
    CHECK(a.template_id == "surrender_value");
    CHECK(a.frame_echo == "surrender_value(policy_id=TRS1027465) Valid");

    auto c = answer(frame("last_commission", std::nullopt), schema(), store(), ctx);
    CHECK(c.text == "Your last commission of 12450.00 was paid on 2008-03-31.");

    auto m = answer(frame("surrender_value", "TRS1027465", FrameStatus::assumed({"policy_id"})), schema(), store(), ctx);
    CHECK(m.text == "Assuming policy TRS1027465: Surrender value of policy TRS1027465 is 184250.00.");
  }

  TEST_CASE("answer errors") {
    auto ctx = store().agent("AG1001");
    auto code = [&](const QueryFrame& f, const IntentSchema& sc, const DataStore& st) {
      try {
        answer(f, sc, st, ctx);
      } catch (const BackendError& e) {
        return e.code();
      }
      FAIL("expected a BackendError");
      return BackendError::Code::NotFound;
    };
    CHECK(code(frame("surrender_value", std::nullopt, FrameStatus::invalid("missing_slot:policy_id")), schema(),
               store()) == BackendError::Code::InvalidFrame);
    CHECK(code(frame("surrender_value", "TRS0000000"), schema(), store()) == BackendError::Code::NotFound);
    DataStore odd = store();
    odd.add_template("surrender_value", "Value {teleport}");
    CHECK(code(frame("surrender_value", "TRS1027465"), schema(), odd) == BackendError::Code::MissingTemplate);
  }

  TEST_CASE("every valid frame renders fully and deterministically") {
    for (const auto& [agent_id, ctx] : store().agents())
      for (const auto& [intent, spec] : schema().intents)
        for (const auto& [pid, rec] : store().policies()) {
          auto f = frame(intent, spec.required.empty() ? std::nullopt : std::optional<std::string>(pid));
          auto a = answer(f, schema(), store(), ctx);
          CHECK_FALSE(a.text.empty());
          CHECK(a.text.find('{') == std::string::npos);
          CHECK(a.text.find('}') == std::string::npos);
          CHECK(answer(f, schema(), store(), ctx).text == a.text);
        }
  }
}
