// SPDX-License-Identifier: Apache-2.0

#include "selfhelp/backend.hpp"

#include <charconv>
#include <regex>

#include "selfhelp/kvfile.hpp"

namespace selfhelp {

using Code = BackendError::Code;

Money Money::from_cents(std::int64_t cents) {
  if (cents < 0) throw std::invalid_argument("negative amount");
  Money m;
  m.cents_ = cents;
  return m;
}

Money Money::parse(std::string_view s) {
  static const std::regex shape(R"(([0-9]+)(?:\.([0-9]{1,2}))?)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(s.begin(), s.end(), m, shape))
    throw std::invalid_argument("malformed amount '" + std::string(s) + "'");
  std::int64_t whole = 0;
  auto ws = m[1].str();
  auto [p, ec] = std::from_chars(ws.data(), ws.data() + ws.size(), whole);
  if (ec != std::errc() || whole > INT64_MAX / 100 - 1) throw std::invalid_argument("amount out of range");
  std::int64_t frac = 0;
  if (m[2].matched) {
    auto f = m[2].str();
    frac = std::stoll(f) * (f.size() == 1 ? 10 : 1);
  }
  return from_cents(whole * 100 + frac);
}

std::string Money::str() const {
  auto frac = cents_ % 100;
  return std::to_string(cents_ / 100) + (frac < 10 ? ".0" : ".") + std::to_string(frac);
}

void DataStore::add_policy(PolicyRecord r) {
  static const std::regex id_shape("[A-Z]{3}[0-9]{7}");
  if (!std::regex_match(r.policy_id, id_shape))
    throw std::invalid_argument("policy id '" + r.policy_id + "' is not 3 letters + 7 digits");
  auto id = r.policy_id;
  if (!policies_.emplace(id, std::move(r)).second) throw std::invalid_argument("duplicate policy " + id);
}

void DataStore::add_agent(AgentContext ctx) {
  if (ctx.agent_id.empty()) throw std::invalid_argument("agent id must be non-empty");
  auto id = ctx.agent_id;
  agents_[id] = std::move(ctx);
}

void DataStore::add_commission(std::string ref, CommissionRecord r) { commissions_[std::move(ref)] = std::move(r); }
void DataStore::add_template(std::string id, std::string text) { templates_[std::move(id)] = std::move(text); }

const AgentContext& DataStore::agent(const std::string& id) const {
  auto it = agents_.find(id);
  if (it == agents_.end()) throw BackendError(Code::NotFound, "agent " + id + " not found");
  return it->second;
}

const CommissionRecord& DataStore::commission(const std::string& ref) const {
  auto it = commissions_.find(ref);
  if (it == commissions_.end()) throw BackendError(Code::NotFound, "commission record " + ref + " not found");
  return it->second;
}

const std::string& DataStore::template_text(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw BackendError(Code::MissingTemplate, "no answer template " + id);
  return it->second;
}

DataStore DataStore::load(const KvFile& f) {
  DataStore store;
  auto money = [&](const std::string& section, const char* key) {
    auto raw = f.get(section, key);
    try {
      return Money::parse(raw);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(section + "." + key, e.what());
    }
  };
  for (const auto& section : f.sections()) {
    auto colon = section.find(':');
    auto kind = section.substr(0, colon);
    auto id = colon == std::string::npos ? std::string() : section.substr(colon + 1);
    if (id.empty()) throw ConfigError(section, "expected [<kind>:<id>]");
    try {
      if (kind == "policy") {
        PolicyRecord r;
        r.policy_id = id;
        r.holder = f.get(section, "holder");
        r.surrender_value = money(section, "surrender_value");
        r.maturity_value = money(section, "maturity_value");
        r.status = f.get(section, "status");
        r.address_change_pending = f.get_bool(section, "address_change_pending", false);
        store.add_policy(std::move(r));
      } else if (kind == "agent") {
        AgentContext ctx;
        ctx.agent_id = id;
        ctx.owned_policies = f.get_list(section, "policies", ',');
        if (auto ref = f.find(section, "last_commission"); ref && !ref->empty()) ctx.last_commission_ref = *ref;
        store.add_agent(std::move(ctx));
      } else if (kind == "commission") {
        store.add_commission(id, {money(section, "amount"), f.get(section, "paid_on")});
      } else if (kind == "template") {
        store.add_template(id, f.get(section, "text"));
      } else {
        throw ConfigError(section, "unknown section kind '" + kind + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(section, e.what());
    }
  }
  return store;
}

DataStore DataStore::load_file(const std::string& path) { return load(KvFile::load(path)); }

const PolicyRecord& lookup_policy(const DataStore& store, const std::string& policy_id) {
  auto it = store.policies().find(policy_id);
  if (it == store.policies().end()) throw BackendError(Code::NotFound, "policy " + policy_id + " not found");
  return it->second;
}

namespace {

std::string render(const std::string& tmpl, const std::map<std::string, std::string>& fields,
                   const std::string& template_id) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    auto open = tmpl.find('{', i);
    if (open == std::string::npos) {
      out.append(tmpl, i);
      break;
    }
    out.append(tmpl, i, open - i);
    auto close = tmpl.find('}', open);
    if (close == std::string::npos)
      throw BackendError(Code::MissingTemplate, "template " + template_id + " has an unterminated placeholder");
    auto name = tmpl.substr(open + 1, close - open - 1);
    auto it = fields.find(name);
    if (it == fields.end())
      throw BackendError(Code::MissingTemplate,
                         "template " + template_id + " uses {" + name + "} which this query cannot fill");
    out += it->second;
    i = close + 1;
  }
  return out;
}

}  // namespace

AnswerText answer(const QueryFrame& frame, const IntentSchema& schema, const DataStore& store,
                  const AgentContext& ctx) {
  if (!frame.status.answerable() || !frame.intent)
    throw BackendError(Code::InvalidFrame, "cannot answer frame " + frame.str());
  const IntentSpec* spec = schema.find(*frame.intent);
  if (!spec) throw BackendError(Code::InvalidFrame, "unknown intent " + *frame.intent);

  std::map<std::string, std::string> fields;
  fields["agent_id"] = ctx.agent_id;
  for (const auto& [k, v] : frame.slots) fields[k] = v;
  if (auto it = frame.slots.find(std::string(kPolicySlot)); it != frame.slots.end()) {
    const auto& p = lookup_policy(store, it->second);
    fields["holder"] = p.holder;
    fields["surrender_value"] = p.surrender_value.str();
    fields["maturity_value"] = p.maturity_value.str();
    fields["status"] = p.status;
    fields["address_change"] = p.address_change_pending ? "pending" : "not pending";
  }
  if (spec->needs_agent && ctx.last_commission_ref) {
    const auto& c = store.commission(*ctx.last_commission_ref);
    fields["commission_amount"] = c.amount.str();
    fields["commission_date"] = c.paid_on;
  }

  AnswerText a;
  a.template_id = spec->answer_template;
  a.frame_echo = frame.str();
  a.text = render(store.template_text(a.template_id), fields, a.template_id);
  if (frame.status.kind() == FrameStatus::Kind::Assumed) {
    std::string notice = "Assuming";
    for (const auto& slot : frame.status.assumed_slots()) {
      std::string label = slot == kPolicySlot ? "policy" : slot;
      notice += " " + label + " " + frame.slots.at(slot);
    }
    a.text = notice + ": " + a.text;
  }
  return a;
}

}  // namespace selfhelp
