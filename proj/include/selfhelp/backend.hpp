// SPDX-License-Identifier: Apache-2.0
//
// Mock insurance database and answer rendering.

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "selfhelp/nl_engine.hpp"

namespace selfhelp {

class KvFile;

class BackendError : public std::runtime_error {
 public:
  enum class Code { NotFound, InvalidFrame, MissingTemplate };
  BackendError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

/// Non-negative currency amount in hundredths.
class Money {
 public:
  Money() = default;
  static Money from_cents(std::int64_t cents);
  /// "184250", "184250.5" or "184250.50". Throws std::invalid_argument.
  static Money parse(std::string_view s);
  std::int64_t cents() const { return cents_; }
  /// Always two decimals: "184250.50".
  std::string str() const;
  friend auto operator<=>(const Money&, const Money&) = default;

 private:
  std::int64_t cents_ = 0;
};

struct PolicyRecord {
  std::string policy_id;
  std::string holder;
  Money surrender_value;
  Money maturity_value;
  std::string status;
  bool address_change_pending = false;
};

struct CommissionRecord {
  Money amount;
  std::string paid_on;
};

/// Immutable after load.
class DataStore {
 public:
  /// Sections [policy:<id>], [agent:<id>], [commission:<ref>] and
  /// [template:<id>] with a `text` entry. Throws ConfigError.
  static DataStore load(const KvFile& file);
  static DataStore load_file(const std::string& path);

  void add_policy(PolicyRecord r);
  void add_agent(AgentContext ctx);
  void add_commission(std::string ref, CommissionRecord r);
  void add_template(std::string id, std::string text);

  const std::map<std::string, PolicyRecord>& policies() const { return policies_; }
  const std::map<std::string, AgentContext>& agents() const { return agents_; }
  /// Throws BackendError(NotFound).
  const AgentContext& agent(const std::string& id) const;
  const CommissionRecord& commission(const std::string& ref) const;
  const std::string& template_text(const std::string& id) const;

 private:
  std::map<std::string, PolicyRecord> policies_;
  std::map<std::string, AgentContext> agents_;
  std::map<std::string, CommissionRecord> commissions_;
  std::map<std::string, std::string> templates_;
};

/// Exact-match lookup. Throws BackendError(NotFound).
const PolicyRecord& lookup_policy(const DataStore& store, const std::string& policy_id);

struct AnswerText {
  std::string text;
  std::string template_id;
  std::string frame_echo;
};

/// Renders the intent's template. {placeholders}: policy_id, holder,
/// surrender_value, maturity_value, status, address_change, agent_id,
/// commission_amount, commission_date. Assumed frames are prefixed with the
/// assumption made. Throws BackendError (InvalidFrame, NotFound,
/// MissingTemplate).
AnswerText answer(const QueryFrame& frame, const IntentSchema& schema, const DataStore& store,
                  const AgentContext& ctx);

}  // namespace selfhelp
