// SPDX-License-Identifier: Apache-2.0
//
// Client for a Kannel-style SMS gateway (HTTP GET /cgi-bin/sendsms) and a
// loopback stub of the gateway for tests and demos.

#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "selfhelp/backend.hpp"

namespace selfhelp {

struct SmsGateway {
  std::string url;  // "http://host:port"
  std::string username = "selfhelp";
  std::string password = "selfhelp";
  std::chrono::milliseconds timeout{2000};
};

enum class SmsStatus { Accepted, Rejected, Unreachable };
std::string to_string(SmsStatus s);

struct SmsReceipt {
  std::string destination;
  SmsStatus status = SmsStatus::Unreachable;
  int http_status = 0;  // 0 when no response arrived
  std::string request_url;
};

/// Percent-encodes everything outside the RFC 3986 unreserved set.
std::string url_encode(std::string_view s);
/// Inverse of url_encode; also maps '+' to a space. Throws
/// std::invalid_argument on a malformed escape.
std::string url_decode(std::string_view s);

/// Path and query of the sendsms request for `text` to `to`.
std::string sendsms_target(const SmsGateway& gw, const std::string& to, const std::string& text);

/// HTTP 200/202 -> Accepted, other responses -> Rejected, no response ->
/// Unreachable. Throws std::invalid_argument for an empty destination.
SmsReceipt send_sms(const SmsGateway& gw, const std::string& to, const AnswerText& text);

/// In-process gateway bound to 127.0.0.1 on an ephemeral port. Well-formed
/// requests get `status` (202 unless configured); requests missing a
/// parameter or with wrong credentials get 400/403.
class SmsGatewayStub {
 public:
  struct Request {
    std::string raw_target;
    std::map<std::string, std::string> params;  // decoded
  };

  explicit SmsGatewayStub(int status = 202, std::string username = "selfhelp", std::string password = "selfhelp");
  ~SmsGatewayStub();
  SmsGatewayStub(const SmsGatewayStub&) = delete;
  SmsGatewayStub& operator=(const SmsGatewayStub&) = delete;

  int port() const { return port_; }
  std::string url() const;
  std::vector<Request> requests() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mu_;
  std::vector<Request> requests_;
};

}  // namespace selfhelp
