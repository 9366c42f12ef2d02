// SPDX-License-Identifier: Apache-2.0

#include "selfhelp/sms.hpp"

#include <cctype>
#include <stdexcept>

#include <httplib.h>

namespace selfhelp {

std::string to_string(SmsStatus s) {
  switch (s) {
    case SmsStatus::Accepted: return "accepted";
    case SmsStatus::Rejected: return "rejected";
    case SmsStatus::Unreachable: return "unreachable";
  }
  return "?";
}

std::string url_encode(std::string_view s) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xF];
    }
  }
  return out;
}

std::string url_decode(std::string_view s) {
  auto nibble = [&](char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("malformed percent escape in '" + std::string(s) + "'");
  };
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%') {
      if (i + 2 >= s.size()) throw std::invalid_argument("truncated percent escape in '" + std::string(s) + "'");
      out += static_cast<char>(nibble(s[i + 1]) * 16 + nibble(s[i + 2]));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::string sendsms_target(const SmsGateway& gw, const std::string& to, const std::string& text) {
  return "/cgi-bin/sendsms?username=" + url_encode(gw.username) + "&password=" + url_encode(gw.password) +
         "&to=" + url_encode(to) + "&text=" + url_encode(text);
}

SmsReceipt send_sms(const SmsGateway& gw, const std::string& to, const AnswerText& text) {
  if (to.empty()) throw std::invalid_argument("send_sms: empty destination");
  SmsReceipt r;
  r.destination = to;
  auto target = sendsms_target(gw, to, text.text);
  r.request_url = gw.url + target;

  httplib::Client cli(gw.url);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(gw.timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(gw.timeout - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());
  auto res = cli.Get(target);
  if (!res) return r;
  r.http_status = res->status;
  r.status = (res->status == 200 || res->status == 202) ? SmsStatus::Accepted : SmsStatus::Rejected;
  return r;
}

namespace {

std::vector<std::pair<std::string, std::string>> split_query(std::string_view query) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t b = 0;
  while (b <= query.size()) {
    auto e = query.find('&', b);
    if (e == std::string_view::npos) e = query.size();
    auto item = query.substr(b, e - b);
    if (!item.empty()) {
      auto eq = item.find('=');
      if (eq == std::string_view::npos) out.emplace_back(url_decode(item), "");
      else out.emplace_back(url_decode(item.substr(0, eq)), url_decode(item.substr(eq + 1)));
    }
    b = e + 1;
  }
  return out;
}

}  // namespace

struct SmsGatewayStub::Impl {
  httplib::Server server;
};

SmsGatewayStub::SmsGatewayStub(int status, std::string username, std::string password)
    : impl_(std::make_unique<Impl>()) {
  impl_->server.Get("/cgi-bin/sendsms", [this, status, username, password](const httplib::Request& req,
                                                                           httplib::Response& res) {
    Request rec;
    auto q = req.target.find('?');
    rec.raw_target = req.target;
    if (q != std::string::npos) {
      try {
        for (const auto& kv : split_query(std::string_view(req.target).substr(q + 1))) rec.params[kv.first] = kv.second;
      } catch (const std::invalid_argument&) {
        res.status = 400;
        return;
      }
    }
    {
      std::lock_guard lock(mu_);
      requests_.push_back(rec);
    }
    for (const char* key : {"username", "password", "to", "text"}) {
      if (!rec.params.count(key)) {
        res.status = 400;
        res.set_content(std::string("missing ") + key, "text/plain");
        return;
      }
    }
    if (rec.params["username"] != username || rec.params["password"] != password) {
      res.status = 403;
      res.set_content("Authorization failed for sendsms", "text/plain");
      return;
    }
    res.status = status;
    res.set_content(status == 202 ? "0: Accepted for delivery" : "stub status", "text/plain");
  });
  port_ = impl_->server.bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw std::runtime_error("sms stub: cannot bind a loopback port");
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

SmsGatewayStub::~SmsGatewayStub() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

std::string SmsGatewayStub::url() const { return "http://127.0.0.1:" + std::to_string(port_); }

std::vector<SmsGatewayStub::Request> SmsGatewayStub::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

}  // namespace selfhelp
