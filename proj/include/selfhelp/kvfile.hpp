// SPDX-License-Identifier: Apache-2.0
//
// INI-style key-value documents used for lexicons, datasets and experiment
// configs:
//
//   # comment
//   [section]
//   key = value

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace selfhelp {

/// Malformed or missing configuration. `field()` is the dotted path of the
/// offending entry ("noise.p_sub"), or the file when the syntax is broken.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class KvFile {
 public:
  static KvFile load(const std::filesystem::path& path);
  static KvFile parse(std::string_view text, std::string origin = "<memory>");

  /// Section names in file order.
  std::vector<std::string> sections() const;
  std::vector<std::string> keys(std::string_view section) const;
  bool has_section(std::string_view section) const;

  std::optional<std::string> find(std::string_view section, std::string_view key) const;
  std::string get(std::string_view section, std::string_view key) const;
  double get_double(std::string_view section, std::string_view key) const;
  double get_double(std::string_view section, std::string_view key, double fallback) const;
  std::uint64_t get_uint(std::string_view section, std::string_view key) const;
  std::uint64_t get_uint(std::string_view section, std::string_view key, std::uint64_t fallback) const;
  bool get_bool(std::string_view section, std::string_view key, bool fallback) const;
  /// Splits on `sep`, trims items and drops empty ones.
  std::vector<std::string> get_list(std::string_view section, std::string_view key, char sep) const;

  /// `value` interpreted relative to the directory holding this file.
  std::filesystem::path resolve(const std::string& value) const;

  const std::string& origin() const { return origin_; }

 private:
  const boost::property_tree::ptree* section_tree(std::string_view section) const;

  boost::property_tree::ptree tree_;
  std::string origin_;
  std::filesystem::path base_dir_;
};

std::string trim(std::string_view s);
std::vector<std::string> split_list(std::string_view s, char sep);

}  // namespace selfhelp
