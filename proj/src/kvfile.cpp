// SPDX-License-Identifier: Apache-2.0

#include "selfhelp/kvfile.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

namespace selfhelp {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t b = 0;
  while (b <= s.size()) {
    auto e = s.find(sep, b);
    if (e == std::string_view::npos) e = s.size();
    auto item = trim(s.substr(b, e - b));
    if (!item.empty()) out.push_back(std::move(item));
    b = e + 1;
  }
  return out;
}

KvFile KvFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  KvFile f = parse(ss.str(), path.string());
  f.base_dir_ = path.parent_path();
  return f;
}

KvFile KvFile::parse(std::string_view text, std::string origin) {
  KvFile f;
  f.origin_ = std::move(origin);
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, f.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(f.origin_ + ":" + std::to_string(e.line()), e.message());
  }
  for (const auto& [name, child] : f.tree_)
    if (child.empty() && !child.data().empty())
      throw ConfigError(f.origin_ + ":" + name, "key outside of any [section]");
  return f;
}

const pt::ptree* KvFile::section_tree(std::string_view section) const {
  // Section names may contain the ptree path separator, so look them up
  // literally rather than through get_child().
  for (const auto& [name, child] : tree_)
    if (name == section) return &child;
  return nullptr;
}

std::vector<std::string> KvFile::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, child] : tree_) out.push_back(name);
  return out;
}

std::vector<std::string> KvFile::keys(std::string_view section) const {
  std::vector<std::string> out;
  if (auto* s = section_tree(section))
    for (const auto& [k, v] : *s) out.push_back(k);
  return out;
}

bool KvFile::has_section(std::string_view section) const { return section_tree(section) != nullptr; }

std::optional<std::string> KvFile::find(std::string_view section, std::string_view key) const {
  auto* s = section_tree(section);
  if (!s) return std::nullopt;
  for (const auto& [k, v] : *s)
    if (k == key) return trim(v.data());
  return std::nullopt;
}

namespace {

std::string field(std::string_view section, std::string_view key) {
  return std::string(section) + "." + std::string(key);
}

}  // namespace

std::string KvFile::get(std::string_view section, std::string_view key) const {
  auto v = find(section, key);
  if (!v) throw ConfigError(field(section, key), "missing required entry in " + origin_);
  return *v;
}

double KvFile::get_double(std::string_view section, std::string_view key) const {
  auto raw = get(section, key);
  try {
    std::size_t used = 0;
    double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field(section, key), "expected a number, got '" + raw + "'");
  }
}

double KvFile::get_double(std::string_view section, std::string_view key, double fallback) const {
  return find(section, key) ? get_double(section, key) : fallback;
}

std::uint64_t KvFile::get_uint(std::string_view section, std::string_view key) const {
  auto raw = get(section, key);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc() || p != raw.data() + raw.size())
    throw ConfigError(field(section, key), "expected a non-negative integer, got '" + raw + "'");
  return v;
}

std::uint64_t KvFile::get_uint(std::string_view section, std::string_view key, std::uint64_t fallback) const {
  return find(section, key) ? get_uint(section, key) : fallback;
}

bool KvFile::get_bool(std::string_view section, std::string_view key, bool fallback) const {
  auto v = find(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "yes" || *v == "1") return true;
  if (*v == "false" || *v == "no" || *v == "0") return false;
  throw ConfigError(field(section, key), "expected true or false, got '" + *v + "'");
}

std::vector<std::string> KvFile::get_list(std::string_view section, std::string_view key, char sep) const {
  auto v = find(section, key);
  if (!v) return {};
  return split_list(*v, sep);
}

std::filesystem::path KvFile::resolve(const std::string& value) const {
  std::filesystem::path p(value);
  if (p.is_absolute() || base_dir_.empty()) return p;
  return base_dir_ / p;
}

}  // namespace selfhelp
