#include "longtail/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "longtail/errors.hpp"

namespace longtail {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool valid_key(std::string_view key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.' || c == '-';
  });
}

void flatten(const nlohmann::json& node, const std::string& prefix, Config& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      if (!valid_key(key)) throw ConfigError("invalid key '" + key + "'");
      flatten(value, prefix.empty() ? key : prefix + "." + key, out);
    }
    return;
  }
  if (prefix.empty()) throw ConfigError("JSON configuration must be an object");
  auto scalar = [&](const nlohmann::json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw ConfigError("unsupported JSON value for '" + prefix + "'");
  };
  if (node.is_array()) {
    std::string joined;
    for (const auto& v : node) {
      if (!joined.empty()) joined += ',';
      joined += scalar(v);
    }
    out.set(prefix, joined);
  } else {
    out.set(prefix, scalar(node));
  }
}

}  // namespace

Config Config::parse(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_json(text);
  return parse_text(text);
}

Config Config::parse_text(std::string_view text) {
  Config cfg;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto cut = raw.find_first_of("#;");
    const std::string line = trim(std::string_view(raw).substr(0, cut));
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + why);
    };
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!valid_key(section)) fail("invalid section name '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (!valid_key(key)) fail("invalid key '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.has(full)) fail("duplicate key '" + full + "'");
    cfg.set(full, trim(std::string_view(line).substr(eq + 1)));
  }
  return cfg;
}

Config Config::parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  Config cfg;
  flatten(doc, "", cfg);
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

void Config::set(const std::string& key, std::string value) { entries_[key] = std::move(value); }

std::string Config::get_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing key '" + key + "'");
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "' is not a number: '" + v + "'");
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::optional<double> Config::get_optional_double(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return get_double(key);
}

namespace {

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  const bool hex = v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X');
  const bool digits = !v.empty() && v.find_first_not_of(hex ? "0123456789abcdefABCDEFxX" : "0123456789") == std::string::npos;
  if (digits) {
    try {
      return std::stoull(v, nullptr, hex ? 16 : 10);
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("key '" + key + "' is not a non-negative integer: '" + v + "'");
}

}  // namespace

std::uint64_t Config::get_u64(const std::string& key) const { return parse_u64(key, get_string(key)); }

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? get_u64(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = get_string(key);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<std::string> Config::get_list(const std::string& key) const {
  std::vector<std::string> items;
  std::istringstream in(get_string(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) items.push_back(std::move(t));
  }
  return items;
}

std::vector<std::uint64_t> Config::get_u64_list(const std::string& key) const {
  std::vector<std::uint64_t> out;
  for (const auto& item : get_list(key)) out.push_back(parse_u64(key, item));
  return out;
}

}  // namespace longtail
