#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace longtail {

/// Flat dotted-key configuration.
///
/// Text grammar, one entry per line:
///   line    := blank | comment | section | entry
///   comment := ('#' | ';') any*
///   section := '[' key ']'          -- prefixes following keys with "key."
///   entry   := key ws* '=' ws* value ws* comment?
///   key     := [A-Za-z0-9_.-]+
/// Values keep inner spaces; lists are comma separated. A document whose
/// first non-blank character is '{' is parsed as JSON instead; nested
/// objects flatten to dotted keys, arrays to comma-separated lists.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config parse_text(std::string_view text);
  static Config parse_json(std::string_view text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, std::string value);

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::optional<double> get_optional_double(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;
  std::vector<std::uint64_t> get_u64_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace longtail
