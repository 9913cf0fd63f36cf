#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nsdwav::cli {

// Flat "key = value" text with '#' comments. Used for bench configs and
// run manifests.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, std::string field, const std::string& message);
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class KeyValues {
 public:
  static KeyValues parse(std::string_view text);
  static KeyValues load(const std::string& path);

  void set(const std::string& key, std::string value);
  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  void erase(const std::string& key) { values_.erase(key); lines_.erase(key); }
  // Source line of `key`, 0 when it was set programmatically or is absent.
  std::size_t line_of(const std::string& key) const;

  // Typed accessors; failures raise ConfigError naming the key and its line.
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key) const;

  // Throws ConfigError for the first key not in `allowed`.
  void require_known(const std::vector<std::string>& allowed) const;

  const std::map<std::string, std::string>& entries() const noexcept { return values_; }
  // Sorted "key = value" lines.
  std::string serialize() const;

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

  std::map<std::string, std::string> values_;
  std::map<std::string, std::size_t> lines_;
};

std::string trim(std::string_view text);

}  // namespace nsdwav::cli
