#include "nsdwav_cli/key_value.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace nsdwav::cli {

ConfigError::ConfigError(std::size_t line, std::string field, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + field + ": " + message
                                  : field + ": " + message),
      line_(line),
      field_(std::move(field)) {}

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

KeyValues KeyValues::parse(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string content = trim(line);
    if (content.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line_no, content, "expected 'key = value'");
    }
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "(empty)", "missing key before '='");
    if (kv.values_.count(key)) throw ConfigError(line_no, key, "duplicate key");
    kv.values_[key] = value;
    kv.lines_[key] = line_no;
    if (end == text.size()) break;
  }
  return kv;
}

KeyValues KeyValues::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, path, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

void KeyValues::set(const std::string& key, std::string value) {
  values_[key] = std::move(value);
  lines_.erase(key);
}

std::optional<std::string> KeyValues::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValues::get_or(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

std::size_t KeyValues::line_of(const std::string& key) const {
  const auto it = lines_.find(key);
  return it == lines_.end() ? 0 : it->second;
}

void KeyValues::fail(const std::string& key, const std::string& message) const {
  throw ConfigError(line_of(key), key, message);
}

double KeyValues::get_double(const std::string& key) const {
  const auto text = get(key);
  if (!text) fail(key, "missing value");
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
  if (text->empty() || ec != std::errc{} || ptr != text->data() + text->size()) {
    fail(key, "expected a number, got '" + *text + "'");
  }
  return value;
}

long long KeyValues::get_int(const std::string& key) const {
  const auto text = get(key);
  if (!text) fail(key, "missing value");
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
  if (text->empty() || ec != std::errc{} || ptr != text->data() + text->size()) {
    fail(key, "expected an integer, got '" + *text + "'");
  }
  return value;
}

bool KeyValues::get_bool(const std::string& key) const {
  const auto text = get(key);
  if (!text) fail(key, "missing value");
  if (*text == "true" || *text == "1" || *text == "yes") return true;
  if (*text == "false" || *text == "0" || *text == "no") return false;
  fail(key, "expected true or false, got '" + *text + "'");
}

std::vector<std::string> KeyValues::get_list(const std::string& key) const {
  const auto text = get(key);
  if (!text) fail(key, "missing value");
  std::vector<std::string> items;
  std::string_view rest = *text;
  while (true) {
    const auto comma = rest.find(',');
    const std::string item = trim(rest.substr(0, comma));
    if (item.empty()) fail(key, "empty list element");
    items.push_back(item);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return items;
}

void KeyValues::require_known(const std::vector<std::string>& allowed) const {
  for (const auto& [key, value] : values_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail(key, "unknown key");
  }
}

std::string KeyValues::serialize() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + " = " + value + "\n";
  return out;
}

}  // namespace nsdwav::cli
