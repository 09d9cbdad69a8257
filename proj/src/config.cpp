#include "morphgen/config.hpp"

#include <charconv>
#include <fstream>
#include <vector>

#include "morphgen/error.hpp"
#include "morphgen/text.hpp"

namespace morphgen {

KeyValueConfig KeyValueConfig::parse(std::istream& in, std::string_view source) {
  KeyValueConfig cfg;
  cfg.source_ = std::string(source);
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    auto hash = line.find('#');
    auto t = text::trim(std::string_view(line).substr(0, hash));
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(cfg.source_ + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key(text::trim(t.substr(0, eq)));
    std::string value(text::trim(t.substr(eq + 1)));
    if (key.empty()) throw ParseError(cfg.source_ + ":" + std::to_string(lineno) + ": empty key");
    auto [it, inserted] = cfg.values_.emplace(key, Value{value, lineno});
    if (!inserted) {
      throw ParseError(cfg.source_ + ":" + std::to_string(lineno) + ": duplicate key '" + key + "' (first on line " +
                       std::to_string(it->second.line) + ")");
    }
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  return parse(in, path.string());
}

const KeyValueConfig::Value* KeyValueConfig::lookup(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  used_[std::string(key)] = true;
  return &it->second;
}

void KeyValueConfig::bad_value(std::string_view key, std::string_view expected) const {
  const auto* v = lookup(key);
  throw UsageError(source_ + ":" + std::to_string(v ? v->line : 0) + ": " + std::string(key) + " must be " +
                   std::string(expected) + ", got '" + (v ? v->text : "") + "'");
}

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
  const auto* v = lookup(key);
  if (!v) return std::nullopt;
  return v->text;
}

std::string KeyValueConfig::get_string(std::string_view key, std::string_view fallback) const {
  auto v = get(key);
  return v ? *v : std::string(fallback);
}

std::int64_t KeyValueConfig::get_int(std::string_view key, std::int64_t fallback) const {
  const auto* v = lookup(key);
  if (!v) return fallback;
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v->text.data(), v->text.data() + v->text.size(), out);
  if (ec != std::errc() || ptr != v->text.data() + v->text.size()) bad_value(key, "an integer");
  return out;
}

double KeyValueConfig::get_double(std::string_view key, double fallback) const {
  const auto* v = lookup(key);
  if (!v) return fallback;
  try {
    return text::parse_double(v->text);
  } catch (const Error&) {
    bad_value(key, "a number");
  }
}

bool KeyValueConfig::get_bool(std::string_view key, bool fallback) const {
  const auto* v = lookup(key);
  if (!v) return fallback;
  if (v->text == "true" || v->text == "1" || v->text == "yes") return true;
  if (v->text == "false" || v->text == "0" || v->text == "no") return false;
  bad_value(key, "true or false");
}

std::vector<std::string> KeyValueConfig::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (!used_.contains(k)) out.push_back(k);
  }
  return out;
}

}  // namespace morphgen
