#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace morphgen {

// `key = value` lines; `#` starts a comment, blank lines are ignored.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, std::string_view source = "<stream>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(std::string_view key) const { return values_.contains(std::string(key)); }
  void set(std::string key, std::string value) { values_[std::move(key)] = {std::move(value), 0}; }

  std::optional<std::string> get(std::string_view key) const;
  std::string get_string(std::string_view key, std::string_view fallback) const;
  std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
  double get_double(std::string_view key, double fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;

  // Keys never read through a getter; used to reject typos.
  std::vector<std::string> unused_keys() const;

  const std::string& source() const { return source_; }

 private:
  struct Value {
    std::string text;
    std::size_t line = 0;
  };
  [[noreturn]] void bad_value(std::string_view key, std::string_view expected) const;
  const Value* lookup(std::string_view key) const;

  std::string source_ = "<stream>";
  std::map<std::string, Value, std::less<>> values_;
  mutable std::map<std::string, bool, std::less<>> used_;
};

}  // namespace morphgen
