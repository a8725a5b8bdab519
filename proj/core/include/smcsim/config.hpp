#pragma once

// Declarative scenario files:
//
//   # comment
//   plant = "pendulum"
//   initial_state = [0.5235987755982988, 0]
//   disturbance { kind = "sinusoid", amplitude = 10, angular_freq = 1 }
//   controller { kind = "pid_smc_proposed"; kp = 105 }
//   controller { kind = "smc1" }
//
// Entries are `key = value` or `name { ... }`, separated by whitespace, ','
// or ';'. Values are numbers, "strings", bare words (read as strings),
// true/false and [arrays]. Tables may repeat; their order is kept.

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace smcsim {

struct ConfigNumber {
  double value = 0.0;
  std::string text;  // as written, for exact integer reads
};

class ConfigValue {
 public:
  using Array = std::vector<ConfigValue>;

  ConfigValue() = default;
  ConfigValue(double number);  // NOLINT(google-explicit-constructor)
  ConfigValue(ConfigNumber number) : data_(std::move(number)) {}
  ConfigValue(bool flag) : data_(flag) {}                   // NOLINT
  ConfigValue(std::string text) : data_(std::move(text)) {}  // NOLINT
  ConfigValue(const char* text) : data_(std::string(text)) {}  // NOLINT
  ConfigValue(Array items) : data_(std::move(items)) {}     // NOLINT

  bool is_number() const noexcept { return std::holds_alternative<ConfigNumber>(data_); }
  bool is_string() const noexcept { return std::holds_alternative<std::string>(data_); }
  bool is_bool() const noexcept { return std::holds_alternative<bool>(data_); }
  bool is_array() const noexcept { return std::holds_alternative<Array>(data_); }

  /// Accessors throw ConfigError naming `what` on a type mismatch.
  double as_number(std::string_view what = "value") const;
  std::uint64_t as_unsigned(std::string_view what = "value") const;
  bool as_bool(std::string_view what = "value") const;
  const std::string& as_string(std::string_view what = "value") const;
  const Array& as_array(std::string_view what = "value") const;
  std::vector<double> as_numbers(std::string_view what = "value") const;

  std::string to_text() const;

 private:
  std::variant<ConfigNumber, bool, std::string, Array> data_;
};

class ConfigTable {
 public:
  void set(std::string key, ConfigValue value);
  ConfigTable& add_table(std::string name);

  const ConfigValue* find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key) != nullptr; }
  const ConfigValue& at(std::string_view key) const;  // throws ConfigError

  double number_or(std::string_view key, double fallback) const;
  std::string string_or(std::string_view key, std::string fallback) const;
  bool bool_or(std::string_view key, bool fallback) const;

  /// First table with this name, or nullptr.
  const ConfigTable* table(std::string_view name) const;
  std::vector<const ConfigTable*> tables(std::string_view name) const;

  const std::vector<std::pair<std::string, ConfigValue>>& values() const { return values_; }
  const std::vector<std::pair<std::string, ConfigTable>>& all_tables() const { return tables_; }

  /// Throws ConfigError naming the first key or table not in `allowed`.
  void require_known(std::string_view context, std::initializer_list<std::string_view> allowed) const;

 private:
  std::vector<std::pair<std::string, ConfigValue>> values_;
  std::vector<std::pair<std::string, ConfigTable>> tables_;
};

/// Throws ConfigError with a line number on malformed input.
ConfigTable parse_config(std::string_view text);
ConfigTable load_config(const std::filesystem::path& path);

/// Canonical text form: values first, then tables, two-space indent.
/// parse_config(serialize(t)) serializes back to the same text.
std::string serialize(const ConfigTable& table);

}  // namespace smcsim
