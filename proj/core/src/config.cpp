#include "smcsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "smcsim/error.hpp"
#include "smcsim/trajectory.hpp"

namespace smcsim {

namespace {

[[noreturn]] void type_error(std::string_view what, std::string_view expected) {
  throw ConfigError("'" + std::string(what) + "' must be " + std::string(expected));
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
         c == '+';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ConfigTable parse_file() {
    ConfigTable root;
    parse_entries(root, /*nested=*/false);
    return root;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("line " + std::to_string(line_) + ": " + msg);
  }

  void skip_space(bool separators) {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c)) ||
                 (separators && (c == ',' || c == ';'))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  std::string word() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_word_char(text_[pos_])) ++pos_;
    if (start == pos_) fail(std::string("unexpected character '") + peek() + "'");
    return std::string(text_.substr(start, pos_ - start));
  }

  void parse_entries(ConfigTable& table, bool nested) {
    for (;;) {
      skip_space(true);
      if (at_end()) {
        if (nested) fail("missing '}'");
        return;
      }
      if (peek() == '}') {
        if (!nested) fail("unbalanced '}'");
        ++pos_;
        return;
      }
      std::string key = word();
      skip_space(false);
      if (peek() == '=') {
        ++pos_;
        skip_space(false);
        table.set(std::move(key), parse_value());
      } else if (peek() == '{') {
        ++pos_;
        parse_entries(table.add_table(std::move(key)), true);
      } else {
        fail("expected '=' or '{' after '" + key + "'");
      }
    }
  }

  ConfigValue parse_value() {
    const char c = peek();
    if (c == '"') return ConfigValue(parse_string());
    if (c == '[') return parse_array();
    if (at_end()) fail("missing value");
    const std::string w = word();
    if (w == "true") return ConfigValue(true);
    if (w == "false") return ConfigValue(false);
    double value = 0.0;
    const char* first = w.data() + (w.size() > 1 && w.front() == '+' && w[1] != '-');
    const auto [ptr, ec] = std::from_chars(first, w.data() + w.size(), value);
    if (ec == std::errc{} && ptr == w.data() + w.size()) {
      return ConfigValue(ConfigNumber{value, w});
    }
    if (std::isdigit(static_cast<unsigned char>(w.front())) || w.front() == '-' ||
        w.front() == '+') {
      fail("bad number '" + w + "'");
    }
    return ConfigValue(w);
  }

  std::string parse_string() {
    ++pos_;  // opening quote
    std::string out;
    while (!at_end() && peek() != '"') {
      char c = text_[pos_++];
      if (c == '\n') fail("unterminated string");
      if (c == '\\' && !at_end()) c = text_[pos_++];
      out.push_back(c);
    }
    if (at_end()) fail("unterminated string");
    ++pos_;
    return out;
  }

  ConfigValue parse_array() {
    ++pos_;
    ConfigValue::Array items;
    for (;;) {
      skip_space(true);
      if (at_end()) fail("missing ']'");
      if (peek() == ']') {
        ++pos_;
        return ConfigValue(std::move(items));
      }
      items.push_back(parse_value());
    }
  }
};

void write_table(std::ostringstream& os, const ConfigTable& table, int depth) {
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  for (const auto& [key, value] : table.values()) {
    os << indent << key << " = " << value.to_text() << '\n';
  }
  for (const auto& [name, child] : table.all_tables()) {
    os << indent << name << " {\n";
    write_table(os, child, depth + 1);
    os << indent << "}\n";
  }
}

}  // namespace

ConfigValue::ConfigValue(double number) : data_(ConfigNumber{number, format_double(number)}) {}

double ConfigValue::as_number(std::string_view what) const {
  if (const auto* n = std::get_if<ConfigNumber>(&data_)) return n->value;
  type_error(what, "a number");
}

std::uint64_t ConfigValue::as_unsigned(std::string_view what) const {
  const auto* n = std::get_if<ConfigNumber>(&data_);
  if (!n) type_error(what, "a non-negative integer");
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(n->text.data(), n->text.data() + n->text.size(), out);
  if (ec == std::errc{} && ptr == n->text.data() + n->text.size()) return out;
  if (n->value >= 0.0 && n->value == std::floor(n->value) && n->value < 0x1.0p53) {
    return static_cast<std::uint64_t>(n->value);
  }
  type_error(what, "a non-negative integer");
}

bool ConfigValue::as_bool(std::string_view what) const {
  if (const auto* b = std::get_if<bool>(&data_)) return *b;
  type_error(what, "true or false");
}

const std::string& ConfigValue::as_string(std::string_view what) const {
  if (const auto* s = std::get_if<std::string>(&data_)) return *s;
  type_error(what, "a string");
}

const ConfigValue::Array& ConfigValue::as_array(std::string_view what) const {
  if (const auto* a = std::get_if<Array>(&data_)) return *a;
  type_error(what, "an array");
}

std::vector<double> ConfigValue::as_numbers(std::string_view what) const {
  std::vector<double> out;
  for (const auto& item : as_array(what)) out.push_back(item.as_number(what));
  return out;
}

std::string ConfigValue::to_text() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ConfigNumber>) {
          return format_double(v.value);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          std::string out = "\"";
          for (char c : v) {
            if (c == '"' || c == '\\') out.push_back('\\');
            out.push_back(c);
          }
          return out + "\"";
        } else {
          std::string out = "[";
          for (std::size_t i = 0; i < v.size(); ++i) {
            out += (i ? ", " : "") + v[i].to_text();
          }
          return out + "]";
        }
      },
      data_);
}

void ConfigTable::set(std::string key, ConfigValue value) {
  for (auto& [k, v] : values_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  values_.emplace_back(std::move(key), std::move(value));
}

ConfigTable& ConfigTable::add_table(std::string name) {
  tables_.emplace_back(std::move(name), ConfigTable{});
  return tables_.back().second;
}

const ConfigValue* ConfigTable::find(std::string_view key) const {
  for (const auto& [k, v] : values_) {
    if (k == key) return &v;
  }
  return nullptr;
}

const ConfigValue& ConfigTable::at(std::string_view key) const {
  if (const auto* v = find(key)) return *v;
  throw ConfigError("missing required key '" + std::string(key) + "'");
}

double ConfigTable::number_or(std::string_view key, double fallback) const {
  const auto* v = find(key);
  return v ? v->as_number(key) : fallback;
}

std::string ConfigTable::string_or(std::string_view key, std::string fallback) const {
  const auto* v = find(key);
  return v ? v->as_string(key) : fallback;
}

bool ConfigTable::bool_or(std::string_view key, bool fallback) const {
  const auto* v = find(key);
  return v ? v->as_bool(key) : fallback;
}

const ConfigTable* ConfigTable::table(std::string_view name) const {
  for (const auto& [k, t] : tables_) {
    if (k == name) return &t;
  }
  return nullptr;
}

std::vector<const ConfigTable*> ConfigTable::tables(std::string_view name) const {
  std::vector<const ConfigTable*> out;
  for (const auto& [k, t] : tables_) {
    if (k == name) out.push_back(&t);
  }
  return out;
}

void ConfigTable::require_known(std::string_view context,
                                std::initializer_list<std::string_view> allowed) const {
  const auto known = [&allowed](std::string_view key) {
    return std::find(allowed.begin(), allowed.end(), key) != allowed.end();
  };
  for (const auto& [k, v] : values_) {
    if (!known(k)) throw ConfigError("unknown key '" + k + "' in " + std::string(context));
  }
  for (const auto& [k, t] : tables_) {
    if (!known(k)) throw ConfigError("unknown table '" + k + "' in " + std::string(context));
  }
}

ConfigTable parse_config(std::string_view text) { return Parser(text).parse_file(); }

ConfigTable load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in || !std::filesystem::is_regular_file(path)) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize(const ConfigTable& table) {
  std::ostringstream os;
  write_table(os, table, 0);
  return os.str();
}

}  // namespace smcsim
