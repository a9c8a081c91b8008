#include "qkdrate/toml_subset.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qkdrate/errors.hpp"

namespace qkdrate {

namespace {

using nlohmann::json;

class LineParser {
 public:
  LineParser(std::string_view s, int line) : s_(s), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("TOML line " + std::to_string(line_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  bool at_end_or_comment() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }

  std::string key() {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '"') return basic_string();
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
            s_[pos_] == '-')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  json value() {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    const char c = s_[pos_];
    if (c == '"') return basic_string();
    if (c == '[') return array();
    return scalar();
  }

 private:
  std::string basic_string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("dangling escape");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      out.push_back(c);
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  json array() {
    ++pos_;
    json arr = json::array();
    if (consume(']')) return arr;
    while (true) {
      arr.push_back(value());
      if (consume(']')) return arr;
      expect(',');
      if (consume(']')) return arr;  // trailing comma
    }
  }

  json scalar() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' &&
           s_[pos_] != ' ' && s_[pos_] != '\t') {
      ++pos_;
    }
    std::string tok(s_.substr(start, pos_ - start));
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string digits;
    for (char ch : tok) {
      if (ch != '_') digits.push_back(ch);
    }
    if (digits == "inf" || digits == "+inf") return std::numeric_limits<double>::infinity();
    if (digits == "-inf") return -std::numeric_limits<double>::infinity();
    if (digits.empty()) fail("empty value");
    const bool is_float = digits.find_first_of(".eE") != std::string::npos;
    const char* first = digits.data() + (digits[0] == '+' ? 1 : 0);
    const char* last = digits.data() + digits.size();
    if (is_float) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last) fail("bad number '" + tok + "'");
      return v;
    }
    long long v = 0;
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) fail("bad value '" + tok + "'");
    return v;
  }

  std::string_view s_;
  int line_;
  std::size_t pos_ = 0;
};

}  // namespace

nlohmann::json parse_toml_subset(std::string_view text) {
  json root = json::object();
  json* table = &root;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    start = end + 1;
    ++line_no;
    LineParser p(line, line_no);
    if (p.at_end_or_comment()) continue;
    if (p.consume('[')) {
      const bool array_table = p.consume('[');
      const std::string name = p.key();
      p.expect(']');
      if (array_table) p.expect(']');
      if (!p.at_end_or_comment()) p.fail("trailing characters after header");
      if (array_table) {
        json& arr = root[name];
        if (arr.is_null()) arr = json::array();
        if (!arr.is_array()) p.fail("'" + name + "' is not an array of tables");
        arr.push_back(json::object());
        table = &arr.back();
      } else {
        if (root.contains(name)) p.fail("duplicate table '" + name + "'");
        root[name] = json::object();
        table = &root[name];
      }
      continue;
    }
    const std::string k = p.key();
    p.expect('=');
    json v = p.value();
    if (!p.at_end_or_comment()) p.fail("trailing characters after value");
    if (table->contains(k)) p.fail("duplicate key '" + k + "'");
    (*table)[k] = std::move(v);
    if (end == text.size()) break;
  }
  return root;
}

}  // namespace qkdrate
