#include <cctype>
#include <fstream>
#include <sstream>

#include "dwave/config.hpp"
#include "dwave/error.hpp"

namespace dwave::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Drops a trailing comment that is not inside a string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

[[noreturn]] void bad(const std::string& where, const std::string& msg) {
  fail(ErrorCode::InvalidArgument, where + ": " + msg);
}

double parse_number(const std::string& tok, const std::string& where) {
  std::string t;
  for (char c : tok)
    if (c != '_') t.push_back(c);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    bad(where, "expected a number, got '" + tok + "'");
  }
  if (used != t.size()) bad(where, "expected a number, got '" + tok + "'");
  return v;
}

std::string parse_string(const std::string& tok, const std::string& where) {
  if (tok.size() < 2 || tok.front() != '"' || tok.back() != '"') bad(where, "expected a quoted string");
  return tok.substr(1, tok.size() - 2);
}

std::vector<std::string> split_list(const std::string& body) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : body) {
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

}  // namespace

Table Table::parse(std::istream& in, const std::string& source) {
  Table t;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') bad(where, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad(where, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) bad(where, "expected key = value");
    if (!section.empty()) key = section + "." + key;
    if (t.values_.count(key)) bad(where, "duplicate key '" + key + "'");

    if (val.front() == '[') {
      if (val.back() != ']') bad(where, "arrays must close on the same line");
      const auto items = split_list(val.substr(1, val.size() - 2));
      if (!items.empty() && items.front().front() == '"') {
        std::vector<std::string> v;
        for (const auto& s : items) v.push_back(parse_string(s, where));
        t.values_[key] = v;
      } else {
        std::vector<double> v;
        for (const auto& s : items) v.push_back(parse_number(s, where));
        t.values_[key] = v;
      }
    } else if (val.front() == '"') {
      t.values_[key] = parse_string(val, where);
    } else if (val == "true" || val == "false") {
      t.values_[key] = (val == "true");
    } else {
      t.values_[key] = parse_number(val, where);
    }
  }
  return t;
}

Table Table::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config '" + path + "'");
  return parse(in, path);
}

double Table::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

double Table::number(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorCode::InvalidArgument, "config: missing key '" + key + "'");
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  fail(ErrorCode::InvalidArgument, "config: key '" + key + "' is not a number");
}

std::string Table::string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const std::string* s = std::get_if<std::string>(&it->second)) return *s;
  fail(ErrorCode::InvalidArgument, "config: key '" + key + "' is not a string");
}

bool Table::boolean(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const bool* b = std::get_if<bool>(&it->second)) return *b;
  fail(ErrorCode::InvalidArgument, "config: key '" + key + "' is not a boolean");
}

std::vector<double> Table::numbers(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
  if (const double* d = std::get_if<double>(&it->second)) return {*d};
  fail(ErrorCode::InvalidArgument, "config: key '" + key + "' is not a list of numbers");
}

std::vector<std::string> Table::keys() const {
  std::vector<std::string> k;
  for (const auto& [key, v] : values_) k.push_back(key);
  return k;
}

}  // namespace dwave::config
