#pragma once

// Reader for the small TOML subset used by study configs:
//   # comment
//   [section]
//   key = 1.5 | "text" | true | [1, 2, 3] | ["a", "b"]
// Keys inside a section are stored as "section.key".

#include <istream>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace dwave::config {

using Value = std::variant<bool, double, std::string, std::vector<double>, std::vector<std::string>>;

class Table {
 public:
  static Table parse(std::istream& in, const std::string& source = "<config>");
  static Table parse_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  double number(const std::string& key, double fallback) const;
  double number(const std::string& key) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  /// A scalar number is accepted as a one-element list.
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> keys() const;

 private:
  std::map<std::string, Value> values_;
};

}  // namespace dwave::config
