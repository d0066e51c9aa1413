#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace jnt {

// "key = value" configuration text. '#' starts a comment; keys are unique.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text, const std::string& source_name);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::optional<double> find_double(const std::string& key) const;
  long long get_integer(const std::string& key) const;
  // Comma- or whitespace-separated list of numbers.
  std::vector<double> get_list(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::string source_;
  std::map<std::string, std::string> values_;
};

}  // namespace jnt
