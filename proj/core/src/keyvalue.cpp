#include "jnt/keyvalue.hpp"

#include <fstream>
#include <sstream>

#include "jnt/error.hpp"
#include "jnt/tabular.hpp"

namespace jnt {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& source_name) {
  KeyValueConfig cfg;
  cfg.source_ = source_name;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source_name + ":" + std::to_string(line_no) + ": empty key");
    if (!cfg.values_.emplace(key, value).second) {
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

const std::string& KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(source_ + ": missing key '" + key + "'");
  return it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
  try {
    return parse_double(get(key), source_ + ": " + key);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
}

std::optional<double> KeyValueConfig::find_double(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return get_double(key);
}

long long KeyValueConfig::get_integer(const std::string& key) const {
  try {
    return parse_integer(get(key), source_ + ": " + key);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
}

std::vector<double> KeyValueConfig::get_list(const std::string& key) const {
  std::string text = get(key);
  for (char& c : text) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(text);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    try {
      out.push_back(parse_double(token, source_ + ": " + key));
    } catch (const ParseError& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

}  // namespace jnt
