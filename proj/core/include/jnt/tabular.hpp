#pragma once

#include <istream>
#include <string>
#include <vector>

namespace jnt {

// Header-keyed delimited text. Comma, tab, or semicolon delimiters are
// detected from the header line; blank lines and lines starting with '#'
// are skipped.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // source line for each row

  // Index of a named column; throws ParseError when absent.
  std::size_t column(const std::string& name) const;
  // -1 when absent.
  long find_column(const std::string& name) const;
};

Table read_table(std::istream& in, const std::string& source_name);
Table read_table_file(const std::string& path);

// Strict numeric conversions reporting the source position on failure.
double parse_double(const std::string& text, const std::string& where);
long long parse_integer(const std::string& text, const std::string& where);

// Shortest representation that round-trips a double.
std::string format_double(double value);

}  // namespace jnt
