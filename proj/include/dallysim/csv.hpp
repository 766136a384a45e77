#pragma once

#include <functional>
#include <string>
#include <vector>

namespace dallysim {

std::string trim(const std::string& s);
std::string to_lower(std::string s);
std::vector<std::string> split_csv_line(const std::string& line);

// Reads a CSV file with a mandatory header row. Lines starting with '#' and
// blank lines are skipped. Calls row_fn(line_number, fields) per data row.
// Throws ParseError (naming the line) on I/O failure, a missing header, or a
// header mismatch.
void read_csv(const std::string& path, const std::vector<std::string>& expected_header,
              const std::function<void(int, const std::vector<std::string>&)>& row_fn);

// Field parsers that throw ParseError naming the line and column on bad input.
double parse_double_field(const std::string& value, int line, const std::string& column);
long long parse_int_field(const std::string& value, int line, const std::string& column);

} // namespace dallysim
