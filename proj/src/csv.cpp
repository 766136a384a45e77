#include "dallysim/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

#include <fmt/format.h>

#include "dallysim/errors.hpp"

namespace dallysim {

std::string trim(const std::string& s) {
    size_t begin = 0;
    size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        const size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

void read_csv(const std::string& path, const std::vector<std::string>& expected_header,
              const std::function<void(int, const std::vector<std::string>&)>& row_fn) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(fmt::format("{}: cannot open file", path));
    }
    std::string line;
    int line_number = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const auto fields = split_csv_line(line);
        if (!header_seen) {
            if (fields.size() != expected_header.size()) {
                throw ParseError(fmt::format("{}:{}: expected {} header columns, got {}",
                                             path, line_number, expected_header.size(),
                                             fields.size()));
            }
            for (size_t i = 0; i < fields.size(); ++i) {
                if (to_lower(fields[i]) != expected_header[i]) {
                    throw ParseError(fmt::format("{}:{}: expected header column '{}', got '{}'",
                                                 path, line_number, expected_header[i], fields[i]));
                }
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != expected_header.size()) {
            throw ParseError(fmt::format("{}:{}: expected {} columns, got {}", path, line_number,
                                         expected_header.size(), fields.size()));
        }
        row_fn(line_number, fields);
    }
    if (!header_seen) {
        throw ParseError(fmt::format("{}: missing header row", path));
    }
}

double parse_double_field(const std::string& value, int line, const std::string& column) {
    const std::string v = trim(value);
    double out = 0.0;
    const auto* begin = v.data();
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end || v.empty()) {
        throw ParseError(fmt::format("line {}: column '{}': '{}' is not a number", line, column, value));
    }
    return out;
}

long long parse_int_field(const std::string& value, int line, const std::string& column) {
    const std::string v = trim(value);
    long long out = 0;
    const auto* begin = v.data();
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end || v.empty()) {
        throw ParseError(fmt::format("line {}: column '{}': '{}' is not an integer", line, column, value));
    }
    return out;
}

} // namespace dallysim
