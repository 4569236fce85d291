#pragma once

#include <optional>
#include <string>
#include <vector>

namespace t2g {

// Splits one CSV line on commas, trimming surrounding whitespace per field.
// No quoting dialect: none of the formats this project reads emit quotes.
std::vector<std::string> split_csv_line(const std::string& line);

std::string trim(const std::string& s);

// Parses a decimal number accepting both '.' and ',' as the decimal
// separator (Italian data files use commas). Returns nullopt on failure.
std::optional<double> parse_decimal(const std::string& field);

std::optional<long long> parse_integer(const std::string& field);

// Shortest round-trip representation (std::to_chars); identical output for
// identical doubles, so files built from it are byte-stable.
std::string format_double(double value);

}  // namespace t2g
