#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace srr::csv {

// Splits one CSV record on commas and trims surrounding blanks from each field.
// Quoting is not supported; none of the formats here need it.
std::vector<std::string_view> split(std::string_view line);

// Full-field parse; rejects trailing garbage, empty input and non-finite values.
std::optional<double> parse_double(std::string_view text);

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

// Empty string for std::nullopt, format_double otherwise.
std::string format_optional(const std::optional<double>& value);

// Values of one named column of a headered CSV. Empty cells become
// std::nullopt; anything else must parse as a number (DataError otherwise).
std::vector<std::optional<double>> read_column(std::istream& in, std::string_view column);

}  // namespace srr::csv
