#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace srr {

// Calendar date. Stored as a day count so ordering and arithmetic are trivial.
using Date = std::chrono::sys_days;

// Parses a strict ISO-8601 calendar date (YYYY-MM-DD). Returns false on any
// malformed or out-of-range input.
bool parse_date(std::string_view text, Date& out);

std::string format_date(Date d);

}  // namespace srr
