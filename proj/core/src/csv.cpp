#include "srr/csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <string>

#include "srr/date.hpp"
#include "srr/error.hpp"

namespace srr {

namespace {

bool parse_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool is_digits(std::string_view s) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return !s.empty();
}

}  // namespace

bool parse_date(std::string_view text, Date& out) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
  const auto ys = text.substr(0, 4);
  const auto ms = text.substr(5, 2);
  const auto ds = text.substr(8, 2);
  if (!is_digits(ys) || !is_digits(ms) || !is_digits(ds)) return false;
  int y = 0, m = 0, d = 0;
  if (!parse_int(ys, y) || !parse_int(ms, m) || !parse_int(ds, d)) return false;
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return false;
  out = std::chrono::sys_days{ymd};
  return true;
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return std::string(buf.data());
}

namespace csv {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    auto field = line.substr(start, pos == std::string_view::npos ? std::string_view::npos
                                                                  : pos - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
      field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' ||
                              field.back() == '\r')) {
      field.remove_suffix(1);
    }
    fields.push_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::optional<double> parse_double(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  (void)ec;
  return std::string(buf.data(), ptr);
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

std::vector<std::optional<double>> read_column(std::istream& in, std::string_view column) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t index = 0;
  std::size_t width = 0;
  bool header_seen = false;
  std::vector<std::optional<double>> out;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split(line);
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (!header_seen) {
      header_seen = true;
      width = fields.size();
      const auto it = std::find(fields.begin(), fields.end(), column);
      if (it == fields.end()) throw DataError("column '" + std::string(column) + "' not found");
      index = static_cast<std::size_t>(it - fields.begin());
      continue;
    }
    if (fields.size() != width) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(width) + " fields");
    }
    if (fields[index].empty()) {
      out.emplace_back(std::nullopt);
      continue;
    }
    auto value = parse_double(fields[index]);
    if (!value && fields[index] == "inf") value = std::numeric_limits<double>::infinity();
    if (!value && fields[index] == "-inf") value = -std::numeric_limits<double>::infinity();
    if (!value) {
      throw DataError("line " + std::to_string(line_no) + ": non-numeric value '" +
                      std::string(fields[index]) + "'");
    }
    out.emplace_back(*value);
  }
  if (!header_seen) throw DataError("empty CSV input");
  return out;
}

}  // namespace csv
}  // namespace srr
