#include "srr/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "srr/csv.hpp"
#include "srr/error.hpp"

namespace srr {

namespace {

std::string line_error(std::size_t line_no, const std::string& what) {
  return "line " + std::to_string(line_no) + ": " + what;
}

bool is_long_header(const std::vector<std::string_view>& fields) {
  return fields.size() == 3 && fields[0] == "date" && fields[1] == "asset_id" &&
         fields[2] == "price";
}

struct Collector {
  std::vector<std::string> ids;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::vector<std::pair<Date, double>>> obs;

  std::size_t slot(std::string_view id) {
    auto it = index.find(std::string(id));
    if (it != index.end()) return it->second;
    ids.emplace_back(id);
    obs.emplace_back();
    index.emplace(ids.back(), ids.size() - 1);
    return ids.size() - 1;
  }
};

double parse_price(std::string_view cell, std::size_t line_no) {
  auto value = csv::parse_double(cell);
  if (!value) {
    throw DataError(line_error(line_no, "non-numeric price '" + std::string(cell) + "'"));
  }
  if (*value <= 0.0) {
    throw DataError(line_error(line_no, "non-positive price " + std::string(cell)));
  }
  return *value;
}

Date parse_date_cell(std::string_view cell, std::size_t line_no) {
  Date d;
  if (!parse_date(cell, d)) {
    throw DataError(line_error(line_no, "invalid date '" + std::string(cell) + "'"));
  }
  return d;
}

std::vector<PriceSeries> finish(Collector& c) {
  std::vector<PriceSeries> out;
  out.reserve(c.ids.size());
  for (std::size_t a = 0; a < c.ids.size(); ++a) {
    auto& rows = c.obs[a];
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].first == rows[i - 1].first) {
        throw DataError("duplicate (date, asset) pair: (" + format_date(rows[i].first) +
                        ", " + c.ids[a] + ")");
      }
    }
    if (rows.size() < 2) {
      throw DataError("asset " + c.ids[a] + " has fewer than 2 prices");
    }
    PriceSeries s;
    s.asset_id = c.ids[a];
    s.dates.reserve(rows.size());
    s.prices.reserve(rows.size());
    for (const auto& [d, p] : rows) {
      s.dates.push_back(d);
      s.prices.push_back(p);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<PriceSeries> read_prices(std::istream& in, CsvLayout layout) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = csv::split(line);
    if (fields.size() == 1 && fields[0].empty()) continue;
    header.assign(fields.begin(), fields.end());
    break;
  }
  if (header.empty()) throw DataError("empty price file");

  std::vector<std::string_view> header_view(header.begin(), header.end());
  if (layout == CsvLayout::kAuto) {
    layout = is_long_header(header_view) ? CsvLayout::kLong : CsvLayout::kWide;
  }
  if (header.size() < 2 || header[0] != "date") {
    throw DataError(line_error(line_no, "header must start with 'date'"));
  }

  Collector c;
  std::vector<std::size_t> wide_slots;
  if (layout == CsvLayout::kLong) {
    if (!is_long_header(header_view)) {
      throw DataError(line_error(line_no, "long layout requires header date,asset_id,price"));
    }
  } else {
    for (std::size_t i = 1; i < header.size(); ++i) {
      if (header[i].empty()) throw DataError(line_error(line_no, "empty asset id in header"));
      if (c.index.count(header[i])) {
        throw DataError(line_error(line_no, "duplicate asset column " + header[i]));
      }
      wide_slots.push_back(c.slot(header[i]));
    }
  }

  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = csv::split(line);
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != header.size()) {
      throw DataError(line_error(line_no, "expected " + std::to_string(header.size()) +
                                              " fields, got " + std::to_string(fields.size())));
    }
    const Date d = parse_date_cell(fields[0], line_no);
    if (layout == CsvLayout::kLong) {
      if (fields[1].empty()) throw DataError(line_error(line_no, "empty asset id"));
      c.obs[c.slot(fields[1])].emplace_back(d, parse_price(fields[2], line_no));
    } else {
      for (std::size_t i = 1; i < fields.size(); ++i) {
        if (fields[i].empty()) continue;  // asset not quoted on this date
        c.obs[wide_slots[i - 1]].emplace_back(d, parse_price(fields[i], line_no));
      }
    }
  }
  return finish(c);
}

std::vector<PriceSeries> load_prices(const std::filesystem::path& path, CsvLayout layout) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open price file " + path.string());
  return read_prices(in, layout);
}

void write_prices(std::ostream& out, const std::vector<PriceSeries>& series,
                  CsvLayout layout) {
  std::map<Date, std::vector<std::pair<std::size_t, double>>> by_date;
  for (std::size_t a = 0; a < series.size(); ++a) {
    for (std::size_t i = 0; i < series[a].dates.size(); ++i) {
      by_date[series[a].dates[i]].emplace_back(a, series[a].prices[i]);
    }
  }
  if (layout == CsvLayout::kLong) {
    out << "date,asset_id,price\n";
    for (const auto& [d, cells] : by_date) {
      const auto ds = format_date(d);
      for (const auto& [a, p] : cells) {
        out << ds << ',' << series[a].asset_id << ',' << csv::format_double(p) << '\n';
      }
    }
    return;
  }
  out << "date";
  for (const auto& s : series) out << ',' << s.asset_id;
  out << '\n';
  for (const auto& [d, cells] : by_date) {
    std::vector<std::string> row(series.size());
    for (const auto& [a, p] : cells) row[a] = csv::format_double(p);
    out << format_date(d);
    for (const auto& cell : row) out << ',' << cell;
    out << '\n';
  }
}

void save_prices(const std::filesystem::path& path, const std::vector<PriceSeries>& series,
                 CsvLayout layout) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_prices(out, series, layout == CsvLayout::kAuto ? CsvLayout::kWide : layout);
}

ReturnMatrix log_returns(const std::vector<PriceSeries>& series, AlignPolicy policy) {
  if (series.empty()) throw InvalidArgument("log_returns needs at least one price series");

  std::vector<Date> grid = series.front().dates;
  for (std::size_t a = 1; a < series.size(); ++a) {
    const auto& dates = series[a].dates;
    if (policy == AlignPolicy::kErrorOnGap) {
      if (dates != grid) {
        // Report the first date present in one calendar but not the other.
        std::vector<Date> diff;
        std::set_symmetric_difference(grid.begin(), grid.end(), dates.begin(), dates.end(),
                                      std::back_inserter(diff));
        throw DataError("date gap between " + series.front().asset_id + " and " +
                        series[a].asset_id + " at " + format_date(diff.front()));
      }
      continue;
    }
    std::vector<Date> common;
    std::set_intersection(grid.begin(), grid.end(), dates.begin(), dates.end(),
                          std::back_inserter(common));
    grid = std::move(common);
  }
  if (grid.size() < 2) throw DataError("fewer than 2 common dates");

  ReturnMatrix r;
  r.dates.assign(grid.begin() + 1, grid.end());
  r.values.resize(static_cast<Eigen::Index>(grid.size() - 1),
                  static_cast<Eigen::Index>(series.size()));
  for (std::size_t a = 0; a < series.size(); ++a) {
    const auto& s = series[a];
    r.asset_ids.push_back(s.asset_id);
    std::size_t pos = 0;
    double prev = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      while (s.dates[pos] != grid[g]) ++pos;
      const double p = s.prices[pos];
      if (g > 0) {
        r.values(static_cast<Eigen::Index>(g - 1), static_cast<Eigen::Index>(a)) =
            std::log(p / prev);
      }
      prev = p;
    }
  }
  return r;
}

std::vector<UniverseEntry> read_universe(std::istream& in) {
  std::vector<UniverseEntry> out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = csv::split(line);
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (fields.size() != 2 || fields[0] != "asset_id" || fields[1] != "market_cap") {
        throw DataError(line_error(line_no, "universe header must be asset_id,market_cap"));
      }
      continue;
    }
    if (fields.size() != 2 || fields[0].empty()) {
      throw DataError(line_error(line_no, "expected asset_id,market_cap"));
    }
    auto cap = csv::parse_double(fields[1]);
    if (!cap || *cap <= 0.0) {
      throw DataError(line_error(line_no, "market_cap must be a positive number"));
    }
    out.push_back({std::string(fields[0]), *cap});
  }
  if (!header_seen) throw DataError("empty universe file");
  return out;
}

std::vector<UniverseEntry> load_universe(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open universe file " + path.string());
  return read_universe(in);
}

std::vector<std::string> select_assets(const std::vector<UniverseEntry>& universe,
                                       std::size_t n) {
  if (n == 0) throw InvalidArgument("select_assets: n must be at least 1");
  if (n > universe.size()) {
    throw InvalidArgument("select_assets: n = " + std::to_string(n) +
                          " exceeds universe size " + std::to_string(universe.size()));
  }
  std::vector<UniverseEntry> sorted = universe;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.market_cap != b.market_cap) return a.market_cap < b.market_cap;
    return a.asset_id < b.asset_id;
  });

  const std::size_t excess = sorted.size() % n;
  const std::size_t bottom = (excess + 1) / 2;
  const std::size_t u = sorted.size() - excess;

  std::vector<std::string> picked;
  picked.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) {
    // floor(((2k - 1) U + n) / 2n) == round_half_up((k - 0.5) / n * U), in exact integers.
    const std::size_t rank = ((2 * k - 1) * u + n) / (2 * n);
    picked.push_back(sorted[bottom + rank - 1].asset_id);
  }
  return picked;
}

ReturnMatrix window(const ReturnMatrix& r, std::size_t end_index, std::size_t length) {
  if (length == 0) throw InvalidArgument("window length must be positive");
  if (end_index >= r.rows()) {
    throw InvalidArgument("window end index " + std::to_string(end_index) +
                          " outside panel of " + std::to_string(r.rows()) + " rows");
  }
  if (length > end_index + 1) {
    throw InsufficientHistory("insufficient history: window of " + std::to_string(length) +
                              " rows needs end index >= " + std::to_string(length - 1) +
                              ", got " + std::to_string(end_index));
  }
  const std::size_t first = end_index + 1 - length;
  ReturnMatrix out;
  out.dates.assign(r.dates.begin() + static_cast<std::ptrdiff_t>(first),
                   r.dates.begin() + static_cast<std::ptrdiff_t>(end_index + 1));
  out.asset_ids = r.asset_ids;
  out.values = r.values.middleRows(static_cast<Eigen::Index>(first),
                                   static_cast<Eigen::Index>(length));
  return out;
}

}  // namespace srr
