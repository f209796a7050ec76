#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "srr/date.hpp"

namespace srr {

struct PriceSeries {
  std::string asset_id;
  std::vector<Date> dates;    // strictly increasing
  std::vector<double> prices; // strictly positive, same length as dates
};

// M x N panel of daily log-returns. dates[m] is the date at the END of the
// return interval, i.e. values(m, j) = ln(P_j(dates[m]) / P_j(previous date)).
struct ReturnMatrix {
  std::vector<Date> dates;
  std::vector<std::string> asset_ids;
  Eigen::MatrixXd values;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t assets() const { return static_cast<std::size_t>(values.cols()); }
};

struct UniverseEntry {
  std::string asset_id;
  double market_cap = 0.0;
};

enum class CsvLayout {
  kAuto,  // long if the header is exactly `date,asset_id,price`, wide otherwise
  kLong,  // date,asset_id,price
  kWide,  // date,<id1>,<id2>,...
};

enum class AlignPolicy {
  kIntersectDates,
  kErrorOnGap,
};

// Reads a price file. Throws DataError on a missing file, a malformed row (the
// message names the 1-based line), a non-positive price, a duplicated
// (date, asset) pair, or an asset with fewer than two observations.
// Assets keep the order in which they first appear in the file.
std::vector<PriceSeries> load_prices(const std::filesystem::path& path,
                                     CsvLayout layout = CsvLayout::kAuto);
std::vector<PriceSeries> read_prices(std::istream& in,
                                     CsvLayout layout = CsvLayout::kAuto);

// Writer matching load_prices. Wide output leaves a cell empty where an asset
// has no price on a date. Long output is ordered by date, then by series order.
void write_prices(std::ostream& out, const std::vector<PriceSeries>& series,
                  CsvLayout layout);
void save_prices(const std::filesystem::path& path,
                 const std::vector<PriceSeries>& series, CsvLayout layout);

ReturnMatrix log_returns(const std::vector<PriceSeries>& series,
                         AlignPolicy policy = AlignPolicy::kIntersectDates);

// `asset_id,market_cap` with a header row.
std::vector<UniverseEntry> load_universe(const std::filesystem::path& path);
std::vector<UniverseEntry> read_universe(std::istream& in);

// Capitalization-percentile selection. The universe is sorted by market cap
// (ties by asset id), trimmed from both ends until its size U is a multiple
// of n (the odd extra removal comes off the bottom), and the survivor at
// 1-based rank round_half_up((k - 0.5) / n * U) is taken for k = 1..n.
std::vector<std::string> select_assets(const std::vector<UniverseEntry>& universe,
                                       std::size_t n);

// Trailing window of `length` rows ending at row `end_index` (inclusive).
ReturnMatrix window(const ReturnMatrix& r, std::size_t end_index, std::size_t length);

}  // namespace srr
