#pragma once

#include <chrono>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stocknet/matrix.hpp"

namespace stocknet {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD).
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& d);

enum class GapPolicy { reject, forward_fill };

/// Dense T×N panel of strictly positive prices on a strictly increasing
/// calendar. The constructor enforces every invariant.
class PricePanel {
 public:
  PricePanel(std::vector<std::string> tickers, std::vector<Date> dates, Matrix prices);

  const std::vector<std::string>& tickers() const noexcept { return tickers_; }
  const std::vector<Date>& dates() const noexcept { return dates_; }
  const Matrix& prices() const noexcept { return prices_; }
  std::size_t n_dates() const noexcept { return dates_.size(); }
  std::size_t n_tickers() const noexcept { return tickers_.size(); }

 private:
  std::vector<std::string> tickers_;
  std::vector<Date> dates_;
  Matrix prices_;
};

/// Log returns; row t is dated at the later of the two prices it spans.
/// Every column must have nonzero sample variance.
class ReturnPanel {
 public:
  ReturnPanel(std::vector<std::string> tickers, std::vector<Date> dates, Matrix returns);

  const std::vector<std::string>& tickers() const noexcept { return tickers_; }
  const std::vector<Date>& dates() const noexcept { return dates_; }
  const Matrix& returns() const noexcept { return returns_; }
  std::size_t n_dates() const noexcept { return dates_.size(); }
  std::size_t n_tickers() const noexcept { return tickers_.size(); }

 private:
  std::vector<std::string> tickers_;
  std::vector<Date> dates_;
  Matrix returns_;
};

/// Loads a `date,TICKER...` price CSV. Rows with no price for any ticker are
/// dropped before gap handling; remaining empty cells are rejected or, with
/// forward_fill, take the last seen price (a gap before the first price of a
/// column is always an error).
PricePanel load_prices(std::istream& in, GapPolicy policy = GapPolicy::reject);

ReturnPanel to_returns(const PricePanel& panel);

/// Same layout as the price file, cells holding returns; no gaps allowed.
ReturnPanel load_returns(std::istream& in);

void write_prices(std::ostream& out, const PricePanel& panel);
void write_returns(std::ostream& out, const ReturnPanel& panel);

}  // namespace stocknet
