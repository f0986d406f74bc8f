#include "stocknet/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>

#include "stocknet/csv.hpp"
#include "stocknet/errors.hpp"
#include "stocknet/numerics.hpp"

namespace stocknet {

namespace {

template <class Int>
bool parse_digits(std::string_view s, Int& out) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::vector<std::string> read_tickers(const csv::Table& table) {
  if (table.header.empty() || table.header.front() != "date") {
    throw ParseError(1, table.header.empty() ? "" : table.header.front(),
                     "first header cell must be 'date'");
  }
  std::vector<std::string> tickers(table.header.begin() + 1, table.header.end());
  std::set<std::string> seen;
  for (const auto& t : tickers) {
    if (t.empty()) throw ParseError(1, {}, "empty ticker name");
    if (!seen.insert(t).second) throw ParseError(1, t, "duplicate ticker");
  }
  return tickers;
}

Date read_date(const csv::Table::Row& row) {
  auto d = parse_date(row.cells.front());
  if (!d) throw ParseError(row.line, "date", "malformed date '" + row.cells.front() + "'");
  return *d;
}

void check_increasing(const std::vector<Date>& dates, const Date& next, std::size_t line) {
  if (!dates.empty() && !(dates.back() < next)) {
    throw ParseError(line, "date",
                     "non-increasing dates (" + format_date(next) + " after " +
                         format_date(dates.back()) + ")");
  }
}

void write_panel(std::ostream& out, const std::vector<std::string>& tickers,
                 const std::vector<Date>& dates, const Matrix& values) {
  std::vector<std::string> cells{"date"};
  cells.insert(cells.end(), tickers.begin(), tickers.end());
  csv::write_row(out, cells);
  for (std::size_t t = 0; t < dates.size(); ++t) {
    cells.assign(1, format_date(dates[t]));
    for (double v : values.row(t)) cells.push_back(csv::format_number(v));
    csv::write_row(out, cells);
  }
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  if (!parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m) ||
      !parse_digits(text.substr(8, 2), d))
    return std::nullopt;
  Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

PricePanel::PricePanel(std::vector<std::string> tickers, std::vector<Date> dates, Matrix prices)
    : tickers_(std::move(tickers)), dates_(std::move(dates)), prices_(std::move(prices)) {
  if (prices_.rows() != dates_.size() || prices_.cols() != tickers_.size()) {
    throw InputError("PricePanel: matrix is " + std::to_string(prices_.rows()) + "x" +
                     std::to_string(prices_.cols()) + " but panel has " +
                     std::to_string(dates_.size()) + " dates and " +
                     std::to_string(tickers_.size()) + " tickers");
  }
  for (std::size_t t = 1; t < dates_.size(); ++t) {
    if (!(dates_[t - 1] < dates_[t])) {
      throw InputError("PricePanel: non-increasing dates at " + format_date(dates_[t]));
    }
  }
  for (std::size_t t = 0; t < prices_.rows(); ++t) {
    for (std::size_t j = 0; j < prices_.cols(); ++j) {
      const double p = prices_(t, j);
      if (!std::isfinite(p) || p <= 0.0) {
        throw InputError("PricePanel: non-positive price for '" + tickers_[j] + "' on " +
                         format_date(dates_[t]));
      }
    }
  }
}

ReturnPanel::ReturnPanel(std::vector<std::string> tickers, std::vector<Date> dates, Matrix returns)
    : tickers_(std::move(tickers)), dates_(std::move(dates)), returns_(std::move(returns)) {
  if (returns_.rows() != dates_.size() || returns_.cols() != tickers_.size()) {
    throw InputError("ReturnPanel: matrix is " + std::to_string(returns_.rows()) + "x" +
                     std::to_string(returns_.cols()) + " but panel has " +
                     std::to_string(dates_.size()) + " dates and " +
                     std::to_string(tickers_.size()) + " tickers");
  }
  if (dates_.size() < 2) throw InputError("ReturnPanel: need at least 2 return rows");
  if (!returns_.all_finite()) throw InputError("ReturnPanel: non-finite return");
  for (std::size_t j = 0; j < returns_.cols(); ++j) {
    if (!(population_variance(returns_.column(j)) > 0.0)) {
      throw InputError("zero-variance series '" + tickers_[j] + "'");
    }
  }
}

PricePanel load_prices(std::istream& in, GapPolicy policy) {
  const auto table = csv::read_table(in);
  auto tickers = read_tickers(table);
  if (tickers.size() < 2) {
    throw ParseError(1, {}, "need at least 2 tickers, found " + std::to_string(tickers.size()));
  }
  const std::size_t n = tickers.size();

  std::vector<Date> dates;
  std::vector<double> values;
  std::vector<std::optional<double>> last(n);
  for (const auto& row : table.rows) {
    const Date date = read_date(row);
    const bool all_missing =
        std::all_of(row.cells.begin() + 1, row.cells.end(), [](const auto& c) { return c.empty(); });
    if (all_missing) continue;
    check_increasing(dates, date, row.line);
    dates.push_back(date);
    for (std::size_t j = 0; j < n; ++j) {
      const auto& cell = row.cells[j + 1];
      if (cell.empty()) {
        if (!last[j]) throw ParseError(row.line, tickers[j], "leading gap");
        if (policy == GapPolicy::reject) {
          throw ParseError(row.line, tickers[j], "missing price (gap policy reject)");
        }
        values.push_back(*last[j]);
        continue;
      }
      const double price = csv::parse_number(cell, row.line, tickers[j]);
      if (price <= 0.0) throw ParseError(row.line, tickers[j], "non-positive price");
      last[j] = price;
      values.push_back(price);
    }
  }
  if (dates.size() < 2) {
    throw ParseError(0, {}, "need at least 2 dated rows, found " + std::to_string(dates.size()));
  }
  const std::size_t t_rows = dates.size();
  return PricePanel(std::move(tickers), std::move(dates), Matrix(t_rows, n, std::move(values)));
}

ReturnPanel to_returns(const PricePanel& panel) {
  if (panel.n_dates() < 3) {
    throw InputError("to_returns: need at least 3 price rows, found " +
                     std::to_string(panel.n_dates()));
  }
  const auto& p = panel.prices();
  Matrix r(p.rows() - 1, p.cols());
  for (std::size_t t = 0; t + 1 < p.rows(); ++t)
    for (std::size_t j = 0; j < p.cols(); ++j) r(t, j) = std::log(p(t + 1, j)) - std::log(p(t, j));
  std::vector<Date> dates(panel.dates().begin() + 1, panel.dates().end());
  return ReturnPanel(panel.tickers(), std::move(dates), std::move(r));
}

ReturnPanel load_returns(std::istream& in) {
  const auto table = csv::read_table(in);
  auto tickers = read_tickers(table);
  if (tickers.empty()) throw ParseError(1, {}, "no ticker columns");
  std::vector<Date> dates;
  std::vector<double> values;
  for (const auto& row : table.rows) {
    const Date date = read_date(row);
    check_increasing(dates, date, row.line);
    dates.push_back(date);
    for (std::size_t j = 0; j < tickers.size(); ++j) {
      const auto& cell = row.cells[j + 1];
      if (cell.empty()) throw ParseError(row.line, tickers[j], "missing return");
      values.push_back(csv::parse_number(cell, row.line, tickers[j]));
    }
  }
  const std::size_t t_rows = dates.size();
  const std::size_t n = tickers.size();
  return ReturnPanel(std::move(tickers), std::move(dates), Matrix(t_rows, n, std::move(values)));
}

void write_prices(std::ostream& out, const PricePanel& panel) {
  write_panel(out, panel.tickers(), panel.dates(), panel.prices());
}

void write_returns(std::ostream& out, const ReturnPanel& panel) {
  write_panel(out, panel.tickers(), panel.dates(), panel.returns());
}

}  // namespace stocknet
