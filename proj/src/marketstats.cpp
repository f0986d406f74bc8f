#include "stocknet/marketstats.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include "stocknet/csv.hpp"
#include "stocknet/errors.hpp"
#include "stocknet/numerics.hpp"

namespace stocknet {

Membership read_membership(std::istream& in) {
  const auto table = csv::read_table(in);
  if (table.header != std::vector<std::string>{"ticker", "industry_id"}) {
    throw ParseError(1, {}, "membership header must be ticker,industry_id");
  }
  Membership m;
  for (const auto& row : table.rows) {
    if (row.cells[0].empty()) throw ParseError(row.line, "ticker", "empty ticker");
    if (row.cells[1].empty()) throw ParseError(row.line, "industry_id", "empty industry id");
    if (!m.emplace(row.cells[0], row.cells[1]).second)
      throw ParseError(row.line, "ticker", "duplicate ticker '" + row.cells[0] + "'");
  }
  return m;
}

std::vector<IndustryIndex> industry_indexes(const ReturnPanel& returns, const Membership& membership) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> members;
  std::vector<std::string> unmapped;
  for (std::size_t j = 0; j < returns.n_tickers(); ++j) {
    const auto it = membership.find(returns.tickers()[j]);
    if (it == membership.end()) {
      unmapped.push_back(returns.tickers()[j]);
      continue;
    }
    auto& list = members[it->second];
    if (list.empty()) order.push_back(it->second);
    list.push_back(j);
  }
  if (!unmapped.empty()) {
    std::string msg = "unmapped tickers:";
    for (const auto& t : unmapped) msg += " " + t;
    throw InputError(msg);
  }

  const Matrix& r = returns.returns();
  std::vector<IndustryIndex> out;
  for (const auto& id : order) {
    const auto& cols = members[id];
    if (cols.size() <= kMaxExcludedIndustrySize) continue;
    IndustryIndex index{id, cols.size(), std::vector<double>(r.rows())};
    std::vector<double> cross(cols.size());
    for (std::size_t t = 0; t < r.rows(); ++t) {
      for (std::size_t m = 0; m < cols.size(); ++m) cross[m] = r(t, cols[m]);
      index.series[t] = mean(cross);
    }
    out.push_back(std::move(index));
  }
  if (out.empty()) throw InputError("no qualifying industries");
  return out;
}

FactorIndustryTable factor_industry_correlations(const Matrix& scores,
                                                 const std::vector<IndustryIndex>& indexes) {
  if (indexes.empty()) throw InputError("factor_industry_correlations: no industry indexes");
  for (const auto& idx : indexes) {
    if (idx.series.size() != scores.rows()) {
      throw InputError("factor_industry_correlations: index '" + idx.industry_id + "' has " +
                       std::to_string(idx.series.size()) + " dates, scores have " +
                       std::to_string(scores.rows()));
    }
  }
  FactorIndustryTable table;
  for (std::size_t k = 0; k < scores.cols(); ++k) {
    const auto factor = scores.column(k);
    FactorIndustryRow row{k + 1, 0.0, 0.0, 1.0, {}};
    double total = 0.0;
    for (const auto& idx : indexes) {
      const double r = std::abs(correlation(factor, idx.series));
      total += r;
      if (row.argmax_industry.empty() || r > row.max_abs) {
        row.max_abs = r;
        row.argmax_industry = idx.industry_id;
      }
      row.min_abs = std::min(row.min_abs, r);
    }
    row.mean_abs = total / static_cast<double>(indexes.size());
    // Keep max >= mean >= min despite summation rounding.
    row.mean_abs = std::clamp(row.mean_abs, row.min_abs, row.max_abs);
    table.push_back(std::move(row));
  }
  return table;
}

DegreeR2Profile degree_r2_profile(const SpanningTree& tree, std::span<const double> r_squared) {
  if (r_squared.size() != tree.size()) {
    throw InputError("degree_r2_profile: " + std::to_string(r_squared.size()) +
                     " fits for a tree of " + std::to_string(tree.size()) + " stocks");
  }
  const int lo = tree.min_degree();
  const int hi = tree.max_degree();
  std::map<int, std::vector<double>> groups;
  for (std::size_t i = 0; i < tree.size(); ++i) groups[tree.degree()[i]].push_back(r_squared[i]);

  DegreeR2Profile profile;
  for (const auto& [degree, values] : groups) {
    DegreeBucket b;
    b.degree = degree;
    if (hi > lo) b.l_star = normalize_degree(degree, lo, hi);
    b.count = values.size();
    b.min_r2 = *std::min_element(values.begin(), values.end());
    b.max_r2 = *std::max_element(values.begin(), values.end());
    b.mean_r2 = std::clamp(mean(values), b.min_r2, b.max_r2);
    profile.buckets.push_back(b);
  }
  return profile;
}

DegreeR2Profile degree_r2_profile(const SpanningTree& tree, const std::vector<RegressionResult>& fits) {
  std::vector<double> r2;
  r2.reserve(fits.size());
  for (const auto& f : fits) r2.push_back(f.r_squared);
  return degree_r2_profile(tree, r2);
}

void write_industry_indexes(std::ostream& out, const std::vector<IndustryIndex>& indexes,
                            const std::vector<Date>& dates) {
  std::vector<std::string> cells{"date"};
  for (const auto& idx : indexes) {
    if (idx.series.size() != dates.size())
      throw InputError("write_industry_indexes: date count mismatch");
    cells.push_back(idx.industry_id);
  }
  csv::write_row(out, cells);
  for (std::size_t t = 0; t < dates.size(); ++t) {
    cells.assign(1, format_date(dates[t]));
    for (const auto& idx : indexes) cells.push_back(csv::format_number(idx.series[t]));
    csv::write_row(out, cells);
  }
}

void write_factor_industry(std::ostream& out, const FactorIndustryTable& table) {
  csv::write_row(out, {"factor", "max", "mean", "min", "argmax_industry"});
  for (const auto& r : table) {
    csv::write_row(out, {std::to_string(r.factor), csv::format_number(r.max_abs),
                         csv::format_number(r.mean_abs), csv::format_number(r.min_abs),
                         r.argmax_industry});
  }
}

void write_degree_profile(std::ostream& out, const DegreeR2Profile& profile) {
  csv::write_row(out, {"degree", "l_star", "count", "mean_r2_percent", "min_r2_percent",
                       "max_r2_percent"});
  for (const auto& b : profile.buckets) {
    csv::write_row(out, {std::to_string(b.degree),
                         b.l_star ? csv::format_number(*b.l_star) : std::string{},
                         std::to_string(b.count), csv::format_number(100.0 * b.mean_r2),
                         csv::format_number(100.0 * b.min_r2),
                         csv::format_number(100.0 * b.max_r2)});
  }
}

}  // namespace stocknet
