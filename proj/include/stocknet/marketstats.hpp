#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stocknet/ingest.hpp"
#include "stocknet/matrix.hpp"
#include "stocknet/network.hpp"
#include "stocknet/regression.hpp"

namespace stocknet {

/// ticker → industry id
using Membership = std::map<std::string, std::string>;

/// Industries with this many members or fewer are excluded from the indexes.
inline constexpr std::size_t kMaxExcludedIndustrySize = 4;

struct IndustryIndex {
  std::string industry_id;
  std::size_t member_count = 0;
  std::vector<double> series;  // equal-weighted mean return per date
};

struct FactorIndustryRow {
  std::size_t factor = 0;  // 1-based
  double max_abs = 0.0;
  double mean_abs = 0.0;
  double min_abs = 0.0;
  std::string argmax_industry;
};
using FactorIndustryTable = std::vector<FactorIndustryRow>;

struct DegreeBucket {
  int degree = 0;
  std::optional<double> l_star;  // empty when every stock has the same degree
  std::size_t count = 0;
  double mean_r2 = 0.0;
  double min_r2 = 0.0;
  double max_r2 = 0.0;
};

struct DegreeR2Profile {
  std::vector<DegreeBucket> buckets;  // ascending degree
};

/// `ticker,industry_id` CSV.
Membership read_membership(std::istream& in);

/// Equal-weighted index per industry with more than four members, in order of
/// first appearance along the panel's tickers. Throws InputError listing any
/// unmapped tickers, or "no qualifying industries".
std::vector<IndustryIndex> industry_indexes(const ReturnPanel& returns, const Membership& membership);

/// Absolute correlations of each score column against every index.
FactorIndustryTable factor_industry_correlations(const Matrix& scores,
                                                 const std::vector<IndustryIndex>& indexes);

/// Groups stocks by exact tree degree; r_squared is aligned with tree nodes.
DegreeR2Profile degree_r2_profile(const SpanningTree& tree, std::span<const double> r_squared);
DegreeR2Profile degree_r2_profile(const SpanningTree& tree, const std::vector<RegressionResult>& fits);

void write_industry_indexes(std::ostream& out, const std::vector<IndustryIndex>& indexes,
                            const std::vector<Date>& dates);
/// `factor,max,mean,min,argmax_industry`.
void write_factor_industry(std::ostream& out, const FactorIndustryTable& table);
/// `degree,l_star,count,mean_r2_percent,min_r2_percent,max_r2_percent`.
void write_degree_profile(std::ostream& out, const DegreeR2Profile& profile);

}  // namespace stocknet
