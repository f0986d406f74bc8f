#include "stocknet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "stocknet/csv.hpp"
#include "stocknet/errors.hpp"

namespace stocknet {

namespace {

using std::chrono::sys_days;

bool is_weekend(sys_days d) {
  const std::chrono::weekday wd{d};
  return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

sys_days next_business_day(sys_days d) {
  do d += std::chrono::days{1};
  while (is_weekend(d));
  return d;
}

sys_days previous_business_day(sys_days d) {
  do d -= std::chrono::days{1};
  while (is_weekend(d));
  return d;
}

std::vector<Date> business_days(std::size_t count) {
  using namespace std::chrono;
  std::vector<Date> out;
  out.reserve(count);
  sys_days d = sys_days{year{1992} / January / 2};
  for (std::size_t i = 0; i < count; ++i) {
    out.emplace_back(d);
    d = next_business_day(d);
  }
  return out;
}

std::string ticker_name(std::size_t j, std::size_t n) {
  const std::size_t width = std::max<std::size_t>(3, std::to_string(n).size());
  auto digits = std::to_string(j + 1);
  return "S" + std::string(width - digits.size(), '0') + digits;
}

std::string industry_name(std::size_t b) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "IND%02zu", b + 1);
  return buf;
}

}  // namespace

double NormalSource::uniform() {
  // (bits + 0.5) / 2^53 never hits 0 or 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalSource::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

void validate(const SynthSpec& spec) {
  if (spec.n_stocks < 2) throw InputError("synth: need at least 2 stocks");
  if (spec.k_factors < 1) throw InputError("synth: need at least 1 factor");
  if (spec.n_days <= spec.k_factors + 1) throw InputError("synth: n_days must exceed k_factors + 1");
  if (!(spec.noise_sigma >= 0.0)) throw InputError("synth: noise_sigma must be >= 0");
  if (!(spec.loading_min > 0.0) || !(spec.loading_max >= spec.loading_min))
    throw InputError("synth: loading range must satisfy 0 < min <= max");
  if (spec.n_industries > spec.n_stocks) throw InputError("synth: more industries than stocks");
  const std::size_t reserved = (spec.market_factor ? 1 : 0) + spec.diffuse_factors;
  if (reserved > spec.k_factors)
    throw InputError("synth: market and diffuse factors exceed k_factors");
  if (!(spec.market_weight >= 0.0) || !(spec.diffuse_weight >= 0.0))
    throw InputError("synth: factor weights must be >= 0");
  if (!(spec.hub_fraction >= 0.0 && spec.hub_fraction <= 1.0))
    throw InputError("synth: hub_fraction must lie in [0, 1]");
  if (reserved == spec.k_factors && spec.diffuse_weight == 0.0 &&
      !(spec.market_factor && spec.market_weight > 0.0))
    throw InputError("synth: spec gives stocks no factor exposure");
}

SynthMarket generate(const SynthSpec& spec) {
  validate(spec);
  const std::size_t n = spec.n_stocks;
  const std::size_t k = spec.k_factors;
  const std::size_t t_obs = spec.n_days;
  const std::size_t first_industry = spec.market_factor ? 1 : 0;
  const std::size_t industry_factors = k - first_industry - spec.diffuse_factors;
  const std::size_t blocks =
      spec.n_industries > 0 ? spec.n_industries : std::max<std::size_t>(1, industry_factors);

  NormalSource rng(spec.seed);

  Matrix scores(t_obs, k);
  for (std::size_t t = 0; t < t_obs; ++t)
    for (std::size_t f = 0; f < k; ++f) scores(t, f) = rng.normal();

  std::vector<std::size_t> block_of(n);
  std::vector<std::vector<std::size_t>> block_members(blocks);
  for (std::size_t j = 0; j < n; ++j) {
    block_of[j] = j * blocks / n;
    block_members[block_of[j]].push_back(j);
  }

  Matrix loadings(n, k);
  Membership membership;
  std::vector<double> loading_scale(n);
  std::vector<std::size_t> hubs;

  for (std::size_t j = 0; j < n; ++j)
    loading_scale[j] =
        spec.loading_min + (spec.loading_max - spec.loading_min) * rng.uniform();
  if (spec.hub_fraction > 0.0) {
    for (const auto& members : block_members) {
      const auto count = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::lround(spec.hub_fraction * members.size())));
      for (std::size_t h = 0; h < std::min(count, members.size()); ++h) {
        loading_scale[members[h]] = spec.loading_max;
        hubs.push_back(members[h]);
      }
    }
    std::sort(hubs.begin(), hubs.end());
  }

  std::vector<std::string> tickers(n);
  for (std::size_t j = 0; j < n; ++j) {
    tickers[j] = ticker_name(j, n);
    membership[tickers[j]] = industry_name(block_of[j]);

    std::vector<double> direction(k, 0.0);
    if (spec.market_factor) direction[0] = spec.market_weight;
    if (industry_factors > 0) direction[first_industry + block_of[j] % industry_factors] += 1.0;
    for (std::size_t d = 0; d < spec.diffuse_factors; ++d)
      direction[k - spec.diffuse_factors + d] = spec.diffuse_weight * rng.normal();
    double norm = 0.0;
    for (double v : direction) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw InputError("synth: stock " + tickers[j] + " has no factor exposure");
    for (std::size_t f = 0; f < k; ++f)
      loadings(j, f) = loading_scale[j] * direction[f] / norm;
  }

  Matrix returns(t_obs, n);
  for (std::size_t t = 0; t < t_obs; ++t) {
    for (std::size_t j = 0; j < n; ++j) {
      double r = 0.0;
      for (std::size_t f = 0; f < k; ++f) r += loadings(j, f) * scores(t, f);
      returns(t, j) = r + spec.noise_sigma * rng.normal();
    }
  }

  auto dates = business_days(t_obs + 1);
  dates.erase(dates.begin());
  return SynthMarket{ReturnPanel(std::move(tickers), std::move(dates), std::move(returns)),
                     std::move(loadings), std::move(scores), std::move(membership),
                     std::move(loading_scale), std::move(hubs)};
}

std::vector<double> population_r_squared(const SynthMarket& market, double noise_sigma) {
  std::vector<double> out;
  const Matrix& b = market.true_loadings;
  for (std::size_t j = 0; j < b.rows(); ++j) {
    double bb = 0.0;
    for (double v : b.row(j)) bb += v * v;
    out.push_back(bb / (bb + noise_sigma * noise_sigma));
  }
  return out;
}

PricePanel to_prices(const ReturnPanel& returns, double scale, double start) {
  if (!(start > 0.0)) throw InputError("to_prices: start price must be positive");
  const Matrix& r = returns.returns();
  Matrix p(r.rows() + 1, r.cols());
  for (std::size_t j = 0; j < r.cols(); ++j) {
    double log_price = std::log(start);
    p(0, j) = start;
    for (std::size_t t = 0; t < r.rows(); ++t) {
      log_price += scale * r(t, j);
      p(t + 1, j) = std::exp(log_price);
    }
  }
  if (!p.all_finite()) throw InputError("to_prices: prices overflow; lower the return scale");
  std::vector<Date> dates;
  dates.reserve(p.rows());
  dates.emplace_back(previous_business_day(sys_days{returns.dates().front()}));
  dates.insert(dates.end(), returns.dates().begin(), returns.dates().end());
  return PricePanel(returns.tickers(), std::move(dates), std::move(p));
}

void write_membership(std::ostream& out, const Membership& membership,
                      const std::vector<std::string>& tickers) {
  csv::write_row(out, {"ticker", "industry_id"});
  for (const auto& t : tickers) {
    const auto it = membership.find(t);
    if (it == membership.end()) throw InputError("write_membership: no industry for '" + t + "'");
    csv::write_row(out, {t, it->second});
  }
}

}  // namespace stocknet
