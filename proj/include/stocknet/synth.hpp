#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "stocknet/ingest.hpp"
#include "stocknet/marketstats.hpp"
#include "stocknet/matrix.hpp"

namespace stocknet {

/// Parameters of a synthetic factor market R_j(t) = Σ_k β_jk F_k(t) + ε_j(t).
///
/// Factor roles: factor 0 is a market factor loaded by every stock when
/// `market_factor` is set; the last `diffuse_factors` are loaded by every
/// stock with random Gaussian weights; the rest are industry factors, each
/// industry block loading on one of them (cyclically). A stock's loading
/// vector is a unit direction built from those roles, scaled by its
/// loading_scale drawn uniformly from [loading_min, loading_max].
struct SynthSpec {
  std::size_t n_stocks = 100;
  std::size_t n_days = 2000;  // return observations
  std::size_t k_factors = 5;
  double loading_min = 0.5;
  double loading_max = 2.0;
  /// Industry blocks; 0 means one block per industry factor.
  std::size_t n_industries = 0;
  bool market_factor = false;
  double market_weight = 0.5;
  std::size_t diffuse_factors = 0;
  double diffuse_weight = 0.5;
  /// Share of each block pinned to loading_max (at least one stock per block
  /// when positive). These stocks become tree hubs and high-R² stocks.
  double hub_fraction = 0.0;
  double noise_sigma = 1.0;
  std::uint64_t seed = 1;
};

struct SynthMarket {
  ReturnPanel returns;
  Matrix true_loadings;  // N×K
  Matrix true_scores;    // T×K
  Membership membership;
  std::vector<double> loading_scale;
  std::vector<std::size_t> hubs;
};

/// Throws InputError for an invalid spec.
void validate(const SynthSpec& spec);

SynthMarket generate(const SynthSpec& spec);

/// Population R² of each stock: |β|² / (|β|² + σ²).
std::vector<double> population_r_squared(const SynthMarket& market, double noise_sigma);

/// Builds prices by compounding scale·R from `start` one business day before
/// the first return date, so to_returns recovers scale·R.
PricePanel to_prices(const ReturnPanel& returns, double scale = 0.01, double start = 100.0);

void write_membership(std::ostream& out, const Membership& membership,
                      const std::vector<std::string>& tickers);

/// Deterministic normal deviates from a 64-bit Mersenne Twister via the
/// Box–Muller transform; unlike std::normal_distribution the stream is
/// identical on every standard library.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1) with 53 random bits.
  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace stocknet
