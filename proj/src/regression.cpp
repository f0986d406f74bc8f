#include "stocknet/regression.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "stocknet/csv.hpp"
#include "stocknet/errors.hpp"
#include "stocknet/numerics.hpp"

namespace stocknet {

RegressionResult fit_multifactor(std::span<const double> returns, const Matrix& scores,
                                 std::string ticker) {
  const std::size_t t_obs = returns.size();
  const std::size_t k = scores.cols();
  if (scores.rows() != t_obs) {
    throw InputError("fit_multifactor: " + std::to_string(t_obs) + " returns but " +
                     std::to_string(scores.rows()) + " score rows");
  }
  if (k == 0) throw InputError("fit_multifactor: no factors");
  if (t_obs <= k + 1) {
    throw InputError("insufficient observations: T = " + std::to_string(t_obs) +
                     " with K = " + std::to_string(k));
  }

  // Normal equations on the centred design; the intercept follows from the means.
  const double y_mean = mean(returns);
  std::vector<double> f_mean(k);
  Matrix fc(t_obs, k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto col = scores.column(j);
    f_mean[j] = mean(col);
    for (std::size_t t = 0; t < t_obs; ++t) fc(t, j) = col[t] - f_mean[j];
  }
  Matrix yc(t_obs, 1);
  double sst = 0.0;
  for (std::size_t t = 0; t < t_obs; ++t) {
    yc(t, 0) = returns[t] - y_mean;
    sst += yc(t, 0) * yc(t, 0);
  }
  if (!(sst > 0.0)) throw InputError("zero-variance series");

  Matrix beta;
  try {
    beta = solve_spd(transpose_times(fc, fc), transpose_times(fc, yc));
  } catch (const NumericalError&) {
    throw NumericalError("collinear factors: design matrix is rank deficient");
  }

  RegressionResult fit;
  fit.ticker = std::move(ticker);
  fit.betas = beta.column(0);
  fit.alpha = y_mean;
  for (std::size_t j = 0; j < k; ++j) fit.alpha -= fit.betas[j] * f_mean[j];
  fit.residuals.resize(t_obs);
  double ssr = 0.0;
  for (std::size_t t = 0; t < t_obs; ++t) {
    double e = yc(t, 0);
    for (std::size_t j = 0; j < k; ++j) e -= fc(t, j) * fit.betas[j];
    fit.residuals[t] = e;
    ssr += e * e;
  }
  fit.r_squared = std::clamp(1.0 - ssr / sst, 0.0, 1.0);
  return fit;
}

std::vector<RegressionResult> fit_panel(const ReturnPanel& returns, const Matrix& scores) {
  if (scores.rows() != returns.n_dates()) {
    throw InputError("fit_panel: panel has " + std::to_string(returns.n_dates()) +
                     " rows but scores have " + std::to_string(scores.rows()));
  }
  std::vector<RegressionResult> fits;
  fits.reserve(returns.n_tickers());
  for (std::size_t j = 0; j < returns.n_tickers(); ++j) {
    const auto& ticker = returns.tickers()[j];
    try {
      fits.push_back(fit_multifactor(returns.returns().column(j), scores, ticker));
    } catch (const InputError& e) {
      throw InputError("ticker '" + ticker + "': " + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError("ticker '" + ticker + "': " + e.what());
    }
  }
  return fits;
}

std::optional<double> mean_abs_residual_correlation(const std::vector<RegressionResult>& fits) {
  std::vector<const RegressionResult*> usable;
  for (const auto& f : fits)
    if (f.residuals.size() > 1 && population_variance(f.residuals) > 0.0) usable.push_back(&f);
  if (usable.size() < 2) return std::nullopt;
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < usable.size(); ++a)
    for (std::size_t b = a + 1; b < usable.size(); ++b, ++pairs)
      total += std::abs(correlation(usable[a]->residuals, usable[b]->residuals));
  return total / static_cast<double>(pairs);
}

void write_regression(std::ostream& out, const std::vector<RegressionResult>& fits) {
  const std::size_t k = fits.empty() ? 0 : fits.front().betas.size();
  std::vector<std::string> cells{"ticker", "alpha"};
  for (std::size_t j = 0; j < k; ++j) cells.push_back("beta_" + std::to_string(j + 1));
  cells.push_back("r_squared_percent");
  csv::write_row(out, cells);
  for (const auto& f : fits) {
    if (f.betas.size() != k) throw InputError("write_regression: inconsistent factor counts");
    cells.assign({f.ticker, csv::format_number(f.alpha)});
    for (double b : f.betas) cells.push_back(csv::format_number(b));
    cells.push_back(csv::format_number(100.0 * f.r_squared));
    csv::write_row(out, cells);
  }
}

std::vector<RegressionResult> read_regression(std::istream& in) {
  const auto table = csv::read_table(in);
  const auto& h = table.header;
  if (h.size() < 4 || h[0] != "ticker" || h[1] != "alpha" || h.back() != "r_squared_percent") {
    throw ParseError(1, {}, "regression header must be ticker,alpha,beta_1..beta_K,r_squared_percent");
  }
  const std::size_t k = h.size() - 3;
  for (std::size_t j = 0; j < k; ++j) {
    if (h[j + 2] != "beta_" + std::to_string(j + 1))
      throw ParseError(1, h[j + 2], "expected 'beta_" + std::to_string(j + 1) + "'");
  }
  std::vector<RegressionResult> fits;
  for (const auto& row : table.rows) {
    RegressionResult f;
    f.ticker = row.cells[0];
    if (f.ticker.empty()) throw ParseError(row.line, "ticker", "empty ticker");
    f.alpha = csv::parse_number(row.cells[1], row.line, "alpha");
    for (std::size_t j = 0; j < k; ++j)
      f.betas.push_back(csv::parse_number(row.cells[j + 2], row.line, h[j + 2]));
    const double pct = csv::parse_number(row.cells.back(), row.line, "r_squared_percent");
    if (pct < 0.0 || pct > 100.0)
      throw ParseError(row.line, "r_squared_percent", "value outside [0, 100]");
    f.r_squared = pct / 100.0;
    fits.push_back(std::move(f));
  }
  return fits;
}

}  // namespace stocknet
