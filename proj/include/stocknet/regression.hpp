#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stocknet/ingest.hpp"
#include "stocknet/matrix.hpp"

namespace stocknet {

/// OLS fit of one return series on the factor scores plus an intercept.
/// r_squared is a fraction in [0, 1].
struct RegressionResult {
  std::string ticker;
  double alpha = 0.0;
  std::vector<double> betas;
  double r_squared = 0.0;
  std::vector<double> residuals;
};

/// Throws InputError("insufficient observations") when T <= K + 1 and
/// NumericalError("collinear factors") when [1 | F] is rank deficient.
RegressionResult fit_multifactor(std::span<const double> returns, const Matrix& scores,
                                 std::string ticker = {});

/// One fit per ticker, in panel order. Errors name the failing ticker.
std::vector<RegressionResult> fit_panel(const ReturnPanel& returns, const Matrix& scores);

/// Mean |correlation| between residual series of distinct stocks; series
/// with zero residual variance are skipped. Empty if fewer than two remain.
std::optional<double> mean_abs_residual_correlation(const std::vector<RegressionResult>& fits);

/// `ticker,alpha,beta_1..beta_K,r_squared_percent`.
void write_regression(std::ostream& out, const std::vector<RegressionResult>& fits);
/// Reads the table back (residuals are not stored and come back empty).
std::vector<RegressionResult> read_regression(std::istream& in);

}  // namespace stocknet
