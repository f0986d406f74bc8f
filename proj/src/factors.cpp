#include "stocknet/factors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "stocknet/csv.hpp"
#include "stocknet/errors.hpp"
#include "stocknet/network.hpp"

namespace stocknet {

namespace {

std::string factor_name(std::size_t k) { return "factor_" + std::to_string(k + 1); }

void rotate_columns(Matrix& m, std::size_t p, std::size_t q, double c, double s) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double xp = m(r, p);
    const double xq = m(r, q);
    m(r, p) = c * xp + s * xq;
    m(r, q) = -s * xp + c * xq;
  }
}

// Angle maximising the criterion over a rotation of columns p and q.
double pair_angle(const Matrix& x, std::size_t p, std::size_t q) {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double u = x(r, p) * x(r, p) - x(r, q) * x(r, q);
    const double v = 2.0 * x(r, p) * x(r, q);
    a += u;
    b += v;
    c += u * u - v * v;
    d += 2.0 * u * v;
  }
  const double n = static_cast<double>(x.rows());
  const double num = d - 2.0 * a * b / n;
  const double den = c - (a * a - b * b) / n;
  return 0.25 * std::atan2(num, den);
}

// Sorts factor columns by explained variance and flips signs so every
// loading column sums non-negatively; the same permutation is applied to
// the rotation so loadings = initial · rotation still holds.
void orient_factors(Matrix& loadings, Matrix& rotation) {
  const std::size_t k = loadings.cols();
  std::vector<double> ss(k, 0.0), sums(k, 0.0);
  for (std::size_t r = 0; r < loadings.rows(); ++r)
    for (std::size_t j = 0; j < k; ++j) {
      ss[j] += loadings(r, j) * loadings(r, j);
      sums[j] += loadings(r, j);
    }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ss[a] > ss[b]; });
  Matrix new_loadings(loadings.rows(), k), new_rotation(rotation.rows(), k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t src = order[j];
    const double sign = sums[src] < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < loadings.rows(); ++r) new_loadings(r, j) = sign * loadings(r, src);
    for (std::size_t r = 0; r < rotation.rows(); ++r) new_rotation(r, j) = sign * rotation(r, src);
  }
  loadings = std::move(new_loadings);
  rotation = std::move(new_rotation);
}

}  // namespace

std::size_t kaiser_count(const EigenDecomposition& eig) {
  return static_cast<std::size_t>(
      std::count_if(eig.eigenvalues.begin(), eig.eigenvalues.end(), [](double v) { return v >= 1.0; }));
}

Matrix initial_loadings(const EigenDecomposition& eig, std::size_t k) {
  const std::size_t n = eig.eigenvalues.size();
  if (k == 0 || k > n) {
    throw InputError("initial_loadings: factor count " + std::to_string(k) + " outside [1, " +
                     std::to_string(n) + "]");
  }
  Matrix out(n, k);
  for (std::size_t j = 0; j < k; ++j) {
    const double lambda = eig.eigenvalues[j];
    if (!(lambda > 0.0)) {
      throw NumericalError("initial_loadings: non-positive retained eigenvalue " +
                           std::to_string(j + 1));
    }
    const double root = std::sqrt(lambda);
    for (std::size_t i = 0; i < n; ++i) out(i, j) = eig.eigenvectors(i, j) * root;
  }
  return out;
}

double varimax_criterion(const Matrix& loadings) {
  const double n = static_cast<double>(loadings.rows());
  double crit = 0.0;
  for (std::size_t j = 0; j < loadings.cols(); ++j) {
    double s2 = 0.0, s4 = 0.0;
    for (std::size_t i = 0; i < loadings.rows(); ++i) {
      const double sq = loadings(i, j) * loadings(i, j);
      s2 += sq;
      s4 += sq * sq;
    }
    crit += s4 / n - (s2 / n) * (s2 / n);
  }
  return crit;
}

VarimaxResult varimax(const Matrix& loadings, const VarimaxOptions& options) {
  const std::size_t n = loadings.rows();
  const std::size_t k = loadings.cols();
  if (k == 0 || n == 0) throw InputError("varimax: empty loading matrix");
  if (!loadings.all_finite()) throw InputError("varimax: non-finite loadings");

  VarimaxResult result{loadings, Matrix::identity(k), {}, 0};
  if (k == 1) {
    result.criterion_trace.push_back(varimax_criterion(loadings));
    return result;
  }

  // Kaiser row normalisation; rows with zero communality stay as they are.
  Matrix x = loadings;
  for (std::size_t i = 0; i < n; ++i) {
    double h = 0.0;
    for (double v : x.row(i)) h += v * v;
    h = std::sqrt(h);
    if (h > 0.0)
      for (double& v : x.row(i)) v /= h;
  }

  Matrix& rotation = result.rotation;
  double crit = varimax_criterion(x);
  result.criterion_trace.push_back(crit);
  double delta = 0.0;
  while (true) {
    if (result.sweeps == options.max_sweeps) {
      std::ostringstream msg;
      msg << "varimax: no convergence after " << result.sweeps
          << " sweeps (last criterion change " << delta << ")";
      throw NumericalError(msg.str());
    }
    for (std::size_t p = 0; p + 1 < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        const double phi = pair_angle(x, p, q);
        if (phi == 0.0) continue;
        const double c = std::cos(phi), s = std::sin(phi);
        rotate_columns(x, p, q, c, s);
        rotate_columns(rotation, p, q, c, s);
      }
    }
    ++result.sweeps;
    const double next = varimax_criterion(x);
    delta = next - crit;
    crit = next;
    result.criterion_trace.push_back(crit);
    if (delta < options.tolerance) break;
  }
  result.rotated = loadings * rotation;
  return result;
}

Matrix factor_scores(const Matrix& standardized_returns, const Matrix& loadings) {
  if (standardized_returns.cols() != loadings.rows()) {
    throw InputError("factor_scores: panel has " + std::to_string(standardized_returns.cols()) +
                     " columns but loadings have " + std::to_string(loadings.rows()) + " rows");
  }
  if (loadings.cols() == 0) throw InputError("factor_scores: no factors");
  const Matrix gram = transpose_times(loadings, loadings);
  Matrix weights;  // K×N = (ΛᵗΛ)⁻¹Λᵗ
  try {
    weights = solve_spd(gram, loadings.transpose());
  } catch (const NumericalError&) {
    throw NumericalError("degenerate loadings: loading Gram matrix is singular");
  }
  return standardized_returns * weights.transpose();
}

MulticollinearityReport multicollinearity_report(const Matrix& scores) {
  const std::size_t k = scores.cols();
  if (scores.rows() < 3) throw InputError("multicollinearity_report: need at least 3 rows");
  MulticollinearityReport report{Matrix::identity(k), std::nullopt};
  if (k < 2) return report;
  std::vector<std::vector<double>> cols;
  for (std::size_t j = 0; j < k; ++j) cols.push_back(scores.column(j));
  double total = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const double r = correlation(cols[a], cols[b]);
      report.correlations(a, b) = report.correlations(b, a) = r;
      total += 2.0 * std::abs(r);
    }
  }
  report.mean_abs_offdiag = total / static_cast<double>(k * (k - 1));
  return report;
}

FactorModel fit_factor_model(const Matrix& returns, const FactorOptions& options) {
  const Matrix z = standardize_columns(returns);
  const auto corr = correlation_matrix(returns);
  const auto eig = eigh(corr.matrix());

  FactorModel model;
  model.eigenvalues = eig.eigenvalues;
  model.kaiser_k = kaiser_count(eig);
  model.k = options.k_override.value_or(model.kaiser_k);
  if (model.k == 0 || model.k > corr.size()) {
    throw InputError("factor count " + std::to_string(model.k) + " outside [1, " +
                     std::to_string(corr.size()) + "]");
  }
  const Matrix initial = initial_loadings(eig, model.k);
  if (options.rotate) {
    auto vm = varimax(initial);
    model.loadings = std::move(vm.rotated);
    model.rotation = std::move(vm.rotation);
    orient_factors(model.loadings, model.rotation);
    model.rotated = true;
  } else {
    model.loadings = initial;
    model.rotation = Matrix::identity(model.k);
  }
  model.scores = factor_scores(z, model.loadings);
  return model;
}

FactorModel fit_factor_model(const ReturnPanel& returns, const FactorOptions& options) {
  return fit_factor_model(returns.returns(), options);
}

void write_loadings(std::ostream& out, const Matrix& loadings,
                    const std::vector<std::string>& tickers) {
  if (tickers.size() != loadings.rows()) throw InputError("write_loadings: ticker count mismatch");
  std::vector<std::string> cells{"ticker"};
  for (std::size_t j = 0; j < loadings.cols(); ++j) cells.push_back(factor_name(j));
  csv::write_row(out, cells);
  for (std::size_t i = 0; i < tickers.size(); ++i) {
    cells.assign(1, tickers[i]);
    for (double v : loadings.row(i)) cells.push_back(csv::format_number(v));
    csv::write_row(out, cells);
  }
}

void write_scores(std::ostream& out, const Matrix& scores, const std::vector<Date>& dates) {
  if (dates.size() != scores.rows()) throw InputError("write_scores: date count mismatch");
  std::vector<std::string> cells{"date"};
  for (std::size_t j = 0; j < scores.cols(); ++j) cells.push_back(factor_name(j));
  csv::write_row(out, cells);
  for (std::size_t t = 0; t < dates.size(); ++t) {
    cells.assign(1, format_date(dates[t]));
    for (double v : scores.row(t)) cells.push_back(csv::format_number(v));
    csv::write_row(out, cells);
  }
}

ScoreTable read_scores(std::istream& in) {
  const auto table = csv::read_table(in);
  if (table.header.size() < 2 || table.header.front() != "date") {
    throw ParseError(1, {}, "scores header must be date,factor_1,...");
  }
  for (std::size_t j = 1; j < table.header.size(); ++j) {
    if (table.header[j] != factor_name(j - 1))
      throw ParseError(1, table.header[j], "expected '" + factor_name(j - 1) + "'");
  }
  const std::size_t k = table.header.size() - 1;
  ScoreTable out;
  std::vector<double> values;
  for (const auto& row : table.rows) {
    auto d = parse_date(row.cells.front());
    if (!d) throw ParseError(row.line, "date", "malformed date '" + row.cells.front() + "'");
    if (!out.dates.empty() && !(out.dates.back() < *d))
      throw ParseError(row.line, "date", "non-increasing dates");
    out.dates.push_back(*d);
    for (std::size_t j = 0; j < k; ++j)
      values.push_back(csv::parse_number(row.cells[j + 1], row.line, table.header[j + 1]));
  }
  out.scores = Matrix(out.dates.size(), k, std::move(values));
  return out;
}

void write_eigenvalues(std::ostream& out, const FactorModel& model) {
  csv::write_row(out, {"component", "eigenvalue", "explained_fraction", "cumulative_fraction",
                       "retained"});
  const double total = std::accumulate(model.eigenvalues.begin(), model.eigenvalues.end(), 0.0);
  double cumulative = 0.0;
  for (std::size_t j = 0; j < model.eigenvalues.size(); ++j) {
    const double v = model.eigenvalues[j];
    cumulative += v;
    csv::write_row(out, {std::to_string(j + 1), csv::format_number(v),
                         csv::format_number(v / total), csv::format_number(cumulative / total),
                         j < model.k ? "1" : "0"});
  }
}

void write_score_correlations(std::ostream& out, const MulticollinearityReport& report) {
  const std::size_t k = report.correlations.rows();
  std::vector<std::string> cells{"factor"};
  for (std::size_t j = 0; j < k; ++j) cells.push_back(factor_name(j));
  csv::write_row(out, cells);
  for (std::size_t i = 0; i < k; ++i) {
    cells.assign(1, factor_name(i));
    for (double v : report.correlations.row(i)) cells.push_back(csv::format_number(v));
    csv::write_row(out, cells);
  }
}

}  // namespace stocknet
