#include "stocknet/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "stocknet/errors.hpp"

namespace stocknet {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const std::size_t n = a.rows();
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = a(p, k) = c * akp - s * akq;
    a(k, q) = a(q, k) = s * akp + c * akq;
  }
  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = a(q, p) = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

EigenDecomposition eigh(const Matrix& input, const JacobiOptions& options) {
  if (!input.is_square() || input.empty()) {
    throw InputError("eigh: expected a non-empty square matrix, got " +
                     std::to_string(input.rows()) + "x" + std::to_string(input.cols()));
  }
  if (!input.all_finite()) throw InputError("eigh: matrix has non-finite entries");
  const double scale = std::max(1.0, input.max_abs());
  if (input.asymmetry() > 1e-10 * scale) {
    throw InputError("eigh: matrix is not symmetric (max asymmetry " +
                     std::to_string(input.asymmetry()) + ")");
  }

  const std::size_t n = input.rows();
  Matrix a = input;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (input(i, j) + input(j, i));
  Matrix v = Matrix::identity(n);

  const double threshold = options.tolerance * a.frobenius_norm();
  double off = off_diagonal_norm(a);
  int sweep = 0;
  while (off >= threshold && off > 0.0) {
    if (sweep == options.max_sweeps) {
      std::ostringstream msg;
      msg << "eigh: no convergence after " << sweep
          << " Jacobi sweeps (off-diagonal residual " << off << ")";
      throw NumericalError(msg.str());
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    off = off_diagonal_norm(a);
    ++sweep;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  EigenDecomposition out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.eigenvalues[k] = a(src, src);
    std::size_t pivot = 0;
    for (std::size_t r = 1; r < n; ++r)
      if (std::abs(v(r, src)) > std::abs(v(pivot, src))) pivot = r;
    const double sign = v(pivot, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = sign * v(r, src);
  }
  return out;
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
  if (!a.is_square() || a.empty()) throw InputError("solve_spd: matrix is not square");
  if (b.rows() != a.rows()) {
    throw InputError("solve_spd: right-hand side has " + std::to_string(b.rows()) +
                     " rows, expected " + std::to_string(a.rows()));
  }
  if (!a.all_finite() || !b.all_finite()) throw InputError("solve_spd: non-finite entries");

  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    // Pivots that vanish relative to their diagonal entry signal a singular
    // (rank-deficient) matrix under rounding.
    if (!(d > 1e-12 * std::abs(a(j, j)))) {
      throw NumericalError("matrix not positive definite (pivot " + std::to_string(j) + ")");
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }

  Matrix x = b;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = x(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
      x(i, c) = s / l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = x(i, c);
      for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x(k, c);
      x(i, c) = s / l(i, i);
    }
  }
  return x;
}

double mean(std::span<const double> x) {
  if (x.empty()) throw InputError("mean: empty series");
  const double anchor = x.front();
  double s = 0.0;
  for (double v : x) s += v - anchor;
  return anchor + s / static_cast<double>(x.size());
}

double population_variance(std::span<const double> x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InputError("correlation: series lengths " + std::to_string(x.size()) + " and " +
                     std::to_string(y.size()) + " differ");
  }
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double dx = x[t] - mx;
    const double dy = y[t] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw InputError("correlation: zero-variance series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Matrix standardize_columns(const Matrix& m) {
  Matrix z(m.rows(), m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const auto col = m.column(c);
    const double mu = mean(col);
    const double var = population_variance(col);
    if (!(var > 0.0)) {
      throw InputError("standardize_columns: zero-variance column " + std::to_string(c));
    }
    const double sd = std::sqrt(var);
    for (std::size_t r = 0; r < m.rows(); ++r) z(r, c) = (col[r] - mu) / sd;
  }
  return z;
}

}  // namespace stocknet
