#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stocknet/matrix.hpp"

namespace stocknet {

/// Spectrum of a symmetric matrix. Eigenvalues are sorted descending and
/// column k of `eigenvectors` pairs with eigenvalues[k]. Each eigenvector's
/// entry of largest magnitude is non-negative (ties go to the lowest index).
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
};

struct JacobiOptions {
  /// Stop once the off-diagonal Frobenius norm drops below tolerance·‖A‖_F.
  double tolerance = 1e-12;
  int max_sweeps = 100;
};

/// Symmetric eigendecomposition by cyclic Jacobi sweeps.
/// Throws InputError for non-square/non-symmetric/non-finite input and
/// NumericalError if the sweep cap is reached.
EigenDecomposition eigh(const Matrix& a, const JacobiOptions& options = {});

/// Solves a·x = b for symmetric positive-definite a by Cholesky.
/// Throws NumericalError("matrix not positive definite") when a pivot is
/// non-positive relative to its diagonal entry.
Matrix solve_spd(const Matrix& a, const Matrix& b);

/// Z-scores every column with population moments (divide by T).
Matrix standardize_columns(const Matrix& m);

// Population moments over a series. mean() is exact for constant input.
double mean(std::span<const double> x);
double population_variance(std::span<const double> x);
/// Pearson correlation with population time averages; throws InputError if
/// either series has zero variance.
double correlation(std::span<const double> x, std::span<const double> y);

}  // namespace stocknet
