#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stocknet/ingest.hpp"
#include "stocknet/matrix.hpp"
#include "stocknet/numerics.hpp"

namespace stocknet {

/// Statistical common factors extracted from a return panel.
struct FactorModel {
  std::size_t k = 0;            // retained factors
  std::size_t kaiser_k = 0;     // Kaiser count, even when k was overridden
  bool rotated = false;
  std::vector<double> eigenvalues;  // all N, descending
  Matrix loadings;              // N×K
  Matrix rotation;              // K×K orthogonal; loadings = initial · rotation
  Matrix scores;                // T×K
};

struct MulticollinearityReport {
  Matrix correlations;                      // K×K
  std::optional<double> mean_abs_offdiag;   // empty when K < 2
};

struct VarimaxOptions {
  /// Converged once a full sweep raises the criterion by less than this.
  double tolerance = 1e-10;
  int max_sweeps = 100;
};

struct VarimaxResult {
  Matrix rotated;
  Matrix rotation;
  /// Criterion of the normalised loadings before the first sweep and after
  /// each sweep.
  std::vector<double> criterion_trace;
  int sweeps = 0;
};

struct FactorOptions {
  std::optional<std::size_t> k_override;
  bool rotate = true;
};

/// Number of eigenvalues >= 1.
std::size_t kaiser_count(const EigenDecomposition& eig);

/// Principal-component loadings: column j = eigenvector_j · sqrt(eigenvalue_j).
Matrix initial_loadings(const EigenDecomposition& eig, std::size_t k);

/// Raw varimax criterion: sum over columns of the population variance of the
/// squared entries. Callers normalise rows first if they want Kaiser's form.
double varimax_criterion(const Matrix& loadings);

/// Kaiser-normalised varimax by pairwise planar rotations.
VarimaxResult varimax(const Matrix& loadings, const VarimaxOptions& options = {});

/// Least-squares scores F = Z·Λ·(ΛᵗΛ)⁻¹ for a standardised panel Z.
Matrix factor_scores(const Matrix& standardized_returns, const Matrix& loadings);

MulticollinearityReport multicollinearity_report(const Matrix& scores);

/// Correlation matrix → eigendecomposition → Kaiser K (unless overridden) →
/// PC loadings → varimax → scores. Rotated factors are ordered by explained
/// variance (column sum of squared loadings) and signed so each loading
/// column sums to a non-negative value.
FactorModel fit_factor_model(const Matrix& returns, const FactorOptions& options = {});
FactorModel fit_factor_model(const ReturnPanel& returns, const FactorOptions& options = {});

struct ScoreTable {
  std::vector<Date> dates;
  Matrix scores;
};

/// `ticker,factor_1..factor_K`.
void write_loadings(std::ostream& out, const Matrix& loadings,
                    const std::vector<std::string>& tickers);
void write_scores(std::ostream& out, const Matrix& scores, const std::vector<Date>& dates);
ScoreTable read_scores(std::istream& in);
/// Scree table: component, eigenvalue, explained fraction, cumulative, retained flag.
void write_eigenvalues(std::ostream& out, const FactorModel& model);
void write_score_correlations(std::ostream& out, const MulticollinearityReport& report);

}  // namespace stocknet
