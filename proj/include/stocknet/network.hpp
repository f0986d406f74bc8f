#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "stocknet/ingest.hpp"
#include "stocknet/matrix.hpp"

namespace stocknet {

/// Symmetric N×N correlation matrix with unit diagonal and entries in [-1, 1].
class CorrelationMatrix {
 public:
  /// Validates the invariants, clamps entries that overshoot [-1, 1] by at
  /// most 1e-12 and symmetrises exactly.
  explicit CorrelationMatrix(Matrix rho);

  std::size_t size() const noexcept { return rho_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return rho_(i, j); }
  const Matrix& matrix() const noexcept { return rho_; }

 private:
  Matrix rho_;
};

/// Correlation distances d = sqrt(2(1 - rho)), in [0, 2] with zero diagonal.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(Matrix d);

  std::size_t size() const noexcept { return d_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return d_(i, j); }
  const Matrix& matrix() const noexcept { return d_; }

 private:
  Matrix d_;
};

struct Edge {
  std::size_t i = 0;  // i < j
  std::size_t j = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// A spanning tree over nodes 0..n-1 with its per-node degree (number of
/// links). Construction checks n-1 edges, connectivity and acyclicity.
class SpanningTree {
 public:
  SpanningTree(std::size_t n, std::vector<Edge> edges);

  std::size_t size() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<int>& degree() const noexcept { return degree_; }
  int max_degree() const;
  int min_degree() const;
  double total_weight() const;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<int> degree_;
};

struct NormalizedDegree {
  std::size_t node = 0;
  double l_star = 0.0;
};

struct DegreeBin {
  int degree = 0;
  std::size_t count = 0;
  double probability = 0.0;
};
using DegreeDistribution = std::vector<DegreeBin>;

struct PowerLawFit {
  double gamma = 0.0;  // slope of ln p(k) against ln k
  double intercept = 0.0;
  double r2_loglog = 0.0;
  std::size_t bins_used = 0;
};

/// Pearson correlations of the return columns using population moments.
CorrelationMatrix correlation_matrix(const Matrix& returns);
CorrelationMatrix correlation_matrix(const ReturnPanel& returns);

DistanceMatrix distance_matrix(const CorrelationMatrix& c);

/// Kruskal over the complete graph with symmetric weights. Edges are
/// considered in (weight, i, j) order so equal weights resolve to the
/// lexicographically smallest pair.
SpanningTree minimum_spanning_tree(const Matrix& weights);
SpanningTree kruskal_mst(const DistanceMatrix& d);

/// L* = 2(L - L_min)/(L_max - L_min) - 1, mapping the degree range onto [-1, +1].
double normalize_degree(int degree, int l_min, int l_max);
/// Throws InputError("degenerate degree range") when every degree is equal.
std::vector<NormalizedDegree> normalize_degrees(const SpanningTree& tree);

/// Observed degrees in ascending order.
DegreeDistribution degree_distribution(const SpanningTree& tree);

/// Least-squares line through (ln k, ln p(k)) over bins with p(k) > 0.
/// Throws InputError("insufficient support") with fewer than three such bins.
PowerLawFit fit_power_law(const DegreeDistribution& dist);

/// `i,j,ticker_i,ticker_j,distance` with one row per tree edge.
void write_edge_list(std::ostream& out, const SpanningTree& tree,
                     const std::vector<std::string>& tickers);
/// Reads an edge list back; `tickers` receives the node labels by index.
SpanningTree read_edge_list(std::istream& in, std::vector<std::string>& tickers);
/// Undirected DOT graph labelled by ticker, distance as edge label.
void write_dot(std::ostream& out, const SpanningTree& tree, const std::vector<std::string>& tickers);

}  // namespace stocknet
