#include "stocknet/network.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include "stocknet/csv.hpp"
#include "stocknet/errors.hpp"
#include "stocknet/numerics.hpp"

namespace stocknet {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// False if x and y were already connected.
  bool unite(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    if (rank_[x] < rank_[y]) std::swap(x, y);
    parent_[y] = x;
    if (rank_[x] == rank_[y]) ++rank_[x];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
};

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

CorrelationMatrix::CorrelationMatrix(Matrix rho) : rho_(std::move(rho)) {
  if (!rho_.is_square() || rho_.empty()) throw InputError("CorrelationMatrix: not square");
  if (!rho_.all_finite()) throw InputError("CorrelationMatrix: non-finite entry");
  if (rho_.asymmetry() > 1e-12) throw InputError("CorrelationMatrix: not symmetric");
  const std::size_t n = rho_.rows();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(rho_(i, i) - 1.0) > 1e-10) {
      throw InputError("CorrelationMatrix: diagonal entry " + std::to_string(i) + " is not 1");
    }
    rho_(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = rho_(i, j);
      if (std::abs(v) > 1.0 + 1e-12) {
        throw InputError("CorrelationMatrix: entry (" + std::to_string(i) + "," +
                         std::to_string(j) + ") outside [-1, 1]");
      }
      rho_(i, j) = rho_(j, i) = std::clamp(v, -1.0, 1.0);
    }
  }
}

DistanceMatrix::DistanceMatrix(Matrix d) : d_(std::move(d)) {
  if (!d_.is_square() || d_.empty()) throw InputError("DistanceMatrix: not square");
  if (!d_.all_finite()) throw InputError("DistanceMatrix: non-finite entry");
  if (d_.asymmetry() != 0.0) throw InputError("DistanceMatrix: not symmetric");
  for (std::size_t i = 0; i < d_.rows(); ++i) {
    if (d_(i, i) != 0.0) throw InputError("DistanceMatrix: nonzero diagonal");
    for (double v : d_.row(i)) {
      if (v < 0.0 || v > 2.0) throw InputError("DistanceMatrix: entry outside [0, 2]");
    }
  }
}

SpanningTree::SpanningTree(std::size_t n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)), degree_(n, 0) {
  if (n < 2) throw InvariantError("SpanningTree: need at least 2 nodes");
  if (edges_.size() != n - 1) {
    throw InvariantError("SpanningTree: " + std::to_string(edges_.size()) + " edges for " +
                         std::to_string(n) + " nodes");
  }
  DisjointSets sets(n);
  for (const auto& e : edges_) {
    if (e.i >= e.j || e.j >= n) throw InvariantError("SpanningTree: malformed edge");
    if (!sets.unite(e.i, e.j)) throw InvariantError("SpanningTree: edge set has a cycle");
    ++degree_[e.i];
    ++degree_[e.j];
  }
  // n-1 acyclic edges on n nodes are necessarily connected.
}

int SpanningTree::max_degree() const { return *std::max_element(degree_.begin(), degree_.end()); }
int SpanningTree::min_degree() const { return *std::min_element(degree_.begin(), degree_.end()); }

double SpanningTree::total_weight() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.weight;
  return s;
}

CorrelationMatrix correlation_matrix(const Matrix& returns) {
  if (returns.rows() < 2) throw InputError("correlation_matrix: need at least 2 rows");
  const Matrix z = standardize_columns(returns);
  const std::size_t n = z.cols();
  const double inv_t = 1.0 / static_cast<double>(z.rows());
  Matrix rho = transpose_times(z, z);
  for (std::size_t i = 0; i < n; ++i) {
    rho(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) rho(i, j) = rho(j, i) = rho(i, j) * inv_t;
  }
  return CorrelationMatrix(std::move(rho));
}

CorrelationMatrix correlation_matrix(const ReturnPanel& returns) {
  return correlation_matrix(returns.returns());
}

DistanceMatrix distance_matrix(const CorrelationMatrix& c) {
  const std::size_t n = c.size();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      d(i, j) = d(j, i) = std::min(2.0, std::sqrt(2.0 * (1.0 - c(i, j))));
  return DistanceMatrix(std::move(d));
}

SpanningTree minimum_spanning_tree(const Matrix& weights) {
  if (!weights.is_square() || weights.rows() < 2) {
    throw InputError("minimum_spanning_tree: need a square weight matrix with n >= 2");
  }
  if (!weights.all_finite()) throw InputError("minimum_spanning_tree: non-finite weight");
  const std::size_t n = weights.rows();
  std::vector<Edge> candidates;
  candidates.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) candidates.push_back({i, j, weights(i, j)});
  std::sort(candidates.begin(), candidates.end(), [](const Edge& a, const Edge& b) {
    if (a.weight != b.weight) return a.weight < b.weight;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  DisjointSets sets(n);
  std::vector<Edge> chosen;
  chosen.reserve(n - 1);
  for (const auto& e : candidates) {
    if (sets.unite(e.i, e.j)) {
      chosen.push_back(e);
      if (chosen.size() == n - 1) break;
    }
  }
  return SpanningTree(n, std::move(chosen));
}

SpanningTree kruskal_mst(const DistanceMatrix& d) { return minimum_spanning_tree(d.matrix()); }

double normalize_degree(int degree, int l_min, int l_max) {
  if (l_max <= l_min) throw InputError("degenerate degree range");
  return 2.0 * static_cast<double>(degree - l_min) / static_cast<double>(l_max - l_min) - 1.0;
}

std::vector<NormalizedDegree> normalize_degrees(const SpanningTree& tree) {
  const int lo = tree.min_degree();
  const int hi = tree.max_degree();
  std::vector<NormalizedDegree> out;
  out.reserve(tree.size());
  for (std::size_t i = 0; i < tree.size(); ++i)
    out.push_back({i, normalize_degree(tree.degree()[i], lo, hi)});
  return out;
}

DegreeDistribution degree_distribution(const SpanningTree& tree) {
  std::map<int, std::size_t> counts;
  for (int k : tree.degree()) ++counts[k];
  DegreeDistribution out;
  const double n = static_cast<double>(tree.size());
  for (const auto& [k, c] : counts) out.push_back({k, c, static_cast<double>(c) / n});
  return out;
}

PowerLawFit fit_power_law(const DegreeDistribution& dist) {
  std::vector<double> x, y;
  for (const auto& bin : dist) {
    if (bin.degree > 0 && bin.probability > 0.0) {
      x.push_back(std::log(static_cast<double>(bin.degree)));
      y.push_back(std::log(bin.probability));
    }
  }
  if (x.size() < 3) {
    throw InputError("insufficient support: " + std::to_string(x.size()) +
                     " nonzero degree bins, need 3");
  }
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  PowerLawFit fit;
  fit.gamma = sxy / sxx;
  fit.intercept = my - fit.gamma * mx;
  fit.r2_loglog = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  fit.bins_used = x.size();
  return fit;
}

void write_edge_list(std::ostream& out, const SpanningTree& tree,
                     const std::vector<std::string>& tickers) {
  if (tickers.size() != tree.size()) throw InputError("write_edge_list: ticker count mismatch");
  csv::write_row(out, {"i", "j", "ticker_i", "ticker_j", "distance"});
  for (const auto& e : tree.edges()) {
    csv::write_row(out, {std::to_string(e.i), std::to_string(e.j), tickers[e.i], tickers[e.j],
                         csv::format_number(e.weight)});
  }
}

SpanningTree read_edge_list(std::istream& in, std::vector<std::string>& tickers) {
  const auto table = csv::read_table(in);
  const std::vector<std::string> expected{"i", "j", "ticker_i", "ticker_j", "distance"};
  if (table.header != expected) {
    throw ParseError(1, {}, "edge list header must be i,j,ticker_i,ticker_j,distance");
  }
  const std::size_t n = table.rows.size() + 1;
  tickers.assign(n, std::string{});
  auto parse_node = [&](const csv::Table::Row& row, std::size_t col) {
    const double v = csv::parse_number(row.cells[col], row.line, expected[col]);
    if (v < 0 || v >= static_cast<double>(n) || v != std::floor(v)) {
      throw ParseError(row.line, expected[col], "node index out of range");
    }
    const auto node = static_cast<std::size_t>(v);
    const auto& label = row.cells[col + 2];
    if (!tickers[node].empty() && tickers[node] != label) {
      throw ParseError(row.line, expected[col + 2], "inconsistent ticker for node");
    }
    tickers[node] = label;
    return node;
  };
  std::vector<Edge> edges;
  for (const auto& row : table.rows) {
    const std::size_t i = parse_node(row, 0);
    const std::size_t j = parse_node(row, 1);
    if (i >= j) throw ParseError(row.line, "i", "edge endpoints must satisfy i < j");
    edges.push_back({i, j, csv::parse_number(row.cells[4], row.line, "distance")});
  }
  try {
    return SpanningTree(n, std::move(edges));
  } catch (const InvariantError& e) {
    throw ParseError(0, {}, std::string("edge list is not a spanning tree: ") + e.what());
  }
}

void write_dot(std::ostream& out, const SpanningTree& tree, const std::vector<std::string>& tickers) {
  if (tickers.size() != tree.size()) throw InputError("write_dot: ticker count mismatch");
  out << "graph mst {\n";
  for (std::size_t i = 0; i < tree.size(); ++i)
    out << "  " << i << " [label=\"" << dot_escape(tickers[i]) << "\"];\n";
  for (const auto& e : tree.edges())
    out << "  " << e.i << " -- " << e.j << " [label=\"" << csv::format_number(e.weight)
        << "\"];\n";
  out << "}\n";
}

}  // namespace stocknet
