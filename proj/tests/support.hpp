#pragma once
// Test-only oracles and generators. Nothing here calls into the code paths
// it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stocknet/ingest.hpp"
#include "stocknet/matrix.hpp"

namespace testing {

using stocknet::Matrix;

/// Correlation evaluated literally as (<xy> - <x><y>) / sqrt((<x²>-<x>²)(<y²>-<y>²)).
inline double eq1a_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    sx += x[t];
    sy += y[t];
    sxy += x[t] * y[t];
    sxx += x[t] * x[t];
    syy += y[t] * y[t];
  }
  const double mx = sx / n, my = sy / n;
  return (sxy / n - mx * my) / std::sqrt((sxx / n - mx * mx) * (syy / n - my * my));
}

inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return eq1a_correlation(average_ranks(x), average_ranks(y));
}

/// Random symmetric matrix with zero diagonal and off-diagonal weights in [lo, hi).
inline Matrix random_weights(std::size_t n, std::mt19937_64& rng, double lo = 0.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) w(i, j) = w(j, i) = u(rng);
  return w;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = g(rng);
  return m;
}

inline Matrix random_symmetric(std::size_t n, std::mt19937_64& rng) {
  Matrix a = random_matrix(n, n, rng);
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

inline double ascending_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return std::accumulate(v.begin(), v.end(), 0.0);
}

/// Minimum spanning-tree weight of the complete graph by decoding every
/// Prüfer sequence (n^(n-2) labelled trees). Each tree's weights are summed
/// in ascending order, so equal edge multisets give bit-identical totals.
inline double brute_force_mst_weight(const Matrix& w) {
  const std::size_t n = w.rows();
  if (n == 2) return w(0, 1);
  std::vector<std::size_t> seq(n - 2, 0);
  double best = INFINITY;
  while (true) {
    std::vector<int> degree(n, 1);
    for (auto s : seq) ++degree[s];
    std::vector<double> weights;
    for (auto s : seq) {
      std::size_t leaf = 0;
      while (degree[leaf] != 1) ++leaf;
      weights.push_back(w(leaf, s));
      --degree[leaf];
      --degree[s];
    }
    std::size_t u = n, v = n;
    for (std::size_t i = 0; i < n; ++i)
      if (degree[i] == 1) (u == n ? u : v) = i;
    weights.push_back(w(u, v));
    best = std::min(best, ascending_sum(weights));

    std::size_t pos = 0;
    while (pos < seq.size() && ++seq[pos] == n) seq[pos++] = 0;
    if (pos == seq.size()) break;
  }
  return best;
}

/// Max edge weight along the tree path between every pair (BFS per source).
inline Matrix tree_path_max(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (auto [i, j, w] : edges) {
    adj[i].push_back({j, w});
    adj[j].push_back({i, w});
  }
  Matrix out(n, n, -1.0);
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> stack{s};
    out(s, s) = 0.0;
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      for (auto [v, w] : adj[u]) {
        if (out(s, v) >= 0.0) continue;
        out(s, v) = std::max(out(s, u), w);
        stack.push_back(v);
      }
    }
  }
  return out;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("stocknet_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Wraps a return matrix in a panel with tickers T0.. and consecutive dates.
inline stocknet::ReturnPanel make_panel(const Matrix& r) {
  using namespace std::chrono;
  std::vector<std::string> tickers;
  for (std::size_t j = 0; j < r.cols(); ++j) tickers.push_back("T" + std::to_string(j));
  std::vector<stocknet::Date> dates;
  const sys_days start = year{2000} / January / 1;
  for (std::size_t t = 0; t < r.rows(); ++t) dates.emplace_back(start + days{static_cast<int>(t)});
  return stocknet::ReturnPanel(tickers, dates, r);
}

}  // namespace testing
