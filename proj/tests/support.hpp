#pragma once

#include <adagraph.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

using adagraph::Edge;
using adagraph::Graph;
using adagraph::Matrix;

inline Matrix random_matrix(adagraph::Index rows, adagraph::Index cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(rows, cols);
  for (adagraph::Index i = 0; i < rows; ++i)
    for (adagraph::Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

/// Connected random graph: a random spanning tree plus extra edges with probability p.
inline Graph random_connected_graph(int n, double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> wdist(0.2, 1.0);
  std::vector<std::vector<bool>> used(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  std::vector<Edge> edges;
  for (int v = 1; v < n; ++v) {
    const int parent = std::uniform_int_distribution<int>(0, v - 1)(rng);
    edges.push_back({parent, v, wdist(rng)});
    used[static_cast<std::size_t>(parent)][static_cast<std::size_t>(v)] = true;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!used[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] && u(rng) < p) edges.push_back({i, j, wdist(rng)});
  return Graph::from_edges(n, edges);
}

/// Dense A_rw = D^-1 A for oracle comparisons.
inline Matrix dense_rw(const Graph& g) {
  const Matrix a = g.dense();
  Matrix out = a;
  for (adagraph::Index i = 0; i < a.rows(); ++i) out.row(i) /= a.row(i).sum();
  return out;
}

inline Matrix dense_filter(const Graph& g, double mu, int k) {
  const Matrix a = dense_rw(g);
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  Matrix low = id;
  Matrix high = id;
  for (int i = 0; i < k; ++i) {
    low = low * a;
    high = high * (id - a);
  }
  return mu * low + (1.0 - mu) * high;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("adagraph_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testsupport
