#pragma once

#include <adagraph/error.hpp>
#include <adagraph/types.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <span>
#include <tuple>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace adagraph {

/// Undirected weighted edge, stored once with i < j.
struct Edge {
  int i = 0;
  int j = 0;
  double w = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Symmetric weighted graph in coordinate-list form.
///
/// Off-diagonal entries live in a sorted, duplicate-free edge list with i < j;
/// the diagonal is kept separately as per-node self-loop weights. Symmetry holds
/// by construction since each unordered pair is stored exactly once.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from (i, j, w) triples in any orientation. Entries with
  /// i == j are self-loops. Zero-weight entries are dropped.
  static Graph from_edges(int n, std::vector<Edge> edges, std::vector<double> self_loops = {}) {
    if (n < 0) throw Error(ErrorCode::InvalidGraph, "negative node count");
    if (self_loops.empty()) self_loops.assign(static_cast<std::size_t>(n), 0.0);
    if (self_loops.size() != static_cast<std::size_t>(n))
      throw Error(ErrorCode::InvalidGraph, "self-loop vector length differs from node count");
    for (double w : self_loops)
      if (!std::isfinite(w) || w < 0.0) throw Error(ErrorCode::InvalidGraph, "self-loop weight must be finite and >= 0");

    Graph g;
    g.n_ = n;
    g.edges_.reserve(edges.size());
    for (Edge e : edges) {
      if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n)
        throw Error(ErrorCode::InvalidGraph, "edge endpoint out of range");
      if (!std::isfinite(e.w) || e.w < 0.0) throw Error(ErrorCode::InvalidGraph, "edge weight must be finite and >= 0");
      if (e.i == e.j) {
        self_loops[static_cast<std::size_t>(e.i)] += e.w;
        continue;
      }
      if (e.w == 0.0) continue;
      if (e.i > e.j) std::swap(e.i, e.j);
      g.edges_.push_back(e);
    }
    std::sort(g.edges_.begin(), g.edges_.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    for (std::size_t k = 1; k < g.edges_.size(); ++k)
      if (g.edges_[k].i == g.edges_[k - 1].i && g.edges_[k].j == g.edges_[k - 1].j)
        throw Error(ErrorCode::InvalidGraph, "duplicate edge (" + std::to_string(g.edges_[k].i) + ", " +
                                                 std::to_string(g.edges_[k].j) + ")");
    g.self_loops_ = std::move(self_loops);
    return g;
  }

  int n() const noexcept { return n_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<double>& self_loops() const noexcept { return self_loops_; }

  const std::optional<Matrix>& features() const noexcept { return features_; }

  Graph with_features(Matrix features) const {
    if (features.rows() != n_) throw Error(ErrorCode::SizeMismatch, "feature rows differ from node count");
    Graph g = *this;
    g.features_ = std::move(features);
    return g;
  }

  /// Weight of the unordered pair; 0 when absent.
  double weight(int i, int j) const {
    if (i == j) return self_loops_.at(static_cast<std::size_t>(i));
    if (i > j) std::swap(i, j);
    auto it = find(i, j);
    return it == edges_.end() ? 0.0 : it->w;
  }

  bool has_edge(int i, int j) const {
    if (i == j) return self_loops_.at(static_cast<std::size_t>(i)) > 0.0;
    if (i > j) std::swap(i, j);
    return find(i, j) != edges_.end();
  }

  Vector degrees() const {
    Vector d(n_);
    for (int v = 0; v < n_; ++v) d[v] = self_loops_[static_cast<std::size_t>(v)];
    for (const Edge& e : edges_) {
      d[e.i] += e.w;
      d[e.j] += e.w;
    }
    return d;
  }

  Matrix dense() const {
    Matrix a = Matrix::Zero(n_, n_);
    for (int v = 0; v < n_; ++v) a(v, v) = self_loops_[static_cast<std::size_t>(v)];
    for (const Edge& e : edges_) {
      a(e.i, e.j) = e.w;
      a(e.j, e.i) = e.w;
    }
    return a;
  }

  SparseMatrix sparse() const {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(2 * edges_.size() + static_cast<std::size_t>(n_));
    for (int v = 0; v < n_; ++v)
      if (self_loops_[static_cast<std::size_t>(v)] != 0.0) t.emplace_back(v, v, self_loops_[static_cast<std::size_t>(v)]);
    for (const Edge& e : edges_) {
      t.emplace_back(e.i, e.j, e.w);
      t.emplace_back(e.j, e.i, e.w);
    }
    SparseMatrix s(n_, n_);
    s.setFromTriplets(t.begin(), t.end());
    return s;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_ && a.self_loops_ == b.self_loops_;
  }

 private:
  std::vector<Edge>::const_iterator find(int i, int j) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair{i, j},
                               [](const Edge& e, const std::pair<int, int>& key) {
                                 return std::tie(e.i, e.j) < std::tie(key.first, key.second);
                               });
    if (it != edges_.end() && it->i == i && it->j == j) return it;
    return edges_.end();
  }

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> self_loops_;
  std::optional<Matrix> features_;
};

/// Random-walk normalized operators of a graph with strictly positive degrees.
struct NormalizedOperators {
  SparseMatrix a_rw;  // D^-1 A, row-stochastic
  SparseMatrix l_rw;  // I - D^-1 A
  Vector degrees;

  Index n() const noexcept { return a_rw.rows(); }
};

/// Raises every self-loop to at least `w`.
inline Graph add_self_loops(const Graph& g, double w = 1.0) {
  if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidGraph, "self-loop weight must be >= 0");
  std::vector<double> loops = g.self_loops();
  for (double& s : loops) s = std::max(s, w);
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  Graph out = Graph::from_edges(g.n(), std::move(edges), std::move(loops));
  if (g.features()) out = out.with_features(*g.features());
  return out;
}

inline NormalizedOperators normalize(const Graph& g) {
  NormalizedOperators ops;
  ops.degrees = g.degrees();
  for (Index v = 0; v < ops.degrees.size(); ++v)
    if (!(ops.degrees[v] > 0.0))
      throw Error(ErrorCode::ZeroDegree, "node " + std::to_string(v) + " has zero degree");

  const int n = g.n();
  std::vector<Eigen::Triplet<double>> a;
  std::vector<Eigen::Triplet<double>> l;
  a.reserve(2 * g.edge_count() + static_cast<std::size_t>(n));
  l.reserve(2 * g.edge_count() + static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    const double self = g.self_loops()[static_cast<std::size_t>(v)] / ops.degrees[v];
    if (self != 0.0) a.emplace_back(v, v, self);
    l.emplace_back(v, v, 1.0 - self);
  }
  for (const Edge& e : g.edges()) {
    const double wij = e.w / ops.degrees[e.i];
    const double wji = e.w / ops.degrees[e.j];
    a.emplace_back(e.i, e.j, wij);
    a.emplace_back(e.j, e.i, wji);
    l.emplace_back(e.i, e.j, -wij);
    l.emplace_back(e.j, e.i, -wji);
  }
  ops.a_rw.resize(n, n);
  ops.a_rw.setFromTriplets(a.begin(), a.end());
  ops.l_rw.resize(n, n);
  ops.l_rw.setFromTriplets(l.begin(), l.end());
  return ops;
}

/// Fraction of non-self-loop edges whose endpoints share a label. Edges touching
/// a negative (unlabeled) id are skipped.
inline double edge_homophily(const Graph& g, std::span<const int> labels) {
  if (labels.size() != static_cast<std::size_t>(g.n()))
    throw Error(ErrorCode::SizeMismatch, "label vector length differs from node count");
  std::size_t same = 0;
  std::size_t total = 0;
  for (const Edge& e : g.edges()) {
    const int a = labels[static_cast<std::size_t>(e.i)];
    const int b = labels[static_cast<std::size_t>(e.j)];
    if (a < 0 || b < 0) continue;
    ++total;
    if (a == b) ++same;
  }
  if (total == 0) throw Error(ErrorCode::EmptyEdgeSet, "graph has no labeled non-self-loop edges");
  return static_cast<double>(same) / static_cast<double>(total);
}

struct SbmSample {
  Graph graph;
  Labels labels;
};

/// Stochastic block model with unit edge weights and optional Gaussian node
/// features around per-block means. Deterministic for a given seed.
inline SbmSample sbm_generate(std::span<const int> sizes, double p_in, double p_out,
                              const std::vector<std::vector<double>>& feature_means, double noise_sigma,
                              std::uint64_t seed) {
  if (!(0.0 <= p_out && p_out <= p_in && p_in <= 1.0))
    throw Error(ErrorCode::ConfigInvalid, "sbm requires 0 <= p_out <= p_in <= 1");
  if (noise_sigma < 0.0) throw Error(ErrorCode::ConfigInvalid, "noise_sigma must be >= 0");
  if (!feature_means.empty() && feature_means.size() != sizes.size())
    throw Error(ErrorCode::SizeMismatch, "one feature mean per block required");

  SbmSample out;
  for (std::size_t b = 0; b < sizes.size(); ++b)
    for (int k = 0; k < sizes[b]; ++k) out.labels.push_back(static_cast<int>(b));
  const int n = static_cast<int>(out.labels.size());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double p = out.labels[static_cast<std::size_t>(i)] == out.labels[static_cast<std::size_t>(j)] ? p_in : p_out;
      if (coin(rng) < p) edges.push_back({i, j, 1.0});
    }
  out.graph = Graph::from_edges(n, std::move(edges));

  if (!feature_means.empty()) {
    const auto dim = static_cast<Index>(feature_means.front().size());
    Matrix x(n, dim);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      const auto& mean = feature_means[static_cast<std::size_t>(out.labels[static_cast<std::size_t>(i)])];
      if (static_cast<Index>(mean.size()) != dim) throw Error(ErrorCode::SizeMismatch, "feature means differ in length");
      for (Index c = 0; c < dim; ++c) x(i, c) = mean[static_cast<std::size_t>(c)] + noise_sigma * noise(rng);
    }
    out.graph = out.graph.with_features(std::move(x));
  }
  return out;
}

// Text format: "n <N>" header, then one "e <i> <j> <w>" line per stored entry
// (self-loops as e <i> <i> <w>).

inline void write_graph(std::ostream& os, const Graph& g) {
  os << "n " << g.n() << '\n';
  os << std::setprecision(17);
  for (int v = 0; v < g.n(); ++v)
    if (g.self_loops()[static_cast<std::size_t>(v)] != 0.0)
      os << "e " << v << ' ' << v << ' ' << g.self_loops()[static_cast<std::size_t>(v)] << '\n';
  for (const Edge& e : g.edges()) os << "e " << e.i << ' ' << e.j << ' ' << e.w << '\n';
}

inline Graph read_graph(std::istream& is) {
  std::string line;
  int n = -1;
  std::vector<Edge> edges;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "n") {
      if (!(ls >> n) || n < 0) throw Error(ErrorCode::InvalidGraph, "bad header at line " + std::to_string(line_no));
    } else if (tag == "e") {
      Edge e;
      if (n < 0 || !(ls >> e.i >> e.j >> e.w))
        throw Error(ErrorCode::InvalidGraph, "bad edge at line " + std::to_string(line_no));
      edges.push_back(e);
    } else {
      throw Error(ErrorCode::InvalidGraph, "unknown record '" + tag + "' at line " + std::to_string(line_no));
    }
  }
  if (n < 0) throw Error(ErrorCode::InvalidGraph, "missing 'n' header");
  return Graph::from_edges(n, std::move(edges));
}

inline void write_labels(std::ostream& os, std::span<const int> labels) {
  for (int l : labels) os << l << '\n';
}

inline Labels read_labels(std::istream& is) {
  Labels out;
  int v = 0;
  while (is >> v) out.push_back(v);
  if (!is.eof()) throw Error(ErrorCode::Io, "non-integer entry in label file");
  return out;
}

}  // namespace adagraph
