#pragma once

#include <adagraph/error.hpp>
#include <adagraph/graph.hpp>
#include <adagraph/superpixel.hpp>
#include <adagraph/types.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

namespace adagraph {

/// Unordered node pair with i < j.
struct NodePair {
  int i = 0;
  int j = 0;

  friend bool operator==(const NodePair&, const NodePair&) = default;
  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

inline NodePair make_pair_ordered(int a, int b) { return a < b ? NodePair{a, b} : NodePair{b, a}; }

/// Top-confidence members of every pseudo-cluster.
struct ConfidentSubsets {
  std::vector<std::vector<int>> members;  // members[k] sorted by q_ik descending, ties by node index
  double gamma = 1.0;
};

struct EdgeEditSet {
  std::vector<NodePair> recovered;
  std::vector<NodePair> removed;
};

struct UpdatedAdjacency {
  Graph graph;
  std::vector<double> recovered_weights;  // parallel to EdgeEditSet::recovered
  std::size_t removed = 0;
  std::size_t recovered = 0;
};

namespace detail {
// Absorbs representation error in products such as 0.3 * 10 before rounding.
inline constexpr double kRoundingSlack = 1e-9;
}  // namespace detail

/// Size of a confident subset: ceil(gamma * n), at least 1 and at most n.
inline std::size_t confident_size(double gamma, std::size_t n_k) {
  if (n_k == 0) return 0;
  const auto want = static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(n_k) - detail::kRoundingSlack));
  return std::clamp<std::size_t>(want, 1, n_k);
}

inline ConfidentSubsets confident_subsets(const Matrix& q, std::span<const int> c, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "gamma must lie in (0, 1]");
  if (c.size() != static_cast<std::size_t>(q.rows())) throw Error(ErrorCode::SizeMismatch, "labels and q rows differ");
  ConfidentSubsets out;
  out.gamma = gamma;
  out.members.resize(static_cast<std::size_t>(q.cols()));
  for (std::size_t i = 0; i < c.size(); ++i) out.members[static_cast<std::size_t>(c[i])].push_back(static_cast<int>(i));
  for (std::size_t k = 0; k < out.members.size(); ++k) {
    auto& m = out.members[k];
    const auto col = static_cast<Index>(k);
    std::stable_sort(m.begin(), m.end(), [&](int a, int b) {
      if (q(a, col) != q(b, col)) return q(a, col) > q(b, col);
      return a < b;
    });
    m.resize(confident_size(gamma, m.size()));
  }
  return out;
}

inline Matrix similarity_full(const Matrix& z) { return z * z.transpose(); }

/// Gram block of the subset rows only.
inline Matrix similarity_within(const Matrix& z, std::span<const int> subset) {
  if (subset.empty()) throw Error(ErrorCode::ConfigInvalid, "subset must be nonempty");
  Matrix zs(static_cast<Index>(subset.size()), z.cols());
  for (std::size_t a = 0; a < subset.size(); ++a) zs.row(static_cast<Index>(a)) = z.row(subset[a]);
  return zs * zs.transpose();
}

/// Per-cluster recovery budget floor(xi * |E| * n_k / n).
inline std::size_t recovery_budget(double xi, std::size_t edge_count, std::size_t n_k, std::size_t n) {
  if (n == 0) return 0;
  const double raw = xi * static_cast<double>(edge_count) * static_cast<double>(n_k) / static_cast<double>(n);
  return static_cast<std::size_t>(std::floor(raw + detail::kRoundingSlack));
}

/// Highest-similarity non-edges inside each confident subset.
///
/// `sims[k]` is the Gram block of `subsets.members[k]` (empty matrix for empty
/// subsets); `cluster_sizes[k]` is the full pseudo-cluster size n_k.
inline std::vector<NodePair> recover_edges(const std::vector<Matrix>& sims, const ConfidentSubsets& subsets,
                                           const Graph& existing, double xi, std::span<const int> cluster_sizes) {
  if (!(xi >= 0.0 && xi <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "xi must lie in [0, 1]");
  if (sims.size() != subsets.members.size() || cluster_sizes.size() != subsets.members.size())
    throw Error(ErrorCode::SizeMismatch, "one similarity block and size per cluster required");
  const std::size_t n = static_cast<std::size_t>(existing.n());
  std::vector<NodePair> out;
  for (std::size_t k = 0; k < subsets.members.size(); ++k) {
    const auto& members = subsets.members[k];
    const std::size_t budget =
        recovery_budget(xi, existing.edge_count(), static_cast<std::size_t>(cluster_sizes[k]), n);
    if (budget == 0 || members.size() < 2) continue;
    struct Candidate {
      double s;
      NodePair pair;
    };
    std::vector<Candidate> cand;
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const NodePair pr = make_pair_ordered(members[a], members[b]);
        if (existing.has_edge(pr.i, pr.j)) continue;
        cand.push_back({sims[k](static_cast<Index>(a), static_cast<Index>(b)), pr});
      }
    const std::size_t take = std::min(budget, cand.size());
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end(),
                      [](const Candidate& x, const Candidate& y) {
                        if (x.s != y.s) return x.s > y.s;
                        return x.pair < y.pair;
                      });
    for (std::size_t r = 0; r < take; ++r) out.push_back(cand[r].pair);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Existing inter-cluster edges whose similarity rank falls in the bottom eta
/// fraction of all non-self-loop edges. Self-loops are never candidates.
inline std::vector<NodePair> remove_edges(const Matrix& z, std::span<const int> c, double eta, const Graph& existing) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "eta must lie in [0, 1]");
  if (c.size() != static_cast<std::size_t>(existing.n()) || z.rows() != existing.n())
    throw Error(ErrorCode::SizeMismatch, "labels, embedding and graph disagree on node count");
  const auto edges = existing.edges();
  const std::size_t m = edges.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> s(m);
  for (std::size_t e = 0; e < m; ++e) s[e] = z.row(edges[e].i).dot(z.row(edges[e].j));
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (s[a] != s[b]) return s[a] > s[b];
    return std::tie(edges[a].i, edges[a].j) < std::tie(edges[b].i, edges[b].j);
  });
  const auto cutoff =
      static_cast<std::size_t>(std::ceil((1.0 - eta) * static_cast<double>(m) - detail::kRoundingSlack));
  std::vector<NodePair> out;
  for (std::size_t r = cutoff; r < m; ++r) {
    const Edge& e = edges[order[r]];
    if (c[static_cast<std::size_t>(e.i)] != c[static_cast<std::size_t>(e.j)]) out.push_back({e.i, e.j});
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// A - A_removed + A_recovered. Recovered weights use the Gaussian node-feature
/// affinity when features are present, 1.0 otherwise. Self-loops are kept.
inline UpdatedAdjacency update_adjacency(const Graph& a, const EdgeEditSet& edits, double rho) {
  std::vector<NodePair> rm = edits.removed;
  std::vector<NodePair> rc = edits.recovered;
  std::sort(rm.begin(), rm.end());
  std::sort(rc.begin(), rc.end());
  std::vector<NodePair> both;
  std::set_intersection(rm.begin(), rm.end(), rc.begin(), rc.end(), std::back_inserter(both));
  if (!both.empty())
    throw Error(ErrorCode::EditConflict, "pair (" + std::to_string(both.front().i) + ", " +
                                             std::to_string(both.front().j) + ") is both removed and recovered");

  UpdatedAdjacency out;
  std::vector<Edge> edges;
  edges.reserve(a.edge_count() + rc.size());
  for (const Edge& e : a.edges())
    if (!std::binary_search(rm.begin(), rm.end(), NodePair{e.i, e.j})) edges.push_back(e);
  for (const NodePair& pr : rm)
    if (!a.has_edge(pr.i, pr.j) || pr.i == pr.j)
      throw Error(ErrorCode::EditConflict, "removed pair is not an existing edge");
  out.removed = rm.size();

  for (const NodePair& pr : edits.recovered) {
    if (pr.i == pr.j || a.has_edge(pr.i, pr.j))
      throw Error(ErrorCode::EditConflict, "recovered pair already exists or is a self-pair");
    const double w = a.features() ? gaussian_affinity(*a.features(), pr.i, pr.j, rho) : 1.0;
    out.recovered_weights.push_back(w);
    edges.push_back({pr.i, pr.j, w});
  }
  out.recovered = rc.size();
  out.graph = Graph::from_edges(a.n(), std::move(edges), a.self_loops());
  if (a.features()) out.graph = out.graph.with_features(*a.features());
  return out;
}

/// ||Z Z^T - A||_F^2 over N^2 (or the raw sum), evaluated without forming Z Z^T:
/// ||Z^T Z||^2 - 2 tr(Z^T A Z) + ||A||^2.
inline double reconstruction_loss(const Matrix& z, const Graph& a, bool sum_form = false) {
  if (z.rows() != a.n()) throw Error(ErrorCode::SizeMismatch, "embedding rows differ from node count");
  const Matrix gram = z.transpose() * z;
  double cross = 0.0;
  double a_sq = 0.0;
  for (int v = 0; v < a.n(); ++v) {
    const double s = a.self_loops()[static_cast<std::size_t>(v)];
    cross += s * z.row(v).squaredNorm();
    a_sq += s * s;
  }
  for (const Edge& e : a.edges()) {
    cross += 2.0 * e.w * z.row(e.i).dot(z.row(e.j));
    a_sq += 2.0 * e.w * e.w;
  }
  const double loss = std::max(0.0, gram.squaredNorm() - 2.0 * cross + a_sq);
  if (sum_form) return loss;
  const double n = static_cast<double>(a.n());
  return loss / (n * n);
}

struct StructureParams {
  double gamma = 0.3;
  double xi = 0.5;
  double eta = 0.05;
  double rho = 0.2;
};

struct StructureStep {
  EdgeEditSet edits;
  UpdatedAdjacency updated;
};

/// One recovery + removal pass against the live graph.
inline StructureStep learn_structure(const Matrix& z, const Matrix& q, std::span<const int> c, const Graph& live,
                                     const StructureParams& sp) {
  const ConfidentSubsets subsets = confident_subsets(q, c, sp.gamma);
  std::vector<int> sizes(static_cast<std::size_t>(q.cols()), 0);
  for (int label : c) ++sizes[static_cast<std::size_t>(label)];
  std::vector<Matrix> sims;
  sims.reserve(subsets.members.size());
  for (const auto& members : subsets.members) sims.push_back(members.empty() ? Matrix() : similarity_within(z, members));

  StructureStep step;
  step.edits.recovered = recover_edges(sims, subsets, live, sp.xi, sizes);
  step.edits.removed = remove_edges(z, c, sp.eta, live);
  step.updated = update_adjacency(live, step.edits, sp.rho);
  return step;
}

}  // namespace adagraph
