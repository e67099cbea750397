#pragma once

#include <adagraph/adam.hpp>
#include <adagraph/error.hpp>
#include <adagraph/filter.hpp>
#include <adagraph/graph.hpp>
#include <adagraph/kmeans.hpp>
#include <adagraph/objective.hpp>
#include <adagraph/selftrain.hpp>
#include <adagraph/structure.hpp>
#include <adagraph/types.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace adagraph {

struct TrainConfig {
  int iterations = 50;
  double learning_rate = 5e-4;
  double gamma = 0.3;
  double xi = 0.5;
  double eta = 0.05;
  int t_layers = 5;
  int k_order = 1;
  int embed_dim = 32;
  int clusters = 0;
  int warmup = 5;
  int p_interval = 1;
  int structure_interval = 1;
  std::uint64_t seed = 0;
  bool normalize_embeddings = true;
  bool loss_sum_form = false;
  bool center_features = true;
  bool ablate_v1 = false;  // consumed at ingestion (per-pixel graph)
  bool ablate_v2 = false;  // mu frozen at 1: pure low-pass
  bool ablate_v3 = false;  // graph frozen, no structure edits
  double rho = 0.2;
  double self_loop = 1.0;
  double divergence_limit = 1e6;
  int kmeans_max_iter = 300;
  double kmeans_tol = 1e-6;

  void validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorCode::ConfigInvalid, m); };
    if (iterations < 0) fail("iterations must be >= 0");
    if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
    if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma must lie in (0, 1]");
    if (!(xi >= 0.0 && xi <= 1.0)) fail("xi must lie in [0, 1]");
    if (!(eta >= 0.0 && eta <= 1.0)) fail("eta must lie in [0, 1]");
    if (t_layers < 1) fail("t_layers must be >= 1");
    if (k_order < 1) fail("k_order must be >= 1");
    if (embed_dim < 1) fail("embed_dim must be >= 1");
    if (clusters < 2) fail("clusters must be >= 2");
    if (warmup < 0) fail("warmup must be >= 0");
    if (p_interval < 1) fail("p_interval must be >= 1");
    if (structure_interval < 1) fail("structure_interval must be >= 1");
    if (!(rho > 0.0)) fail("rho must be > 0");
    if (!(self_loop > 0.0)) fail("self_loop must be > 0");
  }

  ObjectiveOptions objective() const {
    ObjectiveOptions o;
    o.k = k_order;
    o.t_layers = t_layers;
    if (ablate_v2) o.fixed_mu = 1.0;
    o.normalize_rows = normalize_embeddings;
    o.sum_form = loss_sum_form;
    return o;
  }
};

struct TraceRow {
  int iteration = 0;
  double l_c = 0.0;
  double l_g = 0.0;
  double l_o = 0.0;
  double mu = 0.0;
  std::size_t recovered = 0;
  std::size_t removed = 0;
  double homophily = 0.0;  // edge homophily of the target graph under the pseudo-labels
};

struct EditRecord {
  int iteration = 0;
  bool removal = false;
  int i = 0;
  int j = 0;
  double weight = 0.0;  // removed: previous weight; recovered: new weight
};

struct TrainResult {
  ModelParams params;
  Matrix z;
  Matrix q;
  Matrix p;
  Labels initial_labels;  // K-means on the initial embedding
  Labels argmax_labels;   // argmax of the final soft assignment
  Labels labels;          // K-means on the final embedding, seeded by the trained centers
  double label_agreement = 0.0;
  Graph graph;            // live adjacency after the last swap (with self-loops)
  std::vector<TraceRow> trace;
  std::vector<EditRecord> edits;
  bool diverged = false;
};

/// Column-centered copy of the node features.
inline Matrix center_columns(const Matrix& x) { return x.rowwise() - x.colwise().mean(); }

/// Joint self-training and structure learning over a feature-carrying graph.
///
/// Each iteration encodes with the current live graph, refreshes P on its
/// schedule, optionally rewires the graph from the pseudo-labels, scores the
/// reconstruction against the rewired adjacency, takes one Adam step, and
/// then swaps the rewired adjacency in for the next iteration.
inline TrainResult train(const Graph& graph, const TrainConfig& cfg) {
  cfg.validate();
  if (!graph.features()) throw Error(ErrorCode::ConfigInvalid, "graph carries no node features");
  if (graph.n() < cfg.clusters) throw Error(ErrorCode::ConfigInvalid, "fewer nodes than clusters");
  const Matrix x = cfg.center_features ? center_columns(*graph.features()) : *graph.features();
  const ObjectiveOptions opt = cfg.objective();
  const StructureParams sp{cfg.gamma, cfg.xi, cfg.eta, cfg.rho};

  std::mt19937_64 rng(cfg.seed);
  TrainResult res;
  Graph live = add_self_loops(graph, cfg.self_loop);
  ModelParams params;
  params.w = init_projection(x.cols(), cfg.embed_dim, rng);
  params.mu_raw = 0.0;

  {
    const NormalizedOperators ops = normalize(live);
    const Matrix z0 = encode(ops, opt.filter(params.mu_raw), x, params.w, opt.normalize_rows);
    const KMeansResult km = kmeans(z0, cfg.clusters, rng(), cfg.kmeans_max_iter, cfg.kmeans_tol);
    params.centers = km.centers;
    res.initial_labels = km.labels;
  }

  AdamState adam = AdamState::for_params(params);
  Matrix p;
  for (int it = 0; it < cfg.iterations; ++it) {
    const NormalizedOperators ops = normalize(live);
    const ForwardPass f = forward(ops, x, params, opt);
    if (it % cfg.p_interval == 0) p = target_distribution(f.q);
    const Labels c = hard_labels(f.q);

    TraceRow row;
    row.iteration = it;
    row.mu = opt.filter(params.mu_raw).mu();
    Graph target = live;
    const bool rewire = !cfg.ablate_v3 && it >= cfg.warmup && (it - cfg.warmup) % cfg.structure_interval == 0;
    if (rewire) {
      StructureStep step = learn_structure(f.z, f.q, c, live, sp);
      for (const NodePair& pr : step.edits.removed) res.edits.push_back({it, true, pr.i, pr.j, live.weight(pr.i, pr.j)});
      for (std::size_t r = 0; r < step.edits.recovered.size(); ++r)
        res.edits.push_back({it, false, step.edits.recovered[r].i, step.edits.recovered[r].j,
                             step.updated.recovered_weights[r]});
      row.recovered = step.updated.recovered;
      row.removed = step.updated.removed;
      target = std::move(step.updated.graph);
    }
    const Losses l = total_loss(f.z, p, f.q, target, opt.sum_form);
    row.l_c = l.clustering;
    row.l_g = l.reconstruction;
    row.l_o = l.total;
    row.homophily = target.edge_count() > 0 ? edge_homophily(target, c) : std::numeric_limits<double>::quiet_NaN();
    res.trace.push_back(row);
    if (!std::isfinite(l.total) || l.total > cfg.divergence_limit) {
      res.diverged = true;
      break;
    }

    const Gradients g = gradients(ops, x, params, p, target, opt, f);
    AdamUpdate up = adam_step(std::move(params), g, std::move(adam), cfg.learning_rate);
    params = std::move(up.params);
    adam = std::move(up.state);
    live = std::move(target);
  }

  const NormalizedOperators ops = normalize(live);
  res.z = encode(ops, opt.filter(params.mu_raw), x, params.w, opt.normalize_rows);
  res.q = soft_assign(res.z, params.centers);
  res.p = target_distribution(res.q);
  res.argmax_labels = hard_labels(res.q);
  if (cfg.iterations == 0) {
    res.labels = res.initial_labels;
  } else {
    res.labels = lloyd(res.z, params.centers, cfg.kmeans_max_iter, cfg.kmeans_tol).labels;
  }
  std::size_t agree = 0;
  for (std::size_t i = 0; i < res.labels.size(); ++i) agree += res.labels[i] == res.argmax_labels[i] ? 1 : 0;
  res.label_agreement = res.labels.empty() ? 1.0 : static_cast<double>(agree) / static_cast<double>(res.labels.size());
  res.params = std::move(params);
  res.graph = std::move(live);
  return res;
}

}  // namespace adagraph
