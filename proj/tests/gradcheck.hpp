#pragma once

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace testsupport {

struct GradInstance {
  adagraph::Graph graph;
  adagraph::NormalizedOperators ops;
  adagraph::Matrix x;
  adagraph::ModelParams params;
  adagraph::Matrix p;
  adagraph::ObjectiveOptions opt;
};

/// Random small objective: N <= 12 nodes, d <= 4 embedding width, K <= 3 centers.
inline GradInstance random_grad_instance(std::uint64_t seed, bool normalize, int t, int k, bool sum_form = false) {
  std::mt19937_64 rng(seed);
  const int n = 6 + static_cast<int>(rng() % 7);
  const int feat = 2 + static_cast<int>(rng() % 3);
  const int d = 2 + static_cast<int>(rng() % 3);
  const int kc = 2 + static_cast<int>(rng() % 2);
  GradInstance g;
  g.graph = adagraph::add_self_loops(random_connected_graph(n, 0.3, rng));
  g.ops = adagraph::normalize(g.graph);
  g.x = random_matrix(n, feat, rng);
  g.params.w = random_matrix(feat, d, rng, 0.7);
  g.params.mu_raw = std::uniform_real_distribution<double>(-1.5, 1.5)(rng);
  g.params.centers = random_matrix(kc, d, rng, normalize ? 0.6 : 1.0);
  g.opt.k = k;
  g.opt.t_layers = t;
  g.opt.normalize_rows = normalize;
  g.opt.sum_form = sum_form;
  // Target from an unrelated assignment so the KL term is not stationary.
  g.p = adagraph::target_distribution(adagraph::soft_assign(random_matrix(n, d, rng), g.params.centers));
  return g;
}

struct GradCheckReport {
  double worst = 0.0;
  std::string where;
  int coordinates = 0;
};

/// Central differences with step h against the analytic gradient of L_O.
inline GradCheckReport check_gradients(const GradInstance& g, double h = 1e-5, double floor = 1e-6) {
  using adagraph::Index;
  const adagraph::Gradients an = adagraph::gradients(g.ops, g.x, g.params, g.p, g.graph, g.opt);
  GradCheckReport rep;
  auto loss = [&](const adagraph::ModelParams& mp) {
    return adagraph::evaluate_loss(g.ops, g.x, mp, g.p, g.graph, g.opt).total;
  };
  auto compare = [&](double analytic, double numeric, const std::string& where) {
    const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
    ++rep.coordinates;
    if (rel > rep.worst) {
      rep.worst = rel;
      rep.where = where + " analytic=" + std::to_string(analytic) + " numeric=" + std::to_string(numeric);
    }
  };
  for (Index r = 0; r < g.params.w.rows(); ++r)
    for (Index c = 0; c < g.params.w.cols(); ++c) {
      adagraph::ModelParams plus = g.params, minus = g.params;
      plus.w(r, c) += h;
      minus.w(r, c) -= h;
      compare(an.w(r, c), (loss(plus) - loss(minus)) / (2 * h), "w(" + std::to_string(r) + "," + std::to_string(c) + ")");
    }
  for (Index r = 0; r < g.params.centers.rows(); ++r)
    for (Index c = 0; c < g.params.centers.cols(); ++c) {
      adagraph::ModelParams plus = g.params, minus = g.params;
      plus.centers(r, c) += h;
      minus.centers(r, c) -= h;
      compare(an.centers(r, c), (loss(plus) - loss(minus)) / (2 * h),
              "centers(" + std::to_string(r) + "," + std::to_string(c) + ")");
    }
  {
    adagraph::ModelParams plus = g.params, minus = g.params;
    plus.mu_raw += h;
    minus.mu_raw -= h;
    compare(an.mu_raw, (loss(plus) - loss(minus)) / (2 * h), "mu_raw");
  }
  return rep;
}

}  // namespace testsupport
