#pragma once

#include <adagraph/objective.hpp>
#include <adagraph/types.hpp>

#include <cmath>

namespace adagraph {

/// Moment accumulators for every parameter group.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  Matrix m_w, v_w;
  double m_mu = 0.0, v_mu = 0.0;
  Matrix m_centers, v_centers;

  static AdamState for_params(const ModelParams& p) {
    AdamState s;
    s.m_w = s.v_w = Matrix::Zero(p.w.rows(), p.w.cols());
    s.m_centers = s.v_centers = Matrix::Zero(p.centers.rows(), p.centers.cols());
    return s;
  }
};

struct AdamUpdate {
  ModelParams params;
  AdamState state;
};

namespace detail {

inline void adam_apply(Matrix& theta, const Matrix& g, Matrix& m, Matrix& v, const AdamState& s, double lr,
                       double c1, double c2) {
  m = s.beta1 * m + (1.0 - s.beta1) * g;
  v = s.beta2 * v + (1.0 - s.beta2) * g.cwiseProduct(g);
  theta.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + s.eps);
}

}  // namespace detail

/// Bias-corrected Adam step over (W, mu_raw, centers).
inline AdamUpdate adam_step(ModelParams params, const Gradients& g, AdamState state, double lr) {
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  detail::adam_apply(params.w, g.w, state.m_w, state.v_w, state, lr, c1, c2);
  detail::adam_apply(params.centers, g.centers, state.m_centers, state.v_centers, state, lr, c1, c2);
  state.m_mu = state.beta1 * state.m_mu + (1.0 - state.beta1) * g.mu_raw;
  state.v_mu = state.beta2 * state.v_mu + (1.0 - state.beta2) * g.mu_raw * g.mu_raw;
  params.mu_raw -= lr * (state.m_mu / c1) / (std::sqrt(state.v_mu / c2) + state.eps);
  return {std::move(params), std::move(state)};
}

}  // namespace adagraph
