#pragma once

#include <adagraph/error.hpp>
#include <adagraph/filter.hpp>
#include <adagraph/graph.hpp>
#include <adagraph/selftrain.hpp>
#include <adagraph/structure.hpp>
#include <adagraph/types.hpp>

#include <cmath>
#include <optional>
#include <vector>

namespace adagraph {

/// The trainable set: projection W, filter-mix logit, cluster centers.
struct ModelParams {
  Matrix w;
  double mu_raw = 0.0;
  Matrix centers;
};

struct ObjectiveOptions {
  int k = 1;
  int t_layers = 5;
  std::optional<double> fixed_mu;
  bool normalize_rows = true;
  bool sum_form = false;

  FilterParams filter(double mu_raw) const { return {mu_raw, k, t_layers, fixed_mu}; }
};

struct Losses {
  double clustering = 0.0;      // KL(P || Q)
  double reconstruction = 0.0;  // ||Z Z^T - A||_F^2, mean or sum form
  double total = 0.0;
};

struct Gradients {
  Matrix w;
  double mu_raw = 0.0;
  Matrix centers;
};

/// Intermediate values of one encoder evaluation.
struct ForwardPass {
  std::vector<Matrix> layers;  // layers[m] = F^m X W, m = 0..t
  Matrix z;
  Matrix kernel;               // (1 + ||z_i - mu_k||^2)^-1
  Matrix q;

  const Matrix& pre_norm() const { return layers.back(); }
};

inline ForwardPass forward(const NormalizedOperators& ops, const Matrix& x, const ModelParams& params,
                           const ObjectiveOptions& opt) {
  const FilterParams fp = opt.filter(params.mu_raw);
  fp.validate();
  if (x.cols() != params.w.rows()) throw Error(ErrorCode::SizeMismatch, "W rows differ from feature width");
  ForwardPass f;
  f.layers.reserve(static_cast<std::size_t>(opt.t_layers) + 1);
  f.layers.push_back(x * params.w);
  for (int m = 0; m < opt.t_layers; ++m) f.layers.push_back(apply_adaptive_filter(ops, fp, f.layers.back()));
  f.z = opt.normalize_rows ? normalize_rows(f.layers.back()) : f.layers.back();
  f.kernel = student_kernel(f.z, params.centers);
  f.q = f.kernel;
  for (Index i = 0; i < f.q.rows(); ++i) f.q.row(i) /= f.q.row(i).sum();
  return f;
}

/// L_O = KL(P || Q) + reconstruction error of the target adjacency.
inline Losses total_loss(const Matrix& z, const Matrix& p, const Matrix& q, const Graph& target, bool sum_form = false) {
  Losses l;
  l.clustering = kl_loss(p, q);
  l.reconstruction = reconstruction_loss(z, target, sum_form);
  l.total = l.clustering + l.reconstruction;
  return l;
}

namespace detail {

/// F^T M where F = mu A^k + (1 - mu)(I - A)^k.
inline Matrix adjoint_filter(const NormalizedOperators& ops, const FilterParams& fp, const Matrix& m) {
  Matrix low = m;
  Matrix high = m;
  for (int i = 0; i < fp.k; ++i) {
    low = ops.a_rw.transpose() * low;
    high = ops.l_rw.transpose() * high;
  }
  const double mu = fp.mu();
  return mu * low + (1.0 - mu) * high;
}

/// dF/dmu applied to M: A^k M - (I - A)^k M.
inline Matrix filter_mu_derivative(const NormalizedOperators& ops, int k, const Matrix& m) {
  return low_pass(ops, k, m) - high_pass(ops, k, m);
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace detail

/// Exact gradients of L_O with P and the target adjacency held constant.
///
/// Backward pass: G_Z collects the KL and reconstruction terms, row
/// normalization is differentiated row by row, then the adjoint filter
/// H_{j+1} = F^T H_j carries G_Y back through the t layers. With
/// B_m = F^m X W, dL/dmu = sum_j <H_j, (dF/dmu) B_{t-1-j}> and dL/dW = X^T H_t.
inline Gradients gradients(const NormalizedOperators& ops, const Matrix& x, const ModelParams& params, const Matrix& p,
                           const Graph& target, const ObjectiveOptions& opt, const ForwardPass& f) {
  const Index n = f.z.rows();
  const Index kc = params.centers.rows();
  if (p.rows() != n || p.cols() != kc) throw Error(ErrorCode::SizeMismatch, "target distribution shape mismatch");

  Gradients g;
  Matrix gz = Matrix::Zero(n, f.z.cols());
  g.centers = Matrix::Zero(kc, params.centers.cols());
  for (Index i = 0; i < n; ++i) {
    const double p_row = p.row(i).sum();
    for (Index k = 0; k < kc; ++k) {
      const double coeff = 2.0 * f.kernel(i, k) * (p(i, k) - p_row * f.q(i, k));
      const Eigen::RowVectorXd diff = f.z.row(i) - params.centers.row(k);
      gz.row(i) += coeff * diff;
      g.centers.row(k) -= coeff * diff;
    }
  }

  const double scale = opt.sum_form ? 1.0 : 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  // d/dZ ||Z Z^T - A||^2 = 4 (Z Z^T - A) Z for symmetric A.
  gz += 4.0 * scale * (f.z * (f.z.transpose() * f.z) - target.sparse() * f.z);

  Matrix gy = gz;
  if (opt.normalize_rows) {
    const Matrix& y = f.pre_norm();
    for (Index i = 0; i < n; ++i) {
      const double norm = y.row(i).norm();
      if (norm > 0.0)
        gy.row(i) = (gz.row(i) - f.z.row(i).dot(gz.row(i)) * f.z.row(i)) / norm;
      else
        gy.row(i).setZero();
    }
  }

  const FilterParams fp = opt.filter(params.mu_raw);
  const int t = opt.t_layers;
  double dmu = 0.0;
  Matrix h = gy;
  for (int j = 0; j < t; ++j) {
    dmu += h.cwiseProduct(detail::filter_mu_derivative(ops, opt.k, f.layers[static_cast<std::size_t>(t - 1 - j)])).sum();
    h = detail::adjoint_filter(ops, fp, h);
  }
  g.w = x.transpose() * h;
  if (opt.fixed_mu) {
    g.mu_raw = 0.0;
  } else {
    const double mu = fp.mu();
    g.mu_raw = dmu * mu * (1.0 - mu);
  }

  if (!detail::all_finite(g.w) || !detail::all_finite(g.centers) || !std::isfinite(g.mu_raw))
    throw Error(ErrorCode::NonFiniteGradient, "gradient contains NaN or Inf");
  return g;
}

inline Gradients gradients(const NormalizedOperators& ops, const Matrix& x, const ModelParams& params, const Matrix& p,
                           const Graph& target, const ObjectiveOptions& opt) {
  return gradients(ops, x, params, p, target, opt, forward(ops, x, params, opt));
}

/// L_O at `params` with P held fixed; convenience for finite differences.
inline Losses evaluate_loss(const NormalizedOperators& ops, const Matrix& x, const ModelParams& params, const Matrix& p,
                            const Graph& target, const ObjectiveOptions& opt) {
  const ForwardPass f = forward(ops, x, params, opt);
  return total_loss(f.z, p, f.q, target, opt.sum_form);
}

}  // namespace adagraph
