#pragma once

#include <adagraph/error.hpp>
#include <adagraph/types.hpp>

#include <algorithm>
#include <cmath>

namespace adagraph {

/// Floor applied to q inside the KL log, against underflow only.
inline constexpr double kLogFloor = 1e-12;

/// Student-t (one degree of freedom) kernel (1 + ||z_i - mu_k||^2)^-1, unnormalized.
inline Matrix student_kernel(const Matrix& z, const Matrix& centers) {
  if (z.cols() != centers.cols()) throw Error(ErrorCode::SizeMismatch, "embedding and center widths differ");
  Matrix u(z.rows(), centers.rows());
  for (Index i = 0; i < z.rows(); ++i)
    for (Index k = 0; k < centers.rows(); ++k) u(i, k) = 1.0 / (1.0 + (z.row(i) - centers.row(k)).squaredNorm());
  return u;
}

inline Matrix soft_assign(const Matrix& z, const Matrix& centers) {
  Matrix q = student_kernel(z, centers);
  for (Index i = 0; i < q.rows(); ++i) q.row(i) /= q.row(i).sum();
  return q;
}

/// Sharpened targets p_ik proportional to q_ik^2 / f_k with f_k = sum_j q_jk.
/// Written as q_ik scaled by g_ik / (sum_j q_ij g_ij), g_ik = q_ik / f_k, which
/// equals the normalized form on rows of q that sum to one.
inline Matrix target_distribution(const Matrix& q) {
  const Vector f = q.colwise().sum().transpose();
  Matrix p(q.rows(), q.cols());
  Vector g(q.cols());
  for (Index i = 0; i < q.rows(); ++i) {
    double weighted = 0.0;
    double mass = 0.0;
    for (Index k = 0; k < q.cols(); ++k) {
      g[k] = q(i, k) / f[k];
      weighted += q(i, k) * g[k];
      mass += q(i, k);
    }
    const double mean_g = weighted / mass;
    for (Index k = 0; k < q.cols(); ++k) p(i, k) = q(i, k) * (g[k] / mean_g);
  }
  return p;
}

/// KL(P || Q) summed over nodes; zero-probability targets contribute nothing.
/// Each term is taken as p log(p/q) - p + q, which is nonnegative and sums to
/// the same value when rows of P and Q each sum to one.
inline double kl_loss(const Matrix& p, const Matrix& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) throw Error(ErrorCode::SizeMismatch, "p and q shapes differ");
  double loss = 0.0;
  for (Index i = 0; i < p.rows(); ++i)
    for (Index k = 0; k < p.cols(); ++k) {
      const double pk = p(i, k);
      const double qk = std::max(q(i, k), kLogFloor);
      const double term = pk > 0.0 ? pk * std::log(pk / qk) - pk + qk : qk;
      loss += std::max(term, 0.0);
    }
  return loss;
}

/// Row argmax with ties to the smallest column.
inline Labels hard_labels(const Matrix& q) {
  Labels c(static_cast<std::size_t>(q.rows()));
  for (Index i = 0; i < q.rows(); ++i) {
    Index best = 0;
    for (Index k = 1; k < q.cols(); ++k)
      if (q(i, k) > q(i, best)) best = k;
    c[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return c;
}

}  // namespace adagraph
