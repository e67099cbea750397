#pragma once

#include <adagraph/error.hpp>
#include <adagraph/graph.hpp>
#include <adagraph/types.hpp>

#include <cmath>
#include <optional>
#include <random>

namespace adagraph {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Adaptive low/high-pass mix. mu = logistic(mu_raw) keeps the mix strictly
/// inside (0, 1); `fixed_mu` pins it (and disables its gradient).
struct FilterParams {
  double mu_raw = 0.0;
  int k = 1;
  int t_layers = 5;
  std::optional<double> fixed_mu;

  double mu() const { return fixed_mu ? *fixed_mu : logistic(mu_raw); }

  void validate() const {
    if (k < 1) throw Error(ErrorCode::ConfigInvalid, "filter order k must be >= 1");
    if (t_layers < 1) throw Error(ErrorCode::ConfigInvalid, "t_layers must be >= 1");
  }
};

namespace detail {

inline Matrix power_apply(const SparseMatrix& op, int k, Matrix m) {
  for (int i = 0; i < k; ++i) m = op * m;
  return m;
}

}  // namespace detail

/// Low-pass part A_rw^k M.
inline Matrix low_pass(const NormalizedOperators& ops, int k, const Matrix& m) { return detail::power_apply(ops.a_rw, k, m); }

/// High-pass part (I - A_rw)^k M.
inline Matrix high_pass(const NormalizedOperators& ops, int k, const Matrix& m) { return detail::power_apply(ops.l_rw, k, m); }

/// mu A_rw^k M + (1 - mu)(I - A_rw)^k M via sparse products only.
inline Matrix apply_adaptive_filter(const NormalizedOperators& ops, const FilterParams& fp, const Matrix& m) {
  if (m.rows() != ops.n()) throw Error(ErrorCode::SizeMismatch, "signal rows differ from node count");
  const double mu = fp.mu();
  return mu * low_pass(ops, fp.k, m) + (1.0 - mu) * high_pass(ops, fp.k, m);
}

/// t_layers successive applications of the adaptive filter.
inline Matrix apply_filter_stack(const NormalizedOperators& ops, const FilterParams& fp, Matrix x) {
  fp.validate();
  for (int layer = 0; layer < fp.t_layers; ++layer) x = apply_adaptive_filter(ops, fp, x);
  return x;
}

/// Scales every nonzero row to unit L2 norm; zero rows stay zero.
inline Matrix normalize_rows(Matrix z) {
  for (Index i = 0; i < z.rows(); ++i) {
    const double norm = z.row(i).norm();
    if (norm > 0.0) z.row(i) /= norm;
  }
  return z;
}

/// Z = F^t X W, optionally row-normalized.
inline Matrix encode(const NormalizedOperators& ops, const FilterParams& fp, const Matrix& x, const Matrix& w,
                     bool row_normalize) {
  if (x.cols() != w.rows()) throw Error(ErrorCode::SizeMismatch, "W rows differ from feature width");
  Matrix z = apply_filter_stack(ops, fp, x * w);
  return row_normalize ? normalize_rows(std::move(z)) : z;
}

/// Symmetric-uniform init with bound sqrt(6 / (fan_in + fan_out)).
inline Matrix init_projection(Index fan_in, Index fan_out, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix w(fan_in, fan_out);
  for (Index c = 0; c < fan_out; ++c)
    for (Index r = 0; r < fan_in; ++r) w(r, c) = dist(rng);
  return w;
}

}  // namespace adagraph
