#pragma once

#include <adagraph/error.hpp>
#include <adagraph/graph.hpp>
#include <adagraph/types.hpp>

#include <cmath>
#include <span>
#include <string>

namespace adagraph {

/// Largest matrix the dense eigen-oracle accepts by default.
inline constexpr Index kOracleCap = 64;

struct Eigendecomposition {
  Vector values;   // ascending
  Matrix vectors;  // column j pairs with values[j]
};

/// Dense symmetric eigendecomposition used as a reference oracle for the
/// spectral properties of the filter operators. Not meant for large graphs.
inline Eigendecomposition symmetric_eigendecompose(const Matrix& m, Index cap = kOracleCap) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::NotSymmetric, "matrix is not square");
  if (m.rows() > cap)
    throw Error(ErrorCode::DimensionTooLarge,
                "dimension " + std::to_string(m.rows()) + " exceeds oracle cap " + std::to_string(cap));
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10) throw Error(ErrorCode::NotSymmetric, "asymmetry above 1e-10");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NotSymmetric, "eigensolver failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// D^-1/2 A D^-1/2, similar to D^-1 A and therefore sharing its spectrum.
inline Matrix symmetric_normalized_adjacency(const Graph& g) {
  const Vector d = g.degrees();
  for (Index v = 0; v < d.size(); ++v)
    if (!(d[v] > 0.0)) throw Error(ErrorCode::ZeroDegree, "node " + std::to_string(v) + " has zero degree");
  const Vector inv_sqrt = d.cwiseSqrt().cwiseInverse();
  return inv_sqrt.asDiagonal() * g.dense() * inv_sqrt.asDiagonal();
}

/// h(lambda) = mu (1 - lambda)^k + (1 - mu) lambda^k for each Laplacian eigenvalue.
inline Vector filter_spectral_response(double mu, int k, std::span<const double> lambdas) {
  if (k < 1) throw Error(ErrorCode::ConfigInvalid, "filter order k must be >= 1");
  Vector h(static_cast<Index>(lambdas.size()));
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double l = lambdas[i];
    h[static_cast<Index>(i)] = mu * std::pow(1.0 - l, k) + (1.0 - mu) * std::pow(l, k);
  }
  return h;
}

inline Vector filter_spectral_response(double mu, int k, const Vector& lambdas) {
  return filter_spectral_response(mu, k, std::span<const double>(lambdas.data(), static_cast<std::size_t>(lambdas.size())));
}

}  // namespace adagraph
