#pragma once

#include <adagraph/error.hpp>
#include <adagraph/types.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace adagraph {

struct KMeansResult {
  Matrix centers;
  Labels labels;
  double inertia = 0.0;
  int iterations = 0;
  std::vector<double> inertia_history;  // one entry per assignment step
};

namespace detail {

inline std::size_t distinct_rows(const Matrix& pts) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(pts.rows()));
  for (Index i = 0; i < pts.rows(); ++i) rows[static_cast<std::size_t>(i)].assign(pts.row(i).begin(), pts.row(i).end());
  std::sort(rows.begin(), rows.end());
  return static_cast<std::size_t>(std::unique(rows.begin(), rows.end()) - rows.begin());
}

/// Nearest center with ties to the lowest index.
inline std::pair<int, double> nearest(const Matrix& centers, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < centers.rows(); ++k) {
    const double d = (centers.row(k) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(k);
    }
  }
  return {best, best_d};
}

}  // namespace detail

/// D^2-weighted sequential seeding.
inline Matrix kmeanspp_init(const Matrix& pts, int k, std::uint64_t seed) {
  if (k < 1) throw Error(ErrorCode::ConfigInvalid, "K must be >= 1");
  if (static_cast<std::size_t>(k) > detail::distinct_rows(pts))
    throw Error(ErrorCode::TooFewDistinctPoints, "K exceeds the number of distinct points");
  std::mt19937_64 rng(seed);
  const Index n = pts.rows();
  Matrix centers(k, pts.cols());
  std::uniform_int_distribution<Index> pick(0, n - 1);
  centers.row(0) = pts.row(pick(rng));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (pts.row(i) - centers.row(0)).squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    const double target = unit(rng) * total;
    double run = 0.0;
    Index chosen = -1;
    for (Index i = 0; i < n; ++i) {
      if (d2[static_cast<std::size_t>(i)] <= 0.0) continue;
      run += d2[static_cast<std::size_t>(i)];
      chosen = i;
      if (run > target) break;
    }
    centers.row(c) = pts.row(chosen);
    for (Index i = 0; i < n; ++i)
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], (pts.row(i) - centers.row(c)).squaredNorm());
  }
  return centers;
}

/// Lloyd iterations until the largest center shift drops below `tol` or
/// `max_iter` is reached. An empty cluster takes the point farthest from its
/// current center (drawn from clusters with more than one member).
inline KMeansResult lloyd(const Matrix& pts, Matrix centers, int max_iter = 300, double tol = 1e-6) {
  if (max_iter < 1) throw Error(ErrorCode::ConfigInvalid, "max_iter must be >= 1");
  if (tol < 0.0) throw Error(ErrorCode::ConfigInvalid, "tol must be >= 0");
  if (pts.cols() != centers.cols()) throw Error(ErrorCode::SizeMismatch, "point and center widths differ");
  const Index n = pts.rows();
  const Index k = centers.rows();
  KMeansResult res;
  res.labels.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> dist(static_cast<std::size_t>(n));

  auto assign = [&] {
    for (Index i = 0; i < n; ++i) {
      const auto [c, d] = detail::nearest(centers, pts.row(i));
      res.labels[static_cast<std::size_t>(i)] = c;
      dist[static_cast<std::size_t>(i)] = d;
    }
  };

  for (int it = 0; it < max_iter; ++it) {
    assign();
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int l : res.labels) ++counts[static_cast<std::size_t>(l)];
    for (Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Index far = -1;
      for (Index i = 0; i < n; ++i) {
        if (counts[static_cast<std::size_t>(res.labels[static_cast<std::size_t>(i)])] < 2) continue;
        if (far < 0 || dist[static_cast<std::size_t>(i)] > dist[static_cast<std::size_t>(far)]) far = i;
      }
      if (far < 0) break;
      --counts[static_cast<std::size_t>(res.labels[static_cast<std::size_t>(far)])];
      res.labels[static_cast<std::size_t>(far)] = static_cast<int>(c);
      counts[static_cast<std::size_t>(c)] = 1;
      centers.row(c) = pts.row(far);
      dist[static_cast<std::size_t>(far)] = 0.0;
    }
    res.inertia_history.push_back(std::accumulate(dist.begin(), dist.end(), 0.0));
    res.iterations = it + 1;

    Matrix next = Matrix::Zero(k, pts.cols());
    for (Index i = 0; i < n; ++i) next.row(res.labels[static_cast<std::size_t>(i)]) += pts.row(i);
    double shift = 0.0;
    for (Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) {
        next.row(c) = centers.row(c);
        continue;
      }
      next.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
      shift = std::max(shift, (next.row(c) - centers.row(c)).norm());
    }
    centers = std::move(next);
    if (shift < tol) break;
  }
  assign();
  res.inertia = std::accumulate(dist.begin(), dist.end(), 0.0);
  res.inertia_history.push_back(res.inertia);
  res.centers = std::move(centers);
  return res;
}

inline KMeansResult kmeans(const Matrix& pts, int k, std::uint64_t seed, int max_iter = 300, double tol = 1e-6) {
  return lloyd(pts, kmeanspp_init(pts, k, seed), max_iter, tol);
}

}  // namespace adagraph
