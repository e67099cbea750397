#pragma once

#include <adagraph/error.hpp>
#include <adagraph/graph.hpp>
#include <adagraph/hsi.hpp>
#include <adagraph/types.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace adagraph {

/// Partition of the pixel grid into 4-connected regions with ids in [0, count).
struct SuperpixelSegmentation {
  int height = 0;
  int width = 0;
  std::vector<int> assignment;  // row-major, one id per pixel
  int count = 0;
  std::vector<int> sizes;

  int at(int r, int c) const { return assignment[static_cast<std::size_t>(r) * width + c]; }
};

namespace detail {

inline void recount(SuperpixelSegmentation& seg) {
  seg.sizes.assign(static_cast<std::size_t>(seg.count), 0);
  for (int id : seg.assignment) ++seg.sizes[static_cast<std::size_t>(id)];
}

/// Relabels ids to 0..count-1 in order of first raster appearance.
inline void compact_ids(SuperpixelSegmentation& seg) {
  std::map<int, int> remap;
  for (int& id : seg.assignment) {
    auto [it, inserted] = remap.try_emplace(id, static_cast<int>(remap.size()));
    id = it->second;
  }
  seg.count = static_cast<int>(remap.size());
  recount(seg);
}

/// Splits every id into its 4-connected components. Returns the component id
/// per pixel and the pixel count of every component.
inline std::pair<std::vector<int>, std::vector<int>> connected_components(const SuperpixelSegmentation& seg) {
  const int h = seg.height;
  const int w = seg.width;
  std::vector<int> comp(seg.assignment.size(), -1);
  std::vector<int> comp_size;
  std::deque<int> queue;
  for (int start = 0; start < h * w; ++start) {
    if (comp[static_cast<std::size_t>(start)] >= 0) continue;
    const int id = static_cast<int>(comp_size.size());
    const int label = seg.assignment[static_cast<std::size_t>(start)];
    comp_size.push_back(0);
    comp[static_cast<std::size_t>(start)] = id;
    queue.push_back(start);
    while (!queue.empty()) {
      const int p = queue.front();
      queue.pop_front();
      ++comp_size.back();
      const int r = p / w;
      const int c = p % w;
      const int nbr[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
      for (const auto& rc : nbr) {
        if (rc[0] < 0 || rc[0] >= h || rc[1] < 0 || rc[1] >= w) continue;
        const int q = rc[0] * w + rc[1];
        if (comp[static_cast<std::size_t>(q)] < 0 && seg.assignment[static_cast<std::size_t>(q)] == label) {
          comp[static_cast<std::size_t>(q)] = id;
          queue.push_back(q);
        }
      }
    }
  }
  return {std::move(comp), std::move(comp_size)};
}

/// Keeps the largest component of every id and folds each remaining (orphan)
/// component into the largest bordering region.
inline void enforce_connectivity(SuperpixelSegmentation& seg) {
  const int w = seg.width;
  const auto [comp, comp_size] = connected_components(seg);
  const std::size_t ncomp = comp_size.size();

  std::vector<int> comp_label(ncomp);
  for (std::size_t p = 0; p < comp.size(); ++p) comp_label[static_cast<std::size_t>(comp[p])] = seg.assignment[p];

  std::map<int, int> best;  // label -> retained component
  for (std::size_t k = 0; k < ncomp; ++k) {
    auto [it, inserted] = best.try_emplace(comp_label[k], static_cast<int>(k));
    if (!inserted && comp_size[k] > comp_size[static_cast<std::size_t>(it->second)]) it->second = static_cast<int>(k);
  }
  std::vector<int> owner(ncomp, -1);  // final label of each component, -1 = unresolved orphan
  std::map<int, int> region_size;
  for (const auto& [label, k] : best) {
    owner[static_cast<std::size_t>(k)] = label;
    region_size[label] = comp_size[static_cast<std::size_t>(k)];
  }
  if (best.size() == ncomp) return;

  std::vector<std::set<int>> comp_nbrs(ncomp);
  for (std::size_t p = 0; p < comp.size(); ++p) {
    const int r = static_cast<int>(p) / w;
    const int c = static_cast<int>(p) % w;
    if (c + 1 < w && comp[p + 1] != comp[p]) {
      comp_nbrs[static_cast<std::size_t>(comp[p])].insert(comp[p + 1]);
      comp_nbrs[static_cast<std::size_t>(comp[p + 1])].insert(comp[p]);
    }
    if (r + 1 < seg.height && comp[p + static_cast<std::size_t>(w)] != comp[p]) {
      comp_nbrs[static_cast<std::size_t>(comp[p])].insert(comp[p + static_cast<std::size_t>(w)]);
      comp_nbrs[static_cast<std::size_t>(comp[p + static_cast<std::size_t>(w)])].insert(comp[p]);
    }
  }

  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t k = 0; k < ncomp; ++k) {
      if (owner[k] >= 0) continue;
      int target = -1;
      for (int nb : comp_nbrs[k]) {
        const int label = owner[static_cast<std::size_t>(nb)];
        if (label < 0) continue;
        if (target < 0 || region_size[label] > region_size[target] ||
            (region_size[label] == region_size[target] && label < target))
          target = label;
      }
      if (target < 0) continue;
      owner[k] = target;
      region_size[target] += comp_size[k];
      progress = true;
    }
  }
  for (std::size_t p = 0; p < comp.size(); ++p) seg.assignment[p] = owner[static_cast<std::size_t>(comp[p])];
}

}  // namespace detail

/// Every pixel is its own region. Guarded by a node ceiling since downstream
/// stages scale with the node count.
inline SuperpixelSegmentation identity_segmentation(int height, int width, int max_nodes) {
  if (static_cast<long long>(height) * width > max_nodes)
    throw Error(ErrorCode::TooManySuperpixels, "per-pixel graph of " + std::to_string(height * width) +
                                                   " nodes exceeds ceiling " + std::to_string(max_nodes));
  SuperpixelSegmentation seg{height, width, std::vector<int>(static_cast<std::size_t>(height) * width), height * width, {}};
  for (int p = 0; p < height * width; ++p) seg.assignment[static_cast<std::size_t>(p)] = p;
  detail::recount(seg);
  return seg;
}

/// SLIC over all bands of `cube`: distance sqrt(d_color^2 + (d_xy / S)^2 m^2),
/// S = sqrt(hw / n_target), seeds on a regular grid, each center scanning a
/// window of one grid step around itself. Ties go to the lower center index.
/// The reported count may differ from n_target after connectivity repair.
inline SuperpixelSegmentation slic_segment(const HsiCube& cube, int n_target, double compactness, int iters) {
  const int h = cube.height;
  const int w = cube.width;
  const int hw = h * w;
  if (n_target > hw)
    throw Error(ErrorCode::TooManySuperpixels,
                std::to_string(n_target) + " superpixels requested for " + std::to_string(hw) + " pixels");
  if (n_target < 1) throw Error(ErrorCode::ConfigInvalid, "n_target must be >= 1");
  if (iters < 1) throw Error(ErrorCode::ConfigInvalid, "slic iterations must be >= 1");
  if (compactness < 0.0) throw Error(ErrorCode::ConfigInvalid, "compactness must be >= 0");

  const double s = std::sqrt(static_cast<double>(hw) / n_target);
  const int ny = std::clamp(static_cast<int>(std::lround(h / s)), 1, h);
  const int nx = std::clamp(static_cast<int>(std::lround(w / s)), 1, w);
  const double step_y = static_cast<double>(h) / ny;
  const double step_x = static_cast<double>(w) / nx;
  const int nb = cube.bands;
  const int k_centers = ny * nx;
  const double spatial_weight = (compactness / s) * (compactness / s);

  // Center layout: [y, x, band...].
  const int stride = 2 + nb;
  std::vector<double> centers(static_cast<std::size_t>(k_centers) * stride, 0.0);
  SuperpixelSegmentation seg{h, w, std::vector<int>(static_cast<std::size_t>(hw)), k_centers, {}};
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const int iy = std::min(ny - 1, static_cast<int>(r / step_y));
      const int ix = std::min(nx - 1, static_cast<int>(c / step_x));
      seg.assignment[static_cast<std::size_t>(r) * w + c] = iy * nx + ix;
    }
  auto update_centers = [&] {
    std::vector<double> sum(centers.size(), 0.0);
    std::vector<int> count(static_cast<std::size_t>(k_centers), 0);
    for (int p = 0; p < hw; ++p) {
      const int k = seg.assignment[static_cast<std::size_t>(p)];
      double* acc = &sum[static_cast<std::size_t>(k) * stride];
      acc[0] += p / w;
      acc[1] += p % w;
      for (int b = 0; b < nb; ++b) acc[2 + b] += cube.at(static_cast<std::size_t>(p), b);
      ++count[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < k_centers; ++k) {
      if (count[static_cast<std::size_t>(k)] == 0) continue;
      for (int f = 0; f < stride; ++f)
        centers[static_cast<std::size_t>(k) * stride + f] =
            sum[static_cast<std::size_t>(k) * stride + f] / count[static_cast<std::size_t>(k)];
    }
  };
  // Grid-cell means give the seed positions (iy + 1/2) step - 1/2 and seed colors.
  update_centers();

  std::vector<double> best(static_cast<std::size_t>(hw));
  for (int it = 0; it < iters; ++it) {
    std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
    std::vector<int> next = seg.assignment;
    for (int k = 0; k < k_centers; ++k) {
      const double* ctr = &centers[static_cast<std::size_t>(k) * stride];
      const int r0 = std::max(0, static_cast<int>(std::floor(ctr[0] - step_y)));
      const int r1 = std::min(h - 1, static_cast<int>(std::ceil(ctr[0] + step_y)));
      const int c0 = std::max(0, static_cast<int>(std::floor(ctr[1] - step_x)));
      const int c1 = std::min(w - 1, static_cast<int>(std::ceil(ctr[1] + step_x)));
      for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c) {
          const auto p = static_cast<std::size_t>(r) * w + c;
          double dc = 0.0;
          for (int b = 0; b < nb; ++b) {
            const double diff = cube.at(p, b) - ctr[2 + b];
            dc += diff * diff;
          }
          const double dy = r - ctr[0];
          const double dx = c - ctr[1];
          const double d = dc + (dy * dy + dx * dx) * spatial_weight;
          if (d < best[p] || (d == best[p] && k < next[p])) {
            best[p] = d;
            next[p] = k;
          }
        }
    }
    seg.assignment = std::move(next);
    update_centers();
  }

  detail::enforce_connectivity(seg);
  detail::compact_ids(seg);
  return seg;
}

/// Pixel-to-superpixel indicator matrix, kept implicit as the assignment grid.
struct AssignmentMatrix {
  std::vector<int> assignment;  // row i of Q has its single 1 in column assignment[i]
  std::vector<int> column_counts;

  Index pixels() const { return static_cast<Index>(assignment.size()); }
  Index nodes() const { return static_cast<Index>(column_counts.size()); }

  SparseMatrix q() const {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(assignment.size());
    for (std::size_t i = 0; i < assignment.size(); ++i) t.emplace_back(static_cast<Index>(i), assignment[i], 1.0);
    SparseMatrix m(pixels(), nodes());
    m.setFromTriplets(t.begin(), t.end());
    return m;
  }

  /// Column-normalized Q.
  SparseMatrix q_hat() const {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(assignment.size());
    for (std::size_t i = 0; i < assignment.size(); ++i)
      t.emplace_back(static_cast<Index>(i), assignment[i],
                     1.0 / column_counts[static_cast<std::size_t>(assignment[i])]);
    SparseMatrix m(pixels(), nodes());
    m.setFromTriplets(t.begin(), t.end());
    return m;
  }
};

inline AssignmentMatrix build_assignment(const SuperpixelSegmentation& seg) {
  AssignmentMatrix qm{seg.assignment, std::vector<int>(static_cast<std::size_t>(seg.count), 0)};
  for (int id : seg.assignment) ++qm.column_counts[static_cast<std::size_t>(id)];
  return qm;
}

/// Node features as the mean spectrum of member pixels, accumulated in pixel order.
inline Matrix project_to_nodes(const HsiCube& cube, const AssignmentMatrix& qm) {
  if (static_cast<Index>(cube.pixels()) != qm.pixels())
    throw Error(ErrorCode::SizeMismatch, "cube and assignment disagree on pixel count");
  Matrix x = Matrix::Zero(qm.nodes(), cube.bands);
  for (int b = 0; b < cube.bands; ++b)
    for (std::size_t p = 0; p < cube.pixels(); ++p) x(qm.assignment[p], b) += cube.at(p, b);
  for (Index j = 0; j < qm.nodes(); ++j) x.row(j) /= static_cast<double>(qm.column_counts[static_cast<std::size_t>(j)]);
  return x;
}

/// Superpixel pairs sharing at least one 4-neighbour pixel border.
inline std::vector<std::set<int>> region_adjacency(const SuperpixelSegmentation& seg) {
  std::vector<std::set<int>> nbrs(static_cast<std::size_t>(seg.count));
  for (int r = 0; r < seg.height; ++r)
    for (int c = 0; c < seg.width; ++c) {
      const int a = seg.at(r, c);
      if (c + 1 < seg.width) {
        const int b = seg.at(r, c + 1);
        if (a != b) {
          nbrs[static_cast<std::size_t>(a)].insert(b);
          nbrs[static_cast<std::size_t>(b)].insert(a);
        }
      }
      if (r + 1 < seg.height) {
        const int b = seg.at(r + 1, c);
        if (a != b) {
          nbrs[static_cast<std::size_t>(a)].insert(b);
          nbrs[static_cast<std::size_t>(b)].insert(a);
        }
      }
    }
  return nbrs;
}

/// Gaussian kernel exp(-rho ||x_i - x_j||^2), floored at the smallest normal
/// double so a neighbour pair never silently vanishes.
inline double gaussian_affinity(const Matrix& x, Index i, Index j, double rho) {
  const double d2 = (x.row(i) - x.row(j)).squaredNorm();
  return std::max(std::exp(-rho * d2), std::numeric_limits<double>::min());
}

/// Initial superpixel graph: Gaussian affinities between regions within
/// `t_hop` hops in the region-adjacency graph, zero elsewhere. No self-loops.
inline Graph build_adjacency(const Matrix& x, const SuperpixelSegmentation& seg, int t_hop, double rho) {
  if (t_hop < 1) throw Error(ErrorCode::ConfigInvalid, "t_hop must be >= 1");
  if (!(rho > 0.0)) throw Error(ErrorCode::ConfigInvalid, "rho must be > 0");
  if (x.rows() != seg.count) throw Error(ErrorCode::SizeMismatch, "feature rows differ from superpixel count");
  const auto rag = region_adjacency(seg);
  std::vector<Edge> edges;
  std::vector<int> depth(static_cast<std::size_t>(seg.count), -1);
  std::vector<int> touched;
  for (int src = 0; src < seg.count; ++src) {
    std::deque<int> queue{src};
    depth[static_cast<std::size_t>(src)] = 0;
    touched.assign(1, src);
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      if (depth[static_cast<std::size_t>(u)] == t_hop) continue;
      for (int v : rag[static_cast<std::size_t>(u)]) {
        if (depth[static_cast<std::size_t>(v)] >= 0) continue;
        depth[static_cast<std::size_t>(v)] = depth[static_cast<std::size_t>(u)] + 1;
        touched.push_back(v);
        queue.push_back(v);
        if (v > src) edges.push_back({src, v, gaussian_affinity(x, src, v, rho)});
      }
    }
    for (int v : touched) depth[static_cast<std::size_t>(v)] = -1;
  }
  return Graph::from_edges(seg.count, std::move(edges)).with_features(x);
}

inline std::vector<int> backproject_labels(std::span<const int> node_labels, const SuperpixelSegmentation& seg) {
  if (node_labels.size() != static_cast<std::size_t>(seg.count))
    throw Error(ErrorCode::SizeMismatch, "one label per superpixel required");
  std::vector<int> map(seg.assignment.size());
  for (std::size_t p = 0; p < map.size(); ++p) map[p] = node_labels[static_cast<std::size_t>(seg.assignment[p])];
  return map;
}

/// Modal labeled class per superpixel; kUnlabeled when no member pixel is
/// labeled; ties go to the smallest class id.
inline std::vector<int> majority_gt_per_node(const GroundTruthMap& gt, const SuperpixelSegmentation& seg) {
  if (gt.height != seg.height || gt.width != seg.width)
    throw Error(ErrorCode::SizeMismatch, "ground truth and segmentation dims differ");
  std::vector<std::map<int, int>> votes(static_cast<std::size_t>(seg.count));
  for (std::size_t p = 0; p < seg.assignment.size(); ++p)
    if (gt.labels[p] != 0) ++votes[static_cast<std::size_t>(seg.assignment[p])][gt.labels[p]];
  std::vector<int> out(static_cast<std::size_t>(seg.count), kUnlabeled);
  for (std::size_t k = 0; k < votes.size(); ++k) {
    int best_count = 0;
    for (const auto& [cls, cnt] : votes[k])
      if (cnt > best_count) {
        best_count = cnt;
        out[k] = cls;
      }
  }
  return out;
}

}  // namespace adagraph
