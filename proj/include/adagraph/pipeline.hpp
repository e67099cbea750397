#pragma once

#include <adagraph/config.hpp>
#include <adagraph/graph.hpp>
#include <adagraph/hsi.hpp>
#include <adagraph/kmeans.hpp>
#include <adagraph/metrics.hpp>
#include <adagraph/superpixel.hpp>
#include <adagraph/train.hpp>

#include <algorithm>
#include <optional>

namespace adagraph {

/// Superpixel graph plus the segmentation it was built from.
struct SuperpixelGraph {
  SuperpixelSegmentation segmentation;
  Graph graph;  // carries node features X, no self-loops
  std::optional<PcaResult> pca;
};

/// Rescale, reduce, segment, project and connect. Node features use the full
/// spectrum; only the segmentation sees the PCA-reduced cube.
inline SuperpixelGraph build_superpixel_graph(const HsiCube& raw, const RunConfig& cfg) {
  const HsiCube cube = cfg.rescale ? rescale_unit(raw) : raw;
  SuperpixelGraph sg;
  if (cfg.train.ablate_v1) {
    sg.segmentation = identity_segmentation(cube.height, cube.width, cfg.max_nodes);
  } else {
    PcaResult pca = pca_reduce(cube, std::min(cfg.pca_components, cube.bands));
    sg.segmentation = slic_segment(cfg.rescale ? rescale_unit(pca.cube) : pca.cube, cfg.n_superpixels,
                                   cfg.compactness, cfg.slic_iters);
    sg.pca = std::move(pca);
  }
  const AssignmentMatrix qm = build_assignment(sg.segmentation);
  const Matrix x = project_to_nodes(cube, qm);
  sg.graph = build_adjacency(x, sg.segmentation, cfg.t_hop, cfg.train.rho);
  return sg;
}

struct PipelineResult {
  SuperpixelGraph sp;
  TrainResult training;
  std::vector<int> pixel_labels;
  std::optional<MetricsReport> metrics;
  std::optional<MetricsReport> argmax_metrics;
};

inline PipelineResult run_pipeline(const HsiCube& cube, const std::optional<GroundTruthMap>& gt, RunConfig cfg) {
  if (gt && (gt->height != cube.height || gt->width != cube.width))
    throw Error(ErrorCode::SizeMismatch, "ground truth dims differ from cube");
  if (cfg.train.clusters == 0 && gt) cfg.train.clusters = gt->classes();
  PipelineResult out;
  out.sp = build_superpixel_graph(cube, cfg);
  out.training = train(out.sp.graph, cfg.train);
  out.pixel_labels = backproject_labels(out.training.labels, out.sp.segmentation);
  if (gt) {
    out.metrics = compute_metrics(out.pixel_labels, *gt);
    out.argmax_metrics = compute_metrics(backproject_labels(out.training.argmax_labels, out.sp.segmentation), *gt);
  }
  return out;
}

/// Reference clustering: K-means directly on the superpixel mean spectra.
inline std::vector<int> kmeans_on_superpixels(const SuperpixelGraph& sp, int clusters, std::uint64_t seed) {
  const KMeansResult km = kmeans(*sp.graph.features(), clusters, seed);
  return backproject_labels(km.labels, sp.segmentation);
}

}  // namespace adagraph
