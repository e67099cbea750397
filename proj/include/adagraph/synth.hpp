#pragma once

#include <adagraph/error.hpp>
#include <adagraph/hsi.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace adagraph {

struct SynthSpec {
  int height = 64;
  int width = 64;
  int bands = 8;
  int classes = 4;
  double noise = 0.05;       // per-band Gaussian sigma
  double separation = 0.2;   // minimum Euclidean distance between class mean spectra
  std::uint64_t seed = 0;
};

struct SynthScene {
  HsiCube cube;
  GroundTruthMap gt;
  std::vector<std::vector<double>> class_means;
};

/// Piecewise-constant scene: classes tile a near-square grid of rectangular
/// blocks (block b gets class b mod C + 1), every pixel draws its class mean
/// plus i.i.d. Gaussian noise.
inline SynthScene synthesize(const SynthSpec& s) {
  if (s.height <= 0 || s.width <= 0 || s.bands <= 0) throw Error(ErrorCode::ConfigInvalid, "dims must be positive");
  if (s.classes < 1) throw Error(ErrorCode::ConfigInvalid, "classes must be >= 1");
  if (s.noise < 0.0 || s.separation < 0.0) throw Error(ErrorCode::ConfigInvalid, "noise and separation must be >= 0");
  const int gx = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(s.classes))));
  const int gy = (s.classes + gx - 1) / gx;
  if (gy > s.height || gx > s.width) throw Error(ErrorCode::ConfigInvalid, "image too small for the class grid");

  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  SynthScene out;
  std::vector<std::vector<double>> offsets(static_cast<std::size_t>(s.classes), std::vector<double>(static_cast<std::size_t>(s.bands)));
  for (auto& o : offsets)
    for (double& v : o) v = normal(rng);
  std::vector<double> mean(static_cast<std::size_t>(s.bands), 0.0);
  for (const auto& o : offsets)
    for (int b = 0; b < s.bands; ++b) mean[static_cast<std::size_t>(b)] += o[static_cast<std::size_t>(b)] / s.classes;
  for (auto& o : offsets)
    for (int b = 0; b < s.bands; ++b) o[static_cast<std::size_t>(b)] -= mean[static_cast<std::size_t>(b)];
  double dmin = std::numeric_limits<double>::infinity();
  for (int a = 0; a < s.classes; ++a)
    for (int c = a + 1; c < s.classes; ++c) {
      double d = 0.0;
      for (int b = 0; b < s.bands; ++b) {
        const double diff = offsets[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] -
                            offsets[static_cast<std::size_t>(c)][static_cast<std::size_t>(b)];
        d += diff * diff;
      }
      dmin = std::min(dmin, std::sqrt(d));
    }
  const double scale = (s.classes > 1 && dmin > 0.0) ? s.separation / dmin : 0.0;
  out.class_means = offsets;
  for (auto& m : out.class_means)
    for (double& v : m) v = 0.5 + scale * v;

  out.cube = HsiCube(s.height, s.width, s.bands);
  out.gt = GroundTruthMap{s.height, s.width, std::vector<int>(static_cast<std::size_t>(s.height) * s.width)};
  for (int r = 0; r < s.height; ++r)
    for (int c = 0; c < s.width; ++c) {
      const int by = r * gy / s.height;
      const int bx = c * gx / s.width;
      const int cls = (by * gx + bx) % s.classes;
      out.gt.labels[static_cast<std::size_t>(r) * s.width + c] = cls + 1;
      for (int b = 0; b < s.bands; ++b)
        out.cube.at(r, c, b) =
            out.class_means[static_cast<std::size_t>(cls)][static_cast<std::size_t>(b)] + s.noise * normal(rng);
    }
  return out;
}

}  // namespace adagraph
