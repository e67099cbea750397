#include "support.hpp"

#include <gtest/gtest.h>

#include <queue>
#include <set>

using namespace adagraph;

namespace {

bool all_regions_connected(const SuperpixelSegmentation& seg) {
  std::vector<int> seen(static_cast<std::size_t>(seg.count), 0);
  std::vector<bool> visited(seg.assignment.size(), false);
  for (std::size_t start = 0; start < seg.assignment.size(); ++start) {
    if (visited[start]) continue;
    const int id = seg.assignment[start];
    if (++seen[static_cast<std::size_t>(id)] > 1) return false;
    std::queue<std::size_t> q;
    q.push(start);
    visited[start] = true;
    while (!q.empty()) {
      const std::size_t p = q.front();
      q.pop();
      const int r = static_cast<int>(p) / seg.width;
      const int c = static_cast<int>(p) % seg.width;
      const int dr[4] = {-1, 1, 0, 0};
      const int dc[4] = {0, 0, -1, 1};
      for (int d = 0; d < 4; ++d) {
        const int rr = r + dr[d];
        const int cc = c + dc[d];
        if (rr < 0 || cc < 0 || rr >= seg.height || cc >= seg.width) continue;
        const auto np = static_cast<std::size_t>(rr) * seg.width + cc;
        if (!visited[np] && seg.assignment[np] == id) {
          visited[np] = true;
          q.push(np);
        }
      }
    }
  }
  return true;
}

void expect_valid(const SuperpixelSegmentation& seg) {
  ASSERT_EQ(seg.assignment.size(), static_cast<std::size_t>(seg.height) * seg.width);
  std::size_t total = 0;
  for (auto n : seg.sizes) {
    EXPECT_GT(n, 0);
    total += static_cast<std::size_t>(n);
  }
  EXPECT_EQ(total, seg.assignment.size());
  for (int id : seg.assignment) {
    EXPECT_GE(id, 0);
    EXPECT_LT(id, seg.count);
  }
  EXPECT_TRUE(all_regions_connected(seg));
}

SuperpixelSegmentation grid_seg(int h, int w, int rows, int cols) {
  SuperpixelSegmentation seg{h, w, std::vector<int>(static_cast<std::size_t>(h) * w), rows * cols, {}};
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) seg.assignment[static_cast<std::size_t>(r) * w + c] = (r * rows / h) * cols + c * cols / w;
  detail::recount(seg);
  return seg;
}

}  // namespace

TEST(Slic, ConstantImageGivesSeedGridQuadrants) {
  HsiCube cube(4, 4, 1);
  for (double& v : cube.data) v = 0.3;
  const SuperpixelSegmentation seg = slic_segment(cube, 4, 1.0, 10);
  expect_valid(seg);
  ASSERT_EQ(seg.count, 4);
  // Brute-force nearest-seed oracle: seeds at the centers of the 2x2 grid cells.
  const double seeds[4][2] = {{0.5, 0.5}, {0.5, 2.5}, {2.5, 0.5}, {2.5, 2.5}};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      int best = 0;
      double bd = 1e300;
      for (int k = 0; k < 4; ++k) {
        const double d = (r - seeds[k][0]) * (r - seeds[k][0]) + (c - seeds[k][1]) * (c - seeds[k][1]);
        if (d < bd) {
          bd = d;
          best = k;
        }
      }
      EXPECT_EQ(seg.assignment[static_cast<std::size_t>(r) * 4 + c], best) << r << "," << c;
    }
  for (auto n : seg.sizes) EXPECT_EQ(n, 4);
}

TEST(Slic, TwoHomogeneousHalvesRecovered) {
  HsiCube cube(6, 8, 2);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 8; ++c) {
      cube.at(r, c, 0) = c < 4 ? 0.0 : 1.0;
      cube.at(r, c, 1) = c < 4 ? 1.0 : 0.0;
    }
  const SuperpixelSegmentation seg = slic_segment(cube, 2, 0.5, 10);
  expect_valid(seg);
  ASSERT_EQ(seg.count, 2);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 8; ++c)
      EXPECT_EQ(seg.assignment[static_cast<std::size_t>(r) * 8 + c], seg.assignment[c < 4 ? 0 : 7]);
  EXPECT_NE(seg.assignment[0], seg.assignment[7]);
}

TEST(Slic, SaturationGivesSinglePixels) {
  std::mt19937_64 rng(1);
  HsiCube cube(3, 5, 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& v : cube.data) v = u(rng);
  const SuperpixelSegmentation seg = slic_segment(cube, 15, 0.5, 10);
  expect_valid(seg);
  EXPECT_EQ(seg.count, 15);
  for (auto n : seg.sizes) EXPECT_EQ(n, 1);
}

TEST(Slic, ErrorsAndDeterminism) {
  HsiCube cube(3, 3, 1);
  try {
    slic_segment(cube, 10, 0.5, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooManySuperpixels);
  }
  EXPECT_THROW(slic_segment(cube, 2, 0.5, 0), Error);

  const SynthScene scene = synthesize(SynthSpec{32, 32, 4, 3, 0.05, 0.2, 5});
  const SuperpixelSegmentation a = slic_segment(scene.cube, 16, 0.5, 10);
  const SuperpixelSegmentation b = slic_segment(scene.cube, 16, 0.5, 10);
  expect_valid(a);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.count, b.count);
}

TEST(Slic, NoisyLowCompactnessStillPartitionsIntoConnectedRegions) {
  const SynthScene scene = synthesize(SynthSpec{40, 40, 3, 4, 0.2, 0.2, 1});
  for (double m : {0.0, 0.05, 0.5, 5.0}) {
    const SuperpixelSegmentation seg = slic_segment(scene.cube, 25, m, 10);
    expect_valid(seg);
  }
}

TEST(IdentitySegmentation, OnePixelPerNodeWithCeiling) {
  const SuperpixelSegmentation seg = identity_segmentation(3, 4, 100);
  expect_valid(seg);
  EXPECT_EQ(seg.count, 12);
  try {
    identity_segmentation(30, 30, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooManySuperpixels);
  }
}

TEST(Assignment, IdentityCase) {
  const SuperpixelSegmentation seg{1, 2, {0, 1}, 2, {1, 1}};
  const AssignmentMatrix qm = build_assignment(seg);
  EXPECT_TRUE(Matrix(qm.q()).isApprox(Matrix::Identity(2, 2)));
}

TEST(Assignment, SingleRegionColumnIsUniform) {
  const SuperpixelSegmentation seg = grid_seg(3, 4, 1, 1);
  const Matrix qh = build_assignment(seg).q_hat();
  for (Index i = 0; i < qh.rows(); ++i) EXPECT_DOUBLE_EQ(qh(i, 0), 1.0 / 12.0);
}

TEST(Assignment, RowsSumToOneColumnsNormalized) {
  const SuperpixelSegmentation seg = slic_segment(synthesize(SynthSpec{20, 20, 3, 2, 0.05, 0.2, 3}).cube, 9, 0.5, 5);
  const AssignmentMatrix qm = build_assignment(seg);
  const Matrix q = qm.q();
  const Matrix qh = qm.q_hat();
  for (Index i = 0; i < q.rows(); ++i) EXPECT_EQ(q.row(i).sum(), 1.0);
  for (Index j = 0; j < qh.cols(); ++j) EXPECT_NEAR(qh.col(j).sum(), 1.0, 1e-9);
}

TEST(Projection, MeansOfMemberPixels) {
  HsiCube constant(2, 2, 2);
  for (double& v : constant.data) v = 4.5;
  const SuperpixelSegmentation two{2, 2, {0, 0, 1, 1}, 2, {2, 2}};
  const Matrix xc = project_to_nodes(constant, build_assignment(two));
  EXPECT_TRUE(xc.isApprox(Matrix::Constant(2, 2, 4.5)));

  HsiCube cube(1, 2, 1);
  cube.at(0, 0, 0) = 1.0;
  cube.at(0, 1, 0) = 3.0;
  const SuperpixelSegmentation one{1, 2, {0, 0}, 1, {2}};
  EXPECT_DOUBLE_EQ(project_to_nodes(cube, build_assignment(one))(0, 0), 2.0);

  const SuperpixelSegmentation ident = identity_segmentation(2, 2, 10);
  HsiCube r(2, 2, 3);
  for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] = static_cast<double>(i);
  EXPECT_TRUE(project_to_nodes(r, build_assignment(ident)).isApprox(r.flatten()));
}

TEST(Projection, IsLinear) {
  std::mt19937_64 rng(6);
  const SuperpixelSegmentation seg = grid_seg(6, 6, 2, 3);
  HsiCube c1(6, 6, 2), c2(6, 6, 2), mix(6, 6, 2);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t i = 0; i < c1.data.size(); ++i) {
    c1.data[i] = n(rng);
    c2.data[i] = n(rng);
    mix.data[i] = 2.0 * c1.data[i] - 0.5 * c2.data[i];
  }
  const AssignmentMatrix qm = build_assignment(seg);
  const Matrix lhs = project_to_nodes(mix, qm);
  const Matrix rhs = 2.0 * project_to_nodes(c1, qm) - 0.5 * project_to_nodes(c2, qm);
  EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Adjacency, KernelValuesAndNeighbourhood) {
  // Three vertical strips: 0 | 1 | 2, so 0 and 2 are two hops apart.
  const SuperpixelSegmentation seg = grid_seg(2, 3, 1, 3);
  Matrix x(3, 2);
  x << 0, 0, 0, 0, 1, 2;  // ||x1 - x2||^2 = 5
  const Graph g = build_adjacency(x, seg, 1, 0.2);
  EXPECT_DOUBLE_EQ(g.weight(0, 1), 1.0);
  EXPECT_NEAR(g.weight(1, 2), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(g.weight(1, 2), 0.367879, 1e-6);
  EXPECT_EQ(g.weight(0, 2), 0.0);
  EXPECT_FALSE(g.has_edge(0, 2));
  for (double s : g.self_loops()) EXPECT_EQ(s, 0.0);
  ASSERT_TRUE(g.features().has_value());

  const Graph g2 = build_adjacency(x, seg, 2, 0.2);
  EXPECT_NEAR(g2.weight(0, 2), std::exp(-1.0), 1e-15);
}

TEST(Adjacency, SymmetricWithWeightsInUnitInterval) {
  const SynthScene scene = synthesize(SynthSpec{24, 24, 4, 3, 0.05, 0.3, 2});
  const SuperpixelSegmentation seg = slic_segment(scene.cube, 16, 0.5, 10);
  const Matrix x = project_to_nodes(scene.cube, build_assignment(seg));
  const Graph g = build_adjacency(x, seg, 1, 0.2);
  const Matrix a = g.dense();
  EXPECT_TRUE(a.isApprox(a.transpose()));
  const auto rag = region_adjacency(seg);
  for (int i = 0; i < seg.count; ++i)
    for (int j = 0; j < seg.count; ++j) {
      if (i == j) continue;
      if (rag[static_cast<std::size_t>(i)].count(j)) {
        EXPECT_GT(a(i, j), 0.0);
        EXPECT_LE(a(i, j), 1.0);
      } else {
        EXPECT_EQ(a(i, j), 0.0);
      }
    }
}

TEST(Backproject, BasicCases) {
  const SuperpixelSegmentation one = grid_seg(2, 3, 1, 1);
  const std::vector<int> three{3};
  for (int l : backproject_labels(three, one)) EXPECT_EQ(l, 3);
  const SuperpixelSegmentation ident = identity_segmentation(2, 2, 10);
  const std::vector<int> labels{4, 1, 0, 2};
  EXPECT_EQ(backproject_labels(labels, ident), labels);
}

TEST(Backproject, MajorityOnAlignedSegmentationReproducesGroundTruth) {
  const SuperpixelSegmentation seg = grid_seg(4, 4, 2, 2);
  GroundTruthMap gt{4, 4, std::vector<int>(16)};
  for (int p = 0; p < 16; ++p) gt.labels[static_cast<std::size_t>(p)] = seg.assignment[static_cast<std::size_t>(p)] % 2 + 1;
  gt.labels[0] = 0;
  const std::vector<int> maj = majority_gt_per_node(gt, seg);
  const std::vector<int> px = backproject_labels(maj, seg);
  for (int p = 0; p < 16; ++p)
    if (gt.labels[static_cast<std::size_t>(p)] != 0) {
      EXPECT_EQ(px[static_cast<std::size_t>(p)], gt.labels[static_cast<std::size_t>(p)]);
    }
}

TEST(Majority, RulesAndTies) {
  const SuperpixelSegmentation seg{1, 3, {0, 0, 0}, 1, {3}};
  EXPECT_EQ(majority_gt_per_node(GroundTruthMap{1, 3, {1, 1, 2}}, seg)[0], 1);
  EXPECT_EQ(majority_gt_per_node(GroundTruthMap{1, 3, {0, 0, 0}}, seg)[0], kUnlabeled);
  EXPECT_EQ(majority_gt_per_node(GroundTruthMap{1, 3, {2, 1, 0}}, seg)[0], 1);
  EXPECT_EQ(majority_gt_per_node(GroundTruthMap{1, 3, {2, 2, 1}}, seg)[0], 2);
}
