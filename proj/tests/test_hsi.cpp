#include "support.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <fstream>

using namespace adagraph;

namespace {

HsiCube counting_cube(int h, int w, int b) {
  HsiCube cube(h, w, b);
  for (std::size_t i = 0; i < cube.data.size(); ++i) cube.data[i] = 0.25 * static_cast<double>(i) - 1.0;
  return cube;
}

void write_text(const std::filesystem::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST(CubeIo, RoundTripIsBitwise) {
  const auto dir = testsupport::scratch_dir("cube_roundtrip");
  const HsiCube cube = counting_cube(2, 2, 3);
  save_cube((dir / "c.raw").string(), (dir / "c.json").string(), cube);
  EXPECT_EQ(std::filesystem::file_size(dir / "c.raw"), 2u * 2u * 3u * 4u);
  const HsiCube back = load_cube((dir / "c.raw").string(), (dir / "c.json").string());
  ASSERT_EQ(back.height, 2);
  ASSERT_EQ(back.width, 2);
  ASSERT_EQ(back.bands, 3);
  EXPECT_EQ(back.data, cube.data);
}

TEST(CubeIo, FileSizeMismatch) {
  const auto dir = testsupport::scratch_dir("cube_size");
  write_text(dir / "c.json", R"({"height": 10, "width": 10, "bands": 5, "dtype": "float32", "interleave": "bsq"})");
  std::ofstream(dir / "c.raw", std::ios::binary) << std::string(400, '\0');
  try {
    load_cube((dir / "c.raw").string(), (dir / "c.json").string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SizeMismatch);
  }
}

TEST(CubeIo, SidecarErrors) {
  try {
    parse_sidecar(R"({"height": 2, "width": 2, "bands": 1, "dtype": "int16"})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedDtype);
  }
  for (const char* bad : {"{not json", R"({"height": 2, "width": 2})", R"({"height": 0, "width": 2, "bands": 1})",
                          R"({"height": 2, "width": 2, "bands": 1, "interleave": "xyz"})"}) {
    try {
      parse_sidecar(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::MalformedSidecar) << bad;
    }
  }
}

TEST(CubeIo, InterleavedLayoutsDecodeToSameCube) {
  const auto dir = testsupport::scratch_dir("cube_interleave");
  const int h = 2, w = 3, b = 2;
  const HsiCube ref = counting_cube(h, w, b);
  auto dump = [&](const std::string& name, const std::string& il, auto index_of) {
    std::ofstream out(dir / (name + ".raw"), std::ios::binary);
    std::vector<float> buf(ref.data.size());
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c)
        for (int k = 0; k < b; ++k) buf[index_of(r, c, k)] = static_cast<float>(ref.at(r, c, k));
    for (float v : buf) detail::store_le(out, v);
    write_text(dir / (name + ".json"),
               R"({"height": 2, "width": 3, "bands": 2, "dtype": "float32", "interleave": ")" + il + "\"}");
  };
  dump("bip", "bip", [&](int r, int c, int k) { return static_cast<std::size_t>((r * w + c) * b + k); });
  dump("bil", "bil", [&](int r, int c, int k) { return static_cast<std::size_t>((r * b + k) * w + c); });
  for (const char* name : {"bip", "bil"}) {
    const HsiCube got = load_cube((dir / (std::string(name) + ".raw")).string(), (dir / (std::string(name) + ".json")).string());
    EXPECT_EQ(got.data, ref.data) << name;
  }
}

TEST(GroundTruthIo, RoundTripAndWrongDims) {
  const auto dir = testsupport::scratch_dir("gt_io");
  const GroundTruthMap gt{2, 3, {0, 1, 2, 3, 0, 65535}};
  save_ground_truth((dir / "g.raw").string(), gt);
  const GroundTruthMap back = load_ground_truth((dir / "g.raw").string(), 2, 3);
  EXPECT_EQ(back.labels, gt.labels);
  EXPECT_EQ(back.classes(), 65535);
  try {
    load_ground_truth((dir / "g.raw").string(), 3, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SizeMismatch);
  }
  try {
    load_ground_truth((dir / "missing.raw").string(), 2, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

TEST(Rescale, MapsToUnitInterval) {
  const HsiCube r = rescale_unit(counting_cube(3, 3, 2));
  EXPECT_DOUBLE_EQ(*std::min_element(r.data.begin(), r.data.end()), 0.0);
  EXPECT_DOUBLE_EQ(*std::max_element(r.data.begin(), r.data.end()), 1.0);
  HsiCube flat(2, 2, 2);
  for (double& v : flat.data) v = 7.0;
  for (double v : rescale_unit(flat).data) EXPECT_EQ(v, 0.0);
}

TEST(Pca, RankOneCapturesEverything) {
  HsiCube cube(4, 4, 3);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) cube.at(r, c, 1) = r * 4 + c;
  const PcaResult p = pca_reduce(cube, 1);
  EXPECT_NEAR(p.explained_ratio, 1.0, 1e-12);
  EXPECT_FALSE(p.degenerate);
}

TEST(Pca, FullBasisReconstructsCenteredData) {
  std::mt19937_64 rng(2);
  HsiCube cube(5, 4, 3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double& v : cube.data) v = n(rng);
  const PcaResult p = pca_reduce(cube, 3);
  EXPECT_NEAR(p.explained_ratio, 1.0, 1e-12);
  const Matrix x = cube.flatten();
  const Matrix centered = x.rowwise() - x.colwise().mean();
  const Matrix y = p.cube.flatten();
  // Orthonormal axes: Y Y^T equals X_c X_c^T without knowing the axes.
  EXPECT_LE((y * y.transpose() - centered * centered.transpose()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Pca, ProjectionVarianceMatchesTopEigenvalues) {
  std::mt19937_64 rng(9);
  HsiCube cube(8, 8, 4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int b = 0; b < 4; ++b)
    for (std::size_t p = 0; p < cube.pixels(); ++p) cube.data[b * cube.pixels() + p] = (b + 1) * n(rng);
  const Matrix x = cube.flatten();
  const Matrix centered = x.rowwise() - x.colwise().mean();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(x.rows());
  const Vector ev = symmetric_eigendecompose(cov).values;
  const PcaResult p = pca_reduce(cube, 2);
  const Matrix y = p.cube.flatten();
  const double var = (y.transpose() * y / static_cast<double>(y.rows())).trace();
  EXPECT_NEAR(var, ev[3] + ev[2], 1e-6);
  EXPECT_NEAR(p.explained[0], ev[3], 1e-9);
  EXPECT_NEAR(p.explained[1], ev[2], 1e-9);
}

TEST(Pca, DegenerateAndInvalid) {
  HsiCube cube(3, 3, 2);
  for (double& v : cube.data) v = 0.5;
  const PcaResult p = pca_reduce(cube, 2);
  EXPECT_TRUE(p.degenerate);
  for (double v : p.cube.data) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(pca_reduce(cube, 0), Error);
  EXPECT_THROW(pca_reduce(cube, 3), Error);
}
