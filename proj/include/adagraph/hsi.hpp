#pragma once

#include <adagraph/error.hpp>
#include <adagraph/types.hpp>

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace adagraph {

/// Hyperspectral cube held band-sequential: value(r, c, band) lives at
/// data[band * h * w + r * w + c].
struct HsiCube {
  int height = 0;
  int width = 0;
  int bands = 0;
  std::vector<double> data;

  HsiCube() = default;
  HsiCube(int h, int w, int b) : height(h), width(w), bands(b), data(static_cast<std::size_t>(h) * w * b, 0.0) {
    if (h <= 0 || w <= 0 || b <= 0) throw Error(ErrorCode::SizeMismatch, "cube dimensions must be positive");
  }

  std::size_t pixels() const noexcept { return static_cast<std::size_t>(height) * static_cast<std::size_t>(width); }

  double& at(int r, int c, int band) {
    return data[static_cast<std::size_t>(band) * pixels() + static_cast<std::size_t>(r) * width + c];
  }
  double at(int r, int c, int band) const {
    return data[static_cast<std::size_t>(band) * pixels() + static_cast<std::size_t>(r) * width + c];
  }
  /// Pixel index p = r * w + c.
  double at(std::size_t p, int band) const { return data[static_cast<std::size_t>(band) * pixels() + p]; }

  /// hw x b matrix, one pixel spectrum per row.
  Matrix flatten() const {
    Matrix m(static_cast<Index>(pixels()), bands);
    for (int b = 0; b < bands; ++b)
      for (std::size_t p = 0; p < pixels(); ++p) m(static_cast<Index>(p), b) = at(p, b);
    return m;
  }
};

inline constexpr int kUnlabeled = -1;

/// h x w integer grid; 0 = unlabeled, 1..C = classes.
struct GroundTruthMap {
  int height = 0;
  int width = 0;
  std::vector<int> labels;

  int at(int r, int c) const { return labels[static_cast<std::size_t>(r) * width + c]; }
  int classes() const { return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()); }
};

namespace detail {

inline std::uintmax_t file_size_or_throw(const std::string& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot stat '" + path + "': " + ec.message());
  return size;
}

inline std::vector<char> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <class T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof(T));
  }
  return v;
}

template <class T>
void store_le(std::ostream& os, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof(T));
  }
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace detail

struct CubeSidecar {
  int height = 0;
  int width = 0;
  int bands = 0;
  std::string dtype = "float32";
  std::string interleave = "bsq";
};

inline CubeSidecar parse_sidecar(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedSidecar, e.what());
  }
  CubeSidecar s;
  try {
    s.height = j.at("height").get<int>();
    s.width = j.at("width").get<int>();
    s.bands = j.at("bands").get<int>();
    s.dtype = j.value("dtype", std::string("float32"));
    s.interleave = j.value("interleave", std::string("bsq"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedSidecar, e.what());
  }
  if (s.height <= 0 || s.width <= 0 || s.bands <= 0)
    throw Error(ErrorCode::MalformedSidecar, "dimensions must be positive");
  if (s.dtype != "float32") throw Error(ErrorCode::UnsupportedDtype, "dtype '" + s.dtype + "' (only float32)");
  if (s.interleave != "bsq" && s.interleave != "bil" && s.interleave != "bip")
    throw Error(ErrorCode::MalformedSidecar, "interleave must be bsq, bil or bip");
  return s;
}

inline std::string sidecar_text(const CubeSidecar& s) {
  nlohmann::ordered_json j;
  j["height"] = s.height;
  j["width"] = s.width;
  j["bands"] = s.bands;
  j["dtype"] = s.dtype;
  j["interleave"] = s.interleave;
  j["byte_order"] = "little";
  return j.dump(2) + "\n";
}

/// Reads a raw little-endian float32 cube described by a JSON sidecar.
inline HsiCube load_cube(const std::string& path, const std::string& sidecar_path) {
  std::ifstream side(sidecar_path);
  if (!side) throw Error(ErrorCode::Io, "cannot open sidecar '" + sidecar_path + "'");
  const std::string text((std::istreambuf_iterator<char>(side)), std::istreambuf_iterator<char>());
  const CubeSidecar s = parse_sidecar(text);

  const std::uintmax_t expected = static_cast<std::uintmax_t>(s.height) * s.width * s.bands * 4u;
  const std::uintmax_t actual = detail::file_size_or_throw(path);
  if (actual != expected)
    throw Error(ErrorCode::SizeMismatch, "'" + path + "' holds " + std::to_string(actual) + " bytes, sidecar implies " +
                                             std::to_string(expected));
  const std::vector<char> bytes = detail::read_bytes(path);

  HsiCube cube(s.height, s.width, s.bands);
  const std::size_t hw = cube.pixels();
  for (std::size_t idx = 0; idx < hw * static_cast<std::size_t>(s.bands); ++idx) {
    std::size_t p = 0;
    std::size_t band = 0;
    if (s.interleave == "bsq") {
      band = idx / hw;
      p = idx % hw;
    } else if (s.interleave == "bip") {
      p = idx / static_cast<std::size_t>(s.bands);
      band = idx % static_cast<std::size_t>(s.bands);
    } else {  // bil: row, band, column
      const std::size_t row = idx / (static_cast<std::size_t>(s.bands) * s.width);
      const std::size_t rem = idx % (static_cast<std::size_t>(s.bands) * s.width);
      band = rem / static_cast<std::size_t>(s.width);
      p = row * static_cast<std::size_t>(s.width) + rem % static_cast<std::size_t>(s.width);
    }
    const float v = detail::load_le<float>(bytes.data() + idx * 4);
    if (!std::isfinite(v)) throw Error(ErrorCode::SizeMismatch, "non-finite value in cube");
    cube.data[band * hw + p] = static_cast<double>(v);
  }
  return cube;
}

/// Writes band-sequential float32 and the matching sidecar.
inline void save_cube(const std::string& path, const std::string& sidecar_path, const HsiCube& cube) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  for (double v : cube.data) detail::store_le(out, static_cast<float>(v));
  std::ofstream side(sidecar_path);
  if (!side) throw Error(ErrorCode::Io, "cannot write '" + sidecar_path + "'");
  side << sidecar_text({cube.height, cube.width, cube.bands, "float32", "bsq"});
}

/// Raw little-endian uint16 row-major label grid.
inline GroundTruthMap load_ground_truth(const std::string& path, int height, int width) {
  const std::uintmax_t expected = static_cast<std::uintmax_t>(height) * width * 2u;
  const std::uintmax_t actual = detail::file_size_or_throw(path);
  if (actual != expected)
    throw Error(ErrorCode::SizeMismatch, "ground truth '" + path + "' holds " + std::to_string(actual) +
                                             " bytes, expected " + std::to_string(expected));
  const std::vector<char> bytes = detail::read_bytes(path);
  GroundTruthMap gt{height, width, std::vector<int>(static_cast<std::size_t>(height) * width)};
  for (std::size_t i = 0; i < gt.labels.size(); ++i) gt.labels[i] = detail::load_le<std::uint16_t>(bytes.data() + 2 * i);
  return gt;
}

inline void save_ground_truth(const std::string& path, const GroundTruthMap& gt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  for (int l : gt.labels) {
    if (l < 0 || l > 65535) throw Error(ErrorCode::Io, "label out of uint16 range");
    detail::store_le(out, static_cast<std::uint16_t>(l));
  }
}

/// Affine rescale of the whole cube to [0, 1]; constant cubes map to 0.
inline HsiCube rescale_unit(const HsiCube& cube) {
  HsiCube out = cube;
  const auto [lo, hi] = std::minmax_element(cube.data.begin(), cube.data.end());
  const double range = *hi - *lo;
  for (double& v : out.data) v = range > 0.0 ? (v - *lo) / range : 0.0;
  return out;
}

struct PcaResult {
  HsiCube cube;                     // bands == components
  std::vector<double> explained;    // variance captured by each kept axis, descending
  double explained_ratio = 0.0;     // sum(explained) / total variance
  bool degenerate = false;          // every pixel identical
};

/// Projects each pixel onto the top-p principal axes of the mean-centered
/// pixel cloud. Axis signs are fixed so the largest-magnitude loading is positive.
inline PcaResult pca_reduce(const HsiCube& cube, int components) {
  if (components < 1 || components > cube.bands)
    throw Error(ErrorCode::ConfigInvalid, "pca components must lie in [1, bands]");
  const Matrix x = cube.flatten();
  const Vector mean = x.colwise().mean();
  const Matrix centered = x.rowwise() - mean.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(x.rows());

  PcaResult out;
  out.cube = HsiCube(cube.height, cube.width, components);
  const double total = cov.trace();
  if (!(total > 0.0)) {
    out.degenerate = true;
    out.explained.assign(static_cast<std::size_t>(components), 0.0);
    return out;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  const Index b = cov.rows();
  Matrix axes(b, components);
  for (int c = 0; c < components; ++c) {
    Vector v = solver.eigenvectors().col(b - 1 - c);
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    axes.col(c) = v;
    out.explained.push_back(std::max(0.0, solver.eigenvalues()[b - 1 - c]));
  }
  const Matrix projected = centered * axes;
  for (int c = 0; c < components; ++c)
    for (Index p = 0; p < projected.rows(); ++p)
      out.cube.data[static_cast<std::size_t>(c) * out.cube.pixels() + static_cast<std::size_t>(p)] = projected(p, c);
  double kept = 0.0;
  for (double e : out.explained) kept += e;
  out.explained_ratio = kept / total;
  return out;
}

}  // namespace adagraph
