#pragma once

#include <adagraph/error.hpp>
#include <adagraph/hsi.hpp>
#include <adagraph/objective.hpp>
#include <adagraph/train.hpp>
#include <adagraph/types.hpp>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace adagraph {

namespace detail {

inline std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  return out;
}

}  // namespace detail

/// Binary P5 greymap, one byte per pixel. `modulo` wraps ids, otherwise they clamp at 255.
inline void write_pgm(const std::string& path, int height, int width, std::span<const int> values, bool modulo = false) {
  if (values.size() != static_cast<std::size_t>(height) * width) throw Error(ErrorCode::SizeMismatch, "pgm size mismatch");
  auto out = detail::open_out(path, true);
  out << "P5\n" << width << ' ' << height << "\n255\n";
  for (int v : values) {
    const int b = modulo ? ((v % 256) + 256) % 256 : std::clamp(v, 0, 255);
    out.put(static_cast<char>(static_cast<unsigned char>(b)));
  }
}

struct LabelImage {
  int height = 0;
  int width = 0;
  std::vector<int> labels;
};

inline LabelImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::string magic;
  int maxval = 0;
  LabelImage img;
  in >> magic >> img.width >> img.height >> maxval;
  if (magic != "P5" || img.width <= 0 || img.height <= 0 || maxval != 255)
    throw Error(ErrorCode::Io, "'" + path + "' is not an 8-bit P5 image");
  in.get();
  img.labels.resize(static_cast<std::size_t>(img.height) * img.width);
  for (int& v : img.labels) {
    const int c = in.get();
    if (c == EOF) throw Error(ErrorCode::SizeMismatch, "'" + path + "' is truncated");
    v = c;
  }
  return img;
}

/// `row,col,<column>` per pixel, LF endings, header row.
inline void write_label_csv(const std::string& path, int height, int width, std::span<const int> values,
                            const std::string& column = "label") {
  if (values.size() != static_cast<std::size_t>(height) * width) throw Error(ErrorCode::SizeMismatch, "csv size mismatch");
  auto out = detail::open_out(path);
  out << "row,col," << column << '\n';
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) out << r << ',' << c << ',' << values[static_cast<std::size_t>(r) * width + c] << '\n';
}

inline LabelImage read_label_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  std::vector<std::array<int, 3>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<int, 3> v{};
    char c1 = 0;
    char c2 = 0;
    std::istringstream ls(line);
    if (!(ls >> v[0] >> c1 >> v[1] >> c2 >> v[2]) || c1 != ',' || c2 != ',')
      throw Error(ErrorCode::Io, "malformed row in '" + path + "'");
    rows.push_back(v);
  }
  LabelImage img;
  for (const auto& v : rows) {
    img.height = std::max(img.height, v[0] + 1);
    img.width = std::max(img.width, v[1] + 1);
  }
  if (rows.size() != static_cast<std::size_t>(img.height) * img.width)
    throw Error(ErrorCode::SizeMismatch, "'" + path + "' does not cover a full grid");
  img.labels.assign(rows.size(), 0);
  for (const auto& v : rows) img.labels[static_cast<std::size_t>(v[0]) * img.width + v[1]] = v[2];
  return img;
}

inline void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace) {
  auto out = detail::open_out(path);
  out << std::setprecision(17);
  out << "iteration,l_c,l_g,l_o,mu,recovered,removed,homophily\n";
  for (const auto& r : trace)
    out << r.iteration << ',' << r.l_c << ',' << r.l_g << ',' << r.l_o << ',' << r.mu << ',' << r.recovered << ','
        << r.removed << ',' << r.homophily << '\n';
}

inline void write_edits_csv(const std::string& path, const std::vector<EditRecord>& edits) {
  auto out = detail::open_out(path);
  out << std::setprecision(17);
  out << "iter,op,i,j,weight\n";
  for (const auto& e : edits)
    out << e.iteration << ',' << (e.removal ? "rm" : "rc") << ',' << e.i << ',' << e.j << ',' << e.weight << '\n';
}

inline void write_matrix_csv(const std::string& path, const Matrix& m) {
  auto out = detail::open_out(path);
  out << std::setprecision(17);
  for (Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << "c" << c;
  out << '\n';
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << m(r, c);
    out << '\n';
  }
}

/// params.bin holds little-endian float64: W row-major, mu_raw, centers row-major.
/// The JSON manifest records the shapes needed to read it back.
inline void save_params(const std::string& bin_path, const std::string& manifest_path, const ModelParams& p, double mu) {
  auto out = detail::open_out(bin_path, true);
  for (Index r = 0; r < p.w.rows(); ++r)
    for (Index c = 0; c < p.w.cols(); ++c) detail::store_le(out, p.w(r, c));
  detail::store_le(out, p.mu_raw);
  for (Index r = 0; r < p.centers.rows(); ++r)
    for (Index c = 0; c < p.centers.cols(); ++c) detail::store_le(out, p.centers(r, c));
  nlohmann::ordered_json j;
  j["format"] = "float64-le";
  j["layout"] = {"w (row-major)", "mu_raw", "centers (row-major)"};
  j["w_rows"] = p.w.rows();
  j["w_cols"] = p.w.cols();
  j["centers_rows"] = p.centers.rows();
  j["centers_cols"] = p.centers.cols();
  j["mu_raw"] = p.mu_raw;
  j["mu"] = mu;
  auto man = detail::open_out(manifest_path);
  man << j.dump(2) << '\n';
}

inline ModelParams load_params(const std::string& bin_path, const std::string& manifest_path) {
  std::ifstream man(manifest_path);
  if (!man) throw Error(ErrorCode::Io, "cannot open '" + manifest_path + "'");
  nlohmann::json j;
  try {
    man >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedSidecar, e.what());
  }
  ModelParams p;
  p.w.resize(j.at("w_rows").get<Index>(), j.at("w_cols").get<Index>());
  p.centers.resize(j.at("centers_rows").get<Index>(), j.at("centers_cols").get<Index>());
  const std::size_t count = static_cast<std::size_t>(p.w.size() + 1 + p.centers.size());
  const std::vector<char> bytes = detail::read_bytes(bin_path);
  if (bytes.size() != count * 8) throw Error(ErrorCode::SizeMismatch, "params file size disagrees with manifest");
  std::size_t off = 0;
  auto next = [&] {
    const double v = detail::load_le<double>(bytes.data() + off);
    off += 8;
    return v;
  };
  for (Index r = 0; r < p.w.rows(); ++r)
    for (Index c = 0; c < p.w.cols(); ++c) p.w(r, c) = next();
  p.mu_raw = next();
  for (Index r = 0; r < p.centers.rows(); ++r)
    for (Index c = 0; c < p.centers.cols(); ++c) p.centers(r, c) = next();
  return p;
}

}  // namespace adagraph
