#pragma once

#include <adagraph/error.hpp>
#include <adagraph/train.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace adagraph {

/// Everything a `cluster` run needs: training, ingestion, and I/O paths.
struct RunConfig {
  TrainConfig train;
  int n_superpixels = 580;
  double compactness = 0.5;
  int slic_iters = 10;
  int pca_components = 3;
  int t_hop = 1;
  int max_nodes = 20000;  // ceiling for the per-pixel graph
  bool rescale = true;
  std::string cube;
  std::string sidecar;
  std::string gt;
  std::string outdir = "out";
  bool dump_embedding = false;
};

/// Parameter presets for the three benchmark scenes.
inline void apply_preset(RunConfig& cfg, const std::string& name) {
  if (name == "salinas") {
    cfg.n_superpixels = 580;
    cfg.train.gamma = 0.3;
  } else if (name == "pu") {
    cfg.n_superpixels = 800;
    cfg.train.gamma = 0.5;
  } else if (name == "trento") {
    cfg.n_superpixels = 550;
    cfg.train.gamma = 0.3;
  } else {
    throw Error(ErrorCode::ConfigInvalid, "unknown preset '" + name + "' (salinas, pu, trento)");
  }
  cfg.train.t_layers = 5;
  cfg.train.iterations = 50;
  cfg.train.learning_rate = 5e-4;
  cfg.train.xi = 0.5;
  cfg.train.eta = 0.05;
}

namespace detail {

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const std::from_chars_result r = std::from_chars(first, last, value);
  if (r.ec != std::errc() || r.ptr != last)
    throw Error(ErrorCode::ConfigInvalid, "bad value '" + text + "' for " + key);
  return value;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw Error(ErrorCode::ConfigInvalid, "bad boolean '" + text + "' for " + key);
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace detail

/// One named, string-convertible configuration entry.
struct ConfigField {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

inline const std::vector<ConfigField>& config_fields() {
  using detail::format_double;
  using detail::parse_bool;
  using detail::parse_number;
#define ADAGRAPH_INT(name, member)                                                                        \
  ConfigField{name, [](const RunConfig& c) { return std::to_string(c.member); },                          \
              [](RunConfig& c, const std::string& v) { c.member = parse_number<decltype(c.member)>(name, v); }}
#define ADAGRAPH_DBL(name, member)                                                                        \
  ConfigField{name, [](const RunConfig& c) { return format_double(c.member); },                           \
              [](RunConfig& c, const std::string& v) { c.member = parse_number<double>(name, v); }}
#define ADAGRAPH_BOOL(name, member)                                                                       \
  ConfigField{name, [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); },          \
              [](RunConfig& c, const std::string& v) { c.member = parse_bool(name, v); }}
#define ADAGRAPH_STR(name, member)                                                                        \
  ConfigField{name, [](const RunConfig& c) { return c.member; },                                          \
              [](RunConfig& c, const std::string& v) { c.member = v; }}
  static const std::vector<ConfigField> fields = {
      ADAGRAPH_INT("iterations", train.iterations),
      ADAGRAPH_DBL("learning-rate", train.learning_rate),
      ADAGRAPH_DBL("gamma", train.gamma),
      ADAGRAPH_DBL("xi", train.xi),
      ADAGRAPH_DBL("eta", train.eta),
      ADAGRAPH_INT("t-layers", train.t_layers),
      ADAGRAPH_INT("k-order", train.k_order),
      ADAGRAPH_INT("embed-dim", train.embed_dim),
      ADAGRAPH_INT("clusters", train.clusters),
      ADAGRAPH_INT("warmup", train.warmup),
      ADAGRAPH_INT("p-interval", train.p_interval),
      ADAGRAPH_INT("structure-interval", train.structure_interval),
      ADAGRAPH_INT("seed", train.seed),
      ADAGRAPH_BOOL("normalize-embeddings", train.normalize_embeddings),
      ADAGRAPH_BOOL("loss-sum-form", train.loss_sum_form),
      ADAGRAPH_BOOL("center-features", train.center_features),
      ADAGRAPH_BOOL("ablate-v1", train.ablate_v1),
      ADAGRAPH_BOOL("ablate-v2", train.ablate_v2),
      ADAGRAPH_BOOL("ablate-v3", train.ablate_v3),
      ADAGRAPH_DBL("rho", train.rho),
      ADAGRAPH_DBL("self-loop", train.self_loop),
      ADAGRAPH_INT("n-superpixels", n_superpixels),
      ADAGRAPH_DBL("compactness", compactness),
      ADAGRAPH_INT("slic-iters", slic_iters),
      ADAGRAPH_INT("pca-components", pca_components),
      ADAGRAPH_INT("t-hop", t_hop),
      ADAGRAPH_INT("max-nodes", max_nodes),
      ADAGRAPH_BOOL("rescale", rescale),
      ADAGRAPH_STR("cube", cube),
      ADAGRAPH_STR("sidecar", sidecar),
      ADAGRAPH_STR("gt", gt),
      ADAGRAPH_STR("outdir", outdir),
      ADAGRAPH_BOOL("dump-embedding", dump_embedding),
  };
#undef ADAGRAPH_INT
#undef ADAGRAPH_DBL
#undef ADAGRAPH_BOOL
#undef ADAGRAPH_STR
  return fields;
}

inline void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& f : config_fields())
    if (f.key == key) {
      f.set(cfg, value);
      return;
    }
  throw Error(ErrorCode::ConfigInvalid, "unknown config key '" + key + "'");
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Flat `key = value` text; '#' starts a comment.
inline void apply_config_text(RunConfig& cfg, std::istream& in) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ConfigInvalid, "line " + std::to_string(line_no) + ": expected key=value");
    set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

inline void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path + "'");
  apply_config_text(cfg, in);
}

/// Resolved configuration in the same key=value format it is read from.
inline std::string config_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& f : config_fields()) out += f.key + "=" + f.get(cfg) + "\n";
  return out;
}

}  // namespace adagraph
