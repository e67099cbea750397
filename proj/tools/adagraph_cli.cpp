// Command-line front end: cluster a cube, synthesize a fixture, score label maps.

#include <adagraph.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace adagraph;

namespace {

enum ExitCode { kOk = 0, kIoError = 1, kConfigError = 2, kDiverged = 3, kOtherError = 4 };

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
    case ErrorCode::SizeMismatch:
    case ErrorCode::UnsupportedDtype:
    case ErrorCode::MalformedSidecar:
      return kIoError;
    case ErrorCode::ConfigInvalid:
    case ErrorCode::TooManySuperpixels:
    case ErrorCode::TooFewDistinctPoints:
      return kConfigError;
    case ErrorCode::NonFiniteGradient:
      return kDiverged;
    default:
      return kOtherError;
  }
}

std::string default_sidecar(const std::string& cube) { return fs::path(cube).replace_extension(".json").string(); }

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << text;
}

/// Loads a label grid from .csv (row,col,label), .pgm, or raw uint16 (needs dims).
LabelImage load_label_map(const std::string& path, int height, int width) {
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".csv") return read_label_csv(path);
  if (ext == ".pgm") return read_pgm(path);
  if (height <= 0 || width <= 0)
    throw Error(ErrorCode::ConfigInvalid, "raw label file '" + path + "' needs --height and --width");
  const GroundTruthMap g = load_ground_truth(path, height, width);
  return {g.height, g.width, g.labels};
}

struct ClusterArgs {
  std::string config_path;
  std::string preset;
  std::map<std::string, std::string> overrides;  // backing storage for per-key flags
  std::map<std::string, CLI::Option*> options;
};

int run_cluster(const ClusterArgs& args) {
  RunConfig cfg;
  if (!args.preset.empty()) apply_preset(cfg, args.preset);
  if (!args.config_path.empty()) apply_config_file(cfg, args.config_path);
  for (const auto& [key, opt] : args.options) {
    if (opt->count() == 0) continue;
    std::string value = args.overrides.at(key);
    if (value.empty()) value = "true";
    set_config_value(cfg, key, value);
  }
  if (cfg.cube.empty()) throw Error(ErrorCode::ConfigInvalid, "--cube is required");
  if (cfg.sidecar.empty()) cfg.sidecar = default_sidecar(cfg.cube);

  const HsiCube cube = load_cube(cfg.cube, cfg.sidecar);
  std::optional<GroundTruthMap> gt;
  if (!cfg.gt.empty()) gt = load_ground_truth(cfg.gt, cube.height, cube.width);
  if (cfg.train.clusters == 0) {
    if (!gt) throw Error(ErrorCode::ConfigInvalid, "--clusters is required without ground truth");
    cfg.train.clusters = gt->classes();
  }

  fs::create_directories(cfg.outdir);
  const PipelineResult res = run_pipeline(cube, gt, cfg);
  const TrainResult& tr = res.training;
  const auto& seg = res.sp.segmentation;

  write_trace_csv(join(cfg.outdir, "losses.csv"), tr.trace);
  write_edits_csv(join(cfg.outdir, "edits.csv"), tr.edits);
  write_pgm(join(cfg.outdir, "labels.pgm"), cube.height, cube.width, res.pixel_labels);
  write_label_csv(join(cfg.outdir, "labels.csv"), cube.height, cube.width, res.pixel_labels);
  write_pgm(join(cfg.outdir, "segmentation.pgm"), seg.height, seg.width, seg.assignment, true);
  write_label_csv(join(cfg.outdir, "segmentation.csv"), seg.height, seg.width, seg.assignment, "superpixel");
  save_params(join(cfg.outdir, "params.bin"), join(cfg.outdir, "params.json"), tr.params,
              cfg.train.objective().filter(tr.params.mu_raw).mu());
  if (cfg.dump_embedding) write_matrix_csv(join(cfg.outdir, "embedding.csv"), tr.z);
  if (res.metrics) {
    write_text(join(cfg.outdir, "metrics.json"), metrics_json(*res.metrics));
    write_text(join(cfg.outdir, "metrics.csv"), metrics_csv_header() + metrics_csv_row(*res.metrics));
    write_text(join(cfg.outdir, "metrics_argmax.json"), metrics_json(*res.argmax_metrics));
  }

  std::string manifest = config_text(cfg);
  manifest += "superpixels=" + std::to_string(seg.count) + "\n";
  manifest += "initial_edges=" + std::to_string(res.sp.graph.edge_count()) + "\n";
  manifest += "final_edges=" + std::to_string(tr.graph.edge_count()) + "\n";
  manifest += "iterations_run=" + std::to_string(tr.trace.size()) + "\n";
  manifest += "label_agreement=" + detail::format_double(tr.label_agreement) + "\n";
  if (res.sp.pca) manifest += "pca_explained_ratio=" + detail::format_double(res.sp.pca->explained_ratio) + "\n";
  manifest += std::string("diverged=") + (tr.diverged ? "true" : "false") + "\n";
  write_text(join(cfg.outdir, "manifest.txt"), manifest);

  if (tr.diverged) {
    std::cerr << "error: divergence: objective exceeded " << cfg.train.divergence_limit << " or became non-finite at iteration "
              << tr.trace.back().iteration << "\n";
    return kDiverged;
  }
  if (res.metrics)
    std::cout << "OA=" << res.metrics->oa << " kappa=" << res.metrics->kappa << " NMI=" << res.metrics->nmi
              << " ARI=" << res.metrics->ari << " purity=" << res.metrics->purity << "\n";
  std::cout << "superpixels=" << seg.count << " wrote " << cfg.outdir << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive-filter graph clustering for hyperspectral images"};
  app.require_subcommand(1);

  ClusterArgs cluster_args;
  auto* cluster = app.add_subcommand("cluster", "Run the full clustering pipeline on a cube");
  cluster->add_option("--config", cluster_args.config_path, "key=value config file (flags override it)");
  cluster->add_option("--preset", cluster_args.preset, "salinas | pu | trento parameter preset");
  for (const auto& field : config_fields()) {
    std::string& slot = cluster_args.overrides[field.key];
    CLI::Option* opt = cluster->add_option("--" + field.key, slot, "overrides " + field.key);
    opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    const std::string current = field.get(RunConfig{});
    if (current == "true" || current == "false") opt->expected(0, 1);
    cluster_args.options[field.key] = opt;
  }

  SynthSpec synth_spec;
  std::string synth_out = "synth";
  auto* synth = app.add_subcommand("synth", "Write a blocky synthetic cube with ground truth");
  synth->add_option("--out", synth_out, "output prefix: <out>.raw, <out>.json, <out>_gt.raw");
  synth->add_option("--height", synth_spec.height);
  synth->add_option("--width", synth_spec.width);
  synth->add_option("--bands", synth_spec.bands);
  synth->add_option("--classes", synth_spec.classes);
  synth->add_option("--noise", synth_spec.noise, "per-band Gaussian sigma");
  synth->add_option("--separation", synth_spec.separation, "minimum distance between class mean spectra");
  synth->add_option("--seed", synth_spec.seed);

  std::string pred_path;
  std::string gt_path;
  std::string metrics_out;
  int height = 0;
  int width = 0;
  auto* metrics = app.add_subcommand("metrics", "Score a predicted label map against ground truth");
  metrics->add_option("--pred", pred_path, "predicted map (.csv, .pgm or raw uint16)")->required();
  metrics->add_option("--gt", gt_path, "ground truth (.csv, .pgm or raw uint16, 0 = unlabeled)")->required();
  metrics->add_option("--height", height, "rows, for raw inputs");
  metrics->add_option("--width", width, "columns, for raw inputs");
  metrics->add_option("--out", metrics_out, "metrics.json path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*cluster) return run_cluster(cluster_args);
    if (*synth) {
      const SynthScene scene = synthesize(synth_spec);
      const fs::path prefix(synth_out);
      if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
      save_cube(synth_out + ".raw", synth_out + ".json", scene.cube);
      save_ground_truth(synth_out + "_gt.raw", scene.gt);
      std::cout << "wrote " << synth_out << ".raw, " << synth_out << ".json, " << synth_out << "_gt.raw\n";
      return kOk;
    }
    if (*metrics) {
      LabelImage pred = load_label_map(pred_path, height, width);
      LabelImage truth = load_label_map(gt_path, height > 0 ? height : pred.height, width > 0 ? width : pred.width);
      if (pred.height != truth.height || pred.width != truth.width)
        throw Error(ErrorCode::SizeMismatch, "predicted and ground-truth maps differ in size");
      const MetricsReport r = compute_metrics(pred.labels, GroundTruthMap{truth.height, truth.width, truth.labels});
      if (metrics_out.empty())
        std::cout << metrics_json(r);
      else
        write_text(metrics_out, metrics_json(r));
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: Io: " << e.what() << "\n";
    return kIoError;
  }
  return kOtherError;
}
