// Command-line driver: describe (image -> FGRD), match (two grids ->
// homography + correspondences), eval (manifest -> report tables), split
// (manifest -> train/validation/test lists).
//
// Exit codes: 0 success, 1 usage, 2 I/O, 3 validation/dimension,
// 4 numerical/degeneracy, 5 too few correspondences.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jgmatch/config.hpp"
#include "jgmatch/dataset.hpp"
#include "jgmatch/error.hpp"
#include "jgmatch/evaluation.hpp"
#include "jgmatch/image_io.hpp"
#include "jgmatch/pipeline.hpp"

namespace fs = std::filesystem;
using namespace jgmatch;

namespace {

struct ConfigFlags {
  std::string config_path;
  std::string dump_config;
  std::optional<int> grid_width, grid_height, m, refine_max_iters, patch_radius,
      orientation_bins;
  std::optional<double> triviality_threshold, ratio_threshold, huber_delta, refine_tol, epsilon;
  std::optional<std::string> distance, delta_norm;
  std::optional<bool> mutual;
  std::optional<std::uint64_t> seed;
  std::vector<double> deltas;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "JSON config supplying defaults")
        ->check(CLI::ExistingFile);
    app.add_option("--dump-config", dump_config, "Write the effective config as JSON");
    app.add_option("--grid-width", grid_width, "Working grid width in cells");
    app.add_option("--grid-height", grid_height, "Working grid height in cells");
    app.add_option("--m", m, "Embedding dimension");
    app.add_option("--triviality-threshold", triviality_threshold,
                   "Coefficient-of-variation cutoff for trivial eigenvectors");
    app.add_option("--distance", distance, "squared_cosine | squared_euclidean_normalized");
    app.add_option("--ratio-threshold", ratio_threshold, "Nearest/second-nearest ratio");
    app.add_option("--mutual", mutual, "Require mutual nearest neighbors (true/false)");
    app.add_option("--huber-delta", huber_delta, "Huber threshold in pixels");
    app.add_option("--refine-max-iters", refine_max_iters, "Refinement iteration cap");
    app.add_option("--refine-tol", refine_tol, "Relative objective decrease to stop");
    app.add_option("--deltas", deltas, "Match-rate thresholds in pixels");
    app.add_option("--delta-norm", delta_norm, "euclidean | chebyshev");
    app.add_option("--seed", seed, "Seed for dataset splitting");
    app.add_option("--patch-radius", patch_radius, "Built-in descriptor patch radius");
    app.add_option("--orientation-bins", orientation_bins, "Built-in descriptor histogram bins");
    app.add_option("--epsilon", epsilon, "Zero-norm guard for feature cells");
  }

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (grid_width) c.grid_width = *grid_width;
    if (grid_height) c.grid_height = *grid_height;
    if (m) c.m = *m;
    if (triviality_threshold) c.triviality_threshold = *triviality_threshold;
    if (distance) c.distance = parse_distance_variant(*distance);
    if (ratio_threshold) c.ratio_threshold = *ratio_threshold;
    if (mutual) c.mutual = *mutual;
    if (huber_delta) c.huber_delta = *huber_delta;
    if (refine_max_iters) c.refine_max_iters = *refine_max_iters;
    if (refine_tol) c.refine_tol = *refine_tol;
    if (!deltas.empty()) c.deltas = deltas;
    if (delta_norm) c.delta_norm = parse_delta_norm(*delta_norm);
    if (seed) c.seed = *seed;
    if (patch_radius) c.patch_radius = *patch_radius;
    if (orientation_bins) c.orientation_bins = *orientation_bins;
    if (epsilon) c.epsilon = *epsilon;
    return c;
  }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create directory " + dir.string());
}

int run_describe(const RunConfig& config) {
  if (config.input.empty()) throw Error(ErrorKind::Usage, "describe needs an input image");
  const fs::path input = config.input;
  const fs::path output = config.output.empty() ? fs::path(input).replace_extension(".fgrd")
                                                : fs::path(config.output);
  const GrayImage image = load_image(input);
  const FeatureGrid grid = describe_image(image, config, input.filename().string());
  save_feature_grid(grid, output);
  std::cout << "grid " << grid.grid_width() << "x" << grid.grid_height() << "x"
            << grid.channels() << " -> " << output.string() << "\n";
  return 0;
}

int run_match(const RunConfig& config, const std::string& grid1, const std::string& grid2,
              const std::string& embedding_out) {
  const fs::path out_dir = config.output.empty() ? fs::path(".") : fs::path(config.output);
  const FeatureGrid g1 = load_grid_for(grid1, config);
  const FeatureGrid g2 = load_grid_for(grid2, config);
  const PairOutcome outcome = match_grids(g1, g2, config);
  ensure_directory(out_dir);
  write_homography(outcome.homography(), out_dir / "homography.txt");
  write_matches(outcome.matches, out_dir / "matches.txt");
  if (!embedding_out.empty()) save_embedding(outcome.embedding, embedding_out);
  std::cout << "matches " << outcome.matches.pairs.size() << "\n"
            << "objective " << outcome.refined.initial_objective << " -> "
            << outcome.refined.final_objective << " (" << outcome.refined.iterations
            << " iterations)\n"
            << format_homography(outcome.homography());
  if (outcome.refined.status == RefineStatus::NumericalFailure) {
    std::cerr << "warning: " << outcome.refined.diagnostic << "\n";
  }
  return 0;
}

int run_eval_command(const RunConfig& config) {
  if (config.input.empty()) throw Error(ErrorKind::Usage, "eval needs a manifest");
  const auto entries = load_manifest(config.input);
  if (entries.empty()) throw Error(ErrorKind::Usage, "manifest " + config.input + " is empty");
  LoadedDataset dataset = load_dataset(entries, config);
  const EvalReport report = run_eval(dataset.items, config, std::move(dataset.failures));

  const fs::path out_dir = config.output.empty() ? fs::path(".") : fs::path(config.output);
  ensure_directory(out_dir);
  const std::string table = format_report_table(report);
  write_text(out_dir / "report.tsv", table);
  write_text(out_dir / "pairs.tsv", format_pair_table(report));
  write_text(out_dir / "report.json", report_to_json(report));
  std::cout << table << "pairs scored " << report.succeeded << ", excluded " << report.excluded
            << "\n";
  for (const auto& r : report.pairs) {
    if (!r.ok) std::cerr << "failed " << r.pair_id << " [" << r.failure_code << "]: " << r.message << "\n";
  }
  if (report.succeeded > 0) return 0;
  return 4;
}

int run_split(const RunConfig& config) {
  if (config.input.empty()) throw Error(ErrorKind::Usage, "split needs a manifest");
  const auto entries = load_manifest(config.input);
  std::vector<std::string> ids;
  for (const auto& e : entries) {
    ids.push_back(e.kind == ManifestEntry::Kind::Annotation ? e.annotation.string()
                                                             : e.homography.string());
  }
  const DatasetSplit split = split_dataset(ids, config.seed);
  const fs::path out_dir = config.output.empty() ? fs::path(".") : fs::path(config.output);
  ensure_directory(out_dir);
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += x + "\n";
    return s;
  };
  write_text(out_dir / "train.txt", join(split.train));
  write_text(out_dir / "validation.txt", join(split.validation));
  write_text(out_dir / "test.txt", join(split.test));
  std::cout << "train " << split.train.size() << ", validation " << split.validation.size()
            << ", test " << split.test.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint graph embedding matcher for disparate image pairs"};
  app.require_subcommand(1);
  ConfigFlags flags;

  std::string input, output, grid1, grid2, embedding_out;

  auto* describe = app.add_subcommand("describe", "Compute the built-in dense descriptor grid");
  describe->add_option("image", input, "Input image (PNG or PNM)")->required();
  describe->add_option("-o,--output", output, "Output FGRD path");
  flags.attach(*describe);

  auto* match = app.add_subcommand("match", "Match two feature grids and estimate H");
  match->add_option("grid1", grid1, "First FGRD file or image")->required();
  match->add_option("grid2", grid2, "Second FGRD file or image")->required();
  match->add_option("-o,--output", output, "Output directory");
  match->add_option("--dump-embedding", embedding_out, "Write the spectral embedding (JEMB)");
  flags.attach(*match);

  auto* eval = app.add_subcommand("eval", "Evaluate a dataset manifest");
  eval->add_option("manifest", input, "Dataset manifest")->required();
  eval->add_option("-o,--output", output, "Output directory for reports");
  flags.attach(*eval);

  auto* split = app.add_subcommand("split", "Seeded 70/10/20 split of a manifest");
  split->add_option("manifest", input, "Dataset manifest")->required();
  split->add_option("-o,--output", output, "Output directory for split lists");
  flags.attach(*split);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    RunConfig config = flags.resolve();
    if (!input.empty()) config.input = input;
    if (!output.empty()) config.output = output;
    config.validate();
    if (!flags.dump_config.empty()) save_config(config, flags.dump_config);

    if (describe->parsed()) return run_describe(config);
    if (match->parsed()) return run_match(config, grid1, grid2, embedding_out);
    if (eval->parsed()) return run_eval_command(config);
    if (split->parsed()) return run_split(config);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
