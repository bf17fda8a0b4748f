#include "jgmatch/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "jgmatch/error.hpp"

namespace jgmatch {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::Parameter, "invalid config: " + message);
}

}  // namespace

void RunConfig::validate() const {
  require(grid_width >= 1 && grid_height >= 1, "grid dimensions must be positive");
  require(m >= 1, "m must be at least 1");
  require(triviality_threshold > 0.0, "triviality_threshold must be positive");
  require(ratio_threshold > 0.0 && ratio_threshold <= 1.0, "ratio_threshold must lie in (0, 1]");
  require(huber_delta > 0.0, "huber_delta must be positive");
  require(refine_max_iters >= 1, "refine_max_iters must be at least 1");
  require(refine_tol >= 0.0, "refine_tol must be non-negative");
  require(!deltas.empty(), "deltas must not be empty");
  require(std::all_of(deltas.begin(), deltas.end(), [](double d) { return d > 0.0; }),
          "deltas must be positive");
  require(std::is_sorted(deltas.begin(), deltas.end()), "deltas must be ascending");
  require(patch_radius >= 0, "patch_radius must be non-negative");
  require(orientation_bins >= 4, "orientation_bins must be at least 4");
  require(epsilon > 0.0, "epsilon must be positive");
}

DescriptorParams RunConfig::descriptor() const {
  return {grid_width, grid_height, patch_radius, orientation_bins};
}

AffinityOptions RunConfig::affinity() const {
  AffinityOptions options;
  options.variant = distance;
  options.epsilon = epsilon;
  return options;
}

EigOptions RunConfig::eig() const { return {m, triviality_threshold}; }

MatchOptions RunConfig::matching() const { return {ratio_threshold, mutual}; }

RefineOptions RunConfig::refine() const { return {huber_delta, refine_max_iters, refine_tol}; }

const char* to_string(DistanceVariant variant) noexcept {
  return variant == DistanceVariant::SquaredCosine ? "squared_cosine"
                                                   : "squared_euclidean_normalized";
}

DistanceVariant parse_distance_variant(const std::string& name) {
  if (name == "squared_cosine") return DistanceVariant::SquaredCosine;
  if (name == "squared_euclidean_normalized") return DistanceVariant::SquaredEuclideanNormalized;
  throw Error(ErrorKind::Parameter, "unknown distance variant '" + name + "'");
}

const char* to_string(DeltaNorm norm) noexcept {
  return norm == DeltaNorm::Euclidean ? "euclidean" : "chebyshev";
}

DeltaNorm parse_delta_norm(const std::string& name) {
  if (name == "euclidean") return DeltaNorm::Euclidean;
  if (name == "chebyshev") return DeltaNorm::Chebyshev;
  throw Error(ErrorKind::Parameter, "unknown delta norm '" + name + "'");
}

std::string config_to_json(const RunConfig& c) {
  const nlohmann::ordered_json j = {
      {"grid_width", c.grid_width},
      {"grid_height", c.grid_height},
      {"m", c.m},
      {"triviality_threshold", c.triviality_threshold},
      {"distance", to_string(c.distance)},
      {"ratio_threshold", c.ratio_threshold},
      {"mutual", c.mutual},
      {"huber_delta", c.huber_delta},
      {"refine_max_iters", c.refine_max_iters},
      {"refine_tol", c.refine_tol},
      {"deltas", c.deltas},
      {"delta_norm", to_string(c.delta_norm)},
      {"seed", c.seed},
      {"patch_radius", c.patch_radius},
      {"orientation_bins", c.orientation_bins},
      {"epsilon", c.epsilon},
      {"input", c.input},
      {"output", c.output},
  };
  return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Format, "config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "grid_width") c.grid_width = value.get<int>();
      else if (key == "grid_height") c.grid_height = value.get<int>();
      else if (key == "m") c.m = value.get<int>();
      else if (key == "triviality_threshold") c.triviality_threshold = value.get<double>();
      else if (key == "distance") c.distance = parse_distance_variant(value.get<std::string>());
      else if (key == "ratio_threshold") c.ratio_threshold = value.get<double>();
      else if (key == "mutual") c.mutual = value.get<bool>();
      else if (key == "huber_delta") c.huber_delta = value.get<double>();
      else if (key == "refine_max_iters") c.refine_max_iters = value.get<int>();
      else if (key == "refine_tol") c.refine_tol = value.get<double>();
      else if (key == "deltas") c.deltas = value.get<std::vector<double>>();
      else if (key == "delta_norm") c.delta_norm = parse_delta_norm(value.get<std::string>());
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "patch_radius") c.patch_radius = value.get<int>();
      else if (key == "orientation_bins") c.orientation_bins = value.get<int>();
      else if (key == "epsilon") c.epsilon = value.get<double>();
      else if (key == "input") c.input = value.get<std::string>();
      else if (key == "output") c.output = value.get<std::string>();
      else throw Error(ErrorKind::Parameter, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("config value has wrong type: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return config_from_json(buffer.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void save_config(const RunConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write config " + path.string());
  out << config_to_json(config);
}

}  // namespace jgmatch
