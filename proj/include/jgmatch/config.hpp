#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "jgmatch/affinity.hpp"
#include "jgmatch/estimation.hpp"
#include "jgmatch/feature_grid.hpp"
#include "jgmatch/matching.hpp"
#include "jgmatch/metrics.hpp"
#include "jgmatch/spectral.hpp"

namespace jgmatch {

/// Every tunable of the pipeline. Round-trips losslessly through JSON.
struct RunConfig {
  int grid_width = 28;
  int grid_height = 28;
  int m = 30;
  double triviality_threshold = 1e-3;
  DistanceVariant distance = DistanceVariant::SquaredCosine;
  double ratio_threshold = 0.9;
  bool mutual = true;
  double huber_delta = 2.0;
  int refine_max_iters = 50;
  double refine_tol = 1e-10;
  std::vector<double> deltas{5.0, 10.0, 15.0, 20.0};
  DeltaNorm delta_norm = DeltaNorm::Euclidean;
  std::uint64_t seed = 0;
  int patch_radius = 16;
  int orientation_bins = 8;
  double epsilon = 1e-12;
  std::string input;
  std::string output;

  /// Throws Parameter when a value violates an operation's precondition.
  void validate() const;

  DescriptorParams descriptor() const;
  AffinityOptions affinity() const;
  EigOptions eig() const;
  MatchOptions matching() const;
  RefineOptions refine() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::string config_to_json(const RunConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_json(const std::string& text);

RunConfig load_config(const std::filesystem::path& path);
void save_config(const RunConfig& config, const std::filesystem::path& path);

const char* to_string(DistanceVariant variant) noexcept;
DistanceVariant parse_distance_variant(const std::string& name);
const char* to_string(DeltaNorm norm) noexcept;
DeltaNorm parse_delta_norm(const std::string& name);

}  // namespace jgmatch
