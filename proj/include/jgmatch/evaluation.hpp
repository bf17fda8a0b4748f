#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "jgmatch/config.hpp"
#include "jgmatch/dataset.hpp"

namespace jgmatch {

/// One pair ready for scoring: feature grids for both images and
/// ground-truth keypoints.
struct EvalItem {
  std::string pair_id;
  FeatureGrid grid1;
  FeatureGrid grid2;
  std::vector<Point2> p1;
  std::vector<Point2> p2;
};

struct PairResult {
  std::string pair_id;
  bool ok = false;
  /// ErrorKind name for failed pairs.
  std::string failure_code;
  std::string message;
  std::size_t points = 0;
  std::size_t matches = 0;
  double mae = 0.0;
  /// Mean squared reprojection error, the training objective.
  double loss = 0.0;
  /// MAE of the identity homography on the same keypoints.
  double baseline_mae = 0.0;
  /// Aligned with EvalReport::deltas.
  std::vector<double> delta_rates;
  std::vector<std::size_t> delta_hits;
  double distance_sum = 0.0;
  Homography homography;
};

struct MetricSummary {
  double mae = 0.0;
  std::vector<double> delta_rates;
};

struct EvalReport {
  std::vector<double> deltas;
  DeltaNorm delta_norm = DeltaNorm::Euclidean;
  /// Ordered by pair_id.
  std::vector<PairResult> pairs;
  std::size_t succeeded = 0;
  std::size_t excluded = 0;
  /// Unweighted mean over successful pairs; the headline numbers.
  std::optional<MetricSummary> mean;
  /// All keypoints of successful pairs pooled before averaging.
  std::optional<MetricSummary> pooled;
};

/// Builds the scoring item for a keypoint annotation.
EvalItem make_eval_item(const KeypointAnnotation& annotation, FeatureGrid grid1,
                        FeatureGrid grid2);

/// Ground truth from a homography: P2 = H P1, keeping points whose
/// projection is finite and lands inside image 2.
EvalItem make_eval_item(std::string pair_id, FeatureGrid grid1, FeatureGrid grid2,
                        const std::vector<Point2>& p1, const Homography& ground_truth);

/// Scores already-computed estimates of P2 against ground truth.
PairResult score_pair(const std::string& pair_id, const std::vector<Point2>& estimated,
                      const std::vector<Point2>& ground_truth, const std::vector<Point2>& p1,
                      const std::vector<double>& deltas, DeltaNorm norm);

/// Orders pairs by pair_id and recomputes counts and both aggregates from
/// the per-pair rows.
void aggregate(EvalReport& report);

/// Runs the full pipeline on every item and aggregates. Items that fail are
/// kept as failure rows and excluded from the aggregates, alongside any
/// failures passed in from loading.
EvalReport run_eval(const std::vector<EvalItem>& items, const RunConfig& config,
                    std::vector<PairResult> load_failures = {});

/// Loads a feature grid from an FGRD file (".fgrd") or computes the built-in
/// descriptor for an image file.
FeatureGrid load_grid_for(const std::filesystem::path& path, const RunConfig& config);

struct LoadedDataset {
  std::vector<EvalItem> items;
  std::vector<PairResult> failures;
};

/// Resolves every manifest entry; entries that fail to load become failure
/// rows rather than aborting the run.
LoadedDataset load_dataset(const std::vector<ManifestEntry>& entries, const RunConfig& config);

/// Table layout: one row per "δ ≤ d" and a final MAE row; columns are the
/// per-pair mean and the pooled value. Tab-separated.
std::string format_report_table(const EvalReport& report);
/// One row per pair with status, counts, rates and MAE. Tab-separated.
std::string format_pair_table(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

}  // namespace jgmatch
