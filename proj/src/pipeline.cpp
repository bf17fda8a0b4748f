#include "jgmatch/pipeline.hpp"

#include "jgmatch/error.hpp"

namespace jgmatch {

FeatureGrid describe_image(const GrayImage& image, const RunConfig& config,
                           std::string image_id) {
  const FeatureGrid raw = builtin_dense_descriptor(image, config.descriptor(), std::move(image_id));
  return l2_normalize_channels(raw, config.epsilon).grid;
}

NormalizedGrid prepare_grid(const FeatureGrid& grid, const RunConfig& config) {
  return l2_normalize_channels(resample_grid(grid, config.grid_width, config.grid_height),
                               config.epsilon);
}

PairOutcome match_grids(const FeatureGrid& grid1, const FeatureGrid& grid2,
                        const RunConfig& config, std::string pair_id) {
  config.validate();
  if (grid1.channels() != grid2.channels()) {
    throw Error(ErrorKind::Dimension, "feature grids have " + std::to_string(grid1.channels()) +
                                          " and " + std::to_string(grid2.channels()) +
                                          " channels");
  }
  const FeatureGrid f1 = prepare_grid(grid1, config).grid;
  const FeatureGrid f2 = prepare_grid(grid2, config).grid;

  const JointAffinity w = joint_affinity(f1, f2, config.affinity());
  SpectralEmbedding embedding = eig_topm(w, config.eig());
  MatchSet matches =
      embed_match(embedding, geometry_of(f1), geometry_of(f2), config.matching(), pair_id);
  if (matches.pairs.size() < 4) {
    throw Error(ErrorKind::Insufficient, "only " + std::to_string(matches.pairs.size()) +
                                             " embedding matches survived filtering");
  }
  const Homography initial = estimate_homography_dlt(matches);
  RefineResult refined = refine_homography(initial, matches, config.refine());
  return {std::move(embedding), std::move(matches), initial, std::move(refined)};
}

}  // namespace jgmatch
