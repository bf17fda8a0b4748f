#pragma once

#include <string>

#include "jgmatch/config.hpp"
#include "jgmatch/estimation.hpp"
#include "jgmatch/matching.hpp"
#include "jgmatch/spectral.hpp"

namespace jgmatch {

/// Built-in descriptor at the working grid, L2-normalized per cell.
FeatureGrid describe_image(const GrayImage& image, const RunConfig& config,
                           std::string image_id = {});

/// Resamples an arbitrary feature grid to the working grid and normalizes it.
/// Idempotent on grids that are already prepared.
NormalizedGrid prepare_grid(const FeatureGrid& grid, const RunConfig& config);

struct PairOutcome {
  SpectralEmbedding embedding;
  MatchSet matches;
  Homography initial;
  RefineResult refined;

  const Homography& homography() const { return refined.h; }
};

/// Joint affinity, spectral embedding, embedding matches, DLT and robust
/// refinement for one pair of feature grids.
PairOutcome match_grids(const FeatureGrid& grid1, const FeatureGrid& grid2,
                        const RunConfig& config, std::string pair_id = {});

}  // namespace jgmatch
