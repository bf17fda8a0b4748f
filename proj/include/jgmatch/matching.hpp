#pragma once

#include <string>
#include <vector>

#include "jgmatch/homography.hpp"
#include "jgmatch/spectral.hpp"

namespace jgmatch {

/// Maps grid cells to pixel coordinates of their centers.
struct GridGeometry {
  int grid_width = 0;
  int grid_height = 0;
  int image_width = 0;
  int image_height = 0;

  int cell_count() const noexcept { return grid_width * grid_height; }
  /// ((c + 0.5) * W / gw - 0.5, (r + 0.5) * H / gh - 0.5) for linear index
  /// r * gw + c.
  Point2 cell_center(int index) const;
  bool contains(const Point2& p) const;
};

GridGeometry geometry_of(const FeatureGrid& grid);

struct Match {
  Point2 p1;
  Point2 p2;
  /// Embedding distance; lower is better.
  double score = 0.0;
  int cell1 = -1;
  int cell2 = -1;
};

struct MatchSet {
  std::string pair_id;
  std::vector<Match> pairs;

  std::vector<Point2> points1() const;
  std::vector<Point2> points2() const;
};

struct MatchOptions {
  /// Keep a match only when nearest / second-nearest < ratio_threshold;
  /// 1 accepts every nearest neighbor.
  double ratio_threshold = 0.9;
  bool mutual = true;
};

/// Nearest-neighbor matching of image-1 embedding rows against image-2 rows
/// by Euclidean distance in the m-dimensional embedding.
MatchSet embed_match(const SpectralEmbedding& embedding, const GridGeometry& geometry1,
                     const GridGeometry& geometry2, const MatchOptions& options = {},
                     std::string pair_id = {});

/// Writes one "x1 y1 x2 y2 score" line per match.
void write_matches(const MatchSet& matches, const std::filesystem::path& path);

}  // namespace jgmatch
