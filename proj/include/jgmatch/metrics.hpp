#pragma once

#include <span>

#include "jgmatch/homography.hpp"

namespace jgmatch {

/// Neighborhood test used by the delta match rate.
enum class DeltaNorm {
  /// |est - gt|_2 <= delta.
  Euclidean,
  /// Square window: max(|dx|, |dy|) <= delta.
  Chebyshev,
};

/// Mean (un-squared) Euclidean distance between corresponding points.
double mae(std::span<const Point2> estimated, std::span<const Point2> ground_truth);

/// Percentage of points within delta pixels of their ground truth.
double delta_match_rate(std::span<const Point2> estimated, std::span<const Point2> ground_truth,
                        double delta, DeltaNorm norm = DeltaNorm::Euclidean);

}  // namespace jgmatch
