#pragma once

#include <Eigen/Dense>

#include <span>

#include "jgmatch/feature_grid.hpp"

namespace jgmatch {

/// How a cosine distance d enters the exponent of the affinity kernel.
enum class DistanceVariant {
  /// exp(-d^2), the literal reading of the kernel.
  SquaredCosine,
  /// exp(-||u - v||^2) for unit vectors, i.e. exp(-2 d).
  SquaredEuclideanNormalized,
};

struct AffinityOptions {
  DistanceVariant variant = DistanceVariant::SquaredCosine;
  /// Distance assigned when either vector has norm below epsilon.
  double degenerate_distance = 1.0;
  double epsilon = 1e-12;
};

struct CosineDistance {
  double value;
  bool degenerate;
};

/// 1 - u.v / (|u| |v|), clamped to [0, 2].
CosineDistance cosine_distance(std::span<const double> u, std::span<const double> v,
                               const AffinityOptions& options = {});

/// Kernel value for one cosine distance under the configured variant.
double affinity_from_distance(double distance, DistanceVariant variant);

Eigen::MatrixXd intra_affinity(const FeatureGrid& grid, const AffinityOptions& options = {});

Eigen::MatrixXd cross_affinity(const FeatureGrid& first, const FeatureGrid& second,
                               const AffinityOptions& options = {});

/// Symmetric block matrix [W1 C; C^T W2] over the cells of both grids.
struct JointAffinity {
  int n1 = 0;
  int n2 = 0;
  Eigen::MatrixXd matrix;

  int size() const noexcept { return n1 + n2; }
};

JointAffinity joint_affinity(const FeatureGrid& first, const FeatureGrid& second,
                             const AffinityOptions& options = {});

}  // namespace jgmatch
