#include "jgmatch/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "jgmatch/error.hpp"

namespace jgmatch {

namespace {

struct UnitRows {
  Eigen::MatrixXd rows;  // cells x channels, unit length or zero
  std::vector<bool> degenerate;
};

UnitRows unit_rows(const FeatureGrid& grid, double epsilon) {
  const int n = grid.cell_count();
  UnitRows out{Eigen::MatrixXd(n, grid.channels()), std::vector<bool>(n, false)};
  for (int i = 0; i < n; ++i) {
    const auto cell = grid.cell(i);
    const Eigen::Map<const Eigen::VectorXd> v(cell.data(),
                                              static_cast<Eigen::Index>(cell.size()));
    const double norm = v.norm();
    if (norm < epsilon) {
      out.rows.row(i).setZero();
      out.degenerate[i] = true;
    } else {
      out.rows.row(i) = v.transpose() / norm;
    }
  }
  return out;
}

double kernel(double similarity, bool degenerate, const AffinityOptions& options) {
  const double distance =
      degenerate ? options.degenerate_distance : std::clamp(1.0 - similarity, 0.0, 2.0);
  return affinity_from_distance(distance, options.variant);
}

}  // namespace

CosineDistance cosine_distance(std::span<const double> u, std::span<const double> v,
                               const AffinityOptions& options) {
  if (u.size() != v.size()) {
    throw Error(ErrorKind::Dimension, "cosine distance of vectors with lengths " +
                                          std::to_string(u.size()) + " and " +
                                          std::to_string(v.size()));
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  const double nu = std::sqrt(uu);
  const double nv = std::sqrt(vv);
  if (nu < options.epsilon || nv < options.epsilon) {
    return {options.degenerate_distance, true};
  }
  return {std::clamp(1.0 - dot / (nu * nv), 0.0, 2.0), false};
}

double affinity_from_distance(double distance, DistanceVariant variant) {
  switch (variant) {
    case DistanceVariant::SquaredCosine:
      return std::exp(-distance * distance);
    case DistanceVariant::SquaredEuclideanNormalized:
      return std::exp(-2.0 * distance);
  }
  return 0.0;
}

Eigen::MatrixXd intra_affinity(const FeatureGrid& grid, const AffinityOptions& options) {
  const UnitRows u = unit_rows(grid, options.epsilon);
  const Eigen::Index n = u.rows.rows();
  Eigen::MatrixXd similarity = u.rows * u.rows.transpose();
  Eigen::MatrixXd w(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    w(j, j) = 1.0;
    for (Eigen::Index i = 0; i < j; ++i) {
      const double a = kernel(similarity(i, j), u.degenerate[i] || u.degenerate[j], options);
      w(i, j) = a;
      w(j, i) = a;
    }
  }
  return w;
}

Eigen::MatrixXd cross_affinity(const FeatureGrid& first, const FeatureGrid& second,
                               const AffinityOptions& options) {
  if (first.channels() != second.channels()) {
    throw Error(ErrorKind::Dimension,
                "channel mismatch: " + std::to_string(first.channels()) + " vs " +
                    std::to_string(second.channels()));
  }
  const UnitRows u1 = unit_rows(first, options.epsilon);
  const UnitRows u2 = unit_rows(second, options.epsilon);
  Eigen::MatrixXd c = u1.rows * u2.rows.transpose();
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      c(i, j) = kernel(c(i, j), u1.degenerate[i] || u2.degenerate[j], options);
    }
  }
  return c;
}

JointAffinity joint_affinity(const FeatureGrid& first, const FeatureGrid& second,
                             const AffinityOptions& options) {
  if (first.channels() != second.channels()) {
    throw Error(ErrorKind::Dimension,
                "channel mismatch: " + std::to_string(first.channels()) + " vs " +
                    std::to_string(second.channels()));
  }
  JointAffinity joint;
  joint.n1 = first.cell_count();
  joint.n2 = second.cell_count();
  joint.matrix.resize(joint.size(), joint.size());
  const Eigen::MatrixXd c = cross_affinity(first, second, options);
  joint.matrix.topLeftCorner(joint.n1, joint.n1) = intra_affinity(first, options);
  joint.matrix.bottomRightCorner(joint.n2, joint.n2) = intra_affinity(second, options);
  joint.matrix.topRightCorner(joint.n1, joint.n2) = c;
  joint.matrix.bottomLeftCorner(joint.n2, joint.n1) = c.transpose();
  return joint;
}

}  // namespace jgmatch
