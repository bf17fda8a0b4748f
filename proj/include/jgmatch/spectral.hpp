#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <vector>

#include "jgmatch/affinity.hpp"

namespace jgmatch {

/// Top-m non-trivial eigenpairs of a joint affinity matrix, with each
/// eigenvector split into its image-1 and image-2 parts.
struct SpectralEmbedding {
  int m = 0;
  /// Descending.
  Eigen::VectorXd eigenvalues;
  /// n1 x m; column k is the image-1 part of the k-th retained eigenvector.
  Eigen::MatrixXd rows1;
  /// n2 x m.
  Eigen::MatrixXd rows2;
  /// Positions (in the descending full spectrum) of eigenvectors skipped as
  /// trivial.
  std::vector<int> trivial_indices;

  /// [rows1; rows2], the retained eigenvectors as columns.
  Eigen::MatrixXd stacked() const;
};

struct EigOptions {
  int m = 30;
  double triviality_cv_threshold = 1e-3;
};

/// Coefficient of variation of a vector's components: population standard
/// deviation divided by mean absolute value. Zero for the zero vector.
double coefficient_of_variation(const Eigen::Ref<const Eigen::VectorXd>& v);

/// Flips the sign of v so that its first component of largest magnitude is
/// positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v);

/// Full symmetric eigendecomposition, descending order, trivial
/// (near-constant) eigenvectors skipped, next m retained with a
/// deterministic sign.
SpectralEmbedding eig_topm(const JointAffinity& affinity, const EigOptions& options = {});

// JEMB binary dump: "JEMB", version byte, three reserved zero bytes, u32 n1,
// n2, m, then eigenvalues, rows1 and rows2 (row-major) as little-endian
// float32.
void save_embedding(const SpectralEmbedding& embedding, const std::filesystem::path& path);
SpectralEmbedding load_embedding(const std::filesystem::path& path);

}  // namespace jgmatch
