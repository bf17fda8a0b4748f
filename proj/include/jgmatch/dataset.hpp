#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "jgmatch/feature_grid.hpp"
#include "jgmatch/homography.hpp"

namespace jgmatch {

struct ImageSize {
  int width = 0;
  int height = 0;

  bool known() const noexcept { return width > 0 && height > 0; }
  /// Pixel area [-0.5, w - 0.5] x [-0.5, h - 0.5].
  bool contains(const Point2& p) const;
  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// Ground-truth keypoint correspondences for one image pair.
struct KeypointAnnotation {
  std::string pair_id;
  std::filesystem::path image1;
  std::filesystem::path image2;
  ImageSize size1;
  ImageSize size2;
  std::vector<Point2> p1;
  std::vector<Point2> p2;

  /// Throws Validation when lists are empty or of unequal length, or when a
  /// point falls outside a known image size.
  void validate() const;
  friend bool operator==(const KeypointAnnotation&, const KeypointAnnotation&) = default;
};

enum class AugmentOp { FlipLR, Rot90, Rot180, Rot270 };

AugmentOp parse_augment_op(const std::string& name);
const char* to_string(AugmentOp op) noexcept;

/// Pixel-coordinate transform of an op on a width x height image, as a 3x3
/// matrix acting on homogeneous column vectors. Rotations are clockwise.
Eigen::Matrix3d augmentation_matrix(AugmentOp op, ImageSize size);
ImageSize augmented_size(AugmentOp op, ImageSize size);
Point2 augment_point(AugmentOp op, ImageSize size, const Point2& p);

/// Applies the op to both images' keypoints and sizes. Image paths are kept;
/// pixel data is transformed separately with transform_image.
KeypointAnnotation augment_pair(const KeypointAnnotation& annotation, AugmentOp op);

GrayImage transform_image(const GrayImage& image, AugmentOp op);

/// Text annotation: header "pair <id> <img1> <img2>", then "x1 y1 x2 y2"
/// lines. Blank lines and '#' comments are skipped. Relative image paths are
/// resolved against base_dir.
KeypointAnnotation parse_annotation(const std::string& text,
                                    const std::filesystem::path& base_dir = {});
KeypointAnnotation load_annotation(const std::filesystem::path& path);
std::string format_annotation(const KeypointAnnotation& annotation);

/// One "x y" point per line; '#' comments allowed.
std::vector<Point2> load_keypoints(const std::filesystem::path& path);

struct ManifestEntry {
  enum class Kind { Annotation, Homography };
  Kind kind = Kind::Annotation;
  std::filesystem::path annotation;
  std::filesystem::path image1;
  std::filesystem::path image2;
  std::filesystem::path homography;
  std::filesystem::path keypoints;
  /// Source line number, for error messages.
  int line = 0;
};

/// Lines "annotation <path>" or
/// "homography <img1> <img2> <H-path> <keypoint-source-path>". Relative
/// paths resolve against the manifest's directory.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

/// Seeded Fisher-Yates shuffle, then 70/10/20 by count: validation gets
/// floor(n/10), test floor(n/5), train the rest.
DatasetSplit split_dataset(const std::vector<std::string>& pair_ids, std::uint64_t seed);

}  // namespace jgmatch
