#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace jgmatch {

/// Dense H x W x C descriptor field for one image. Values are stored
/// row-major as (row, column, channel). The constructor enforces the shape
/// and finiteness invariants, so every live FeatureGrid is valid.
class FeatureGrid {
 public:
  FeatureGrid(int grid_width, int grid_height, int channels,
              std::vector<double> values, int source_image_width = 0,
              int source_image_height = 0, std::string image_id = {});

  int grid_width() const noexcept { return grid_width_; }
  int grid_height() const noexcept { return grid_height_; }
  int channels() const noexcept { return channels_; }
  int cell_count() const noexcept { return grid_width_ * grid_height_; }
  int source_image_width() const noexcept { return source_image_width_; }
  int source_image_height() const noexcept { return source_image_height_; }
  const std::string& image_id() const noexcept { return image_id_; }

  const std::vector<double>& values() const noexcept { return values_; }

  /// Channel vector of the cell at linear index row * grid_width + column.
  std::span<const double> cell(int index) const;
  std::span<const double> cell(int row, int column) const {
    return cell(row * grid_width_ + column);
  }

  double at(int row, int column, int channel) const {
    return values_[(static_cast<std::size_t>(row) * grid_width_ + column) *
                       channels_ +
                   channel];
  }

  friend bool operator==(const FeatureGrid&, const FeatureGrid&) = default;

 private:
  int grid_width_;
  int grid_height_;
  int channels_;
  std::vector<double> values_;
  int source_image_width_;
  int source_image_height_;
  std::string image_id_;
};

/// Grayscale image with intensities in [0, 1], row-major.
class GrayImage {
 public:
  GrayImage(int width, int height, std::vector<double> pixels);
  GrayImage(int width, int height, double fill);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const std::vector<double>& pixels() const noexcept { return pixels_; }

  double operator()(int x, int y) const {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }
  /// Pixel lookup with coordinates clamped to the image border.
  double clamped(int x, int y) const;
  /// Bilinear sample at continuous pixel coordinates, clamped at the border.
  double bilinear(double x, double y) const;

 private:
  int width_;
  int height_;
  std::vector<double> pixels_;
};

// FGRD binary interchange.
FeatureGrid load_feature_grid(const std::filesystem::path& path);
FeatureGrid decode_feature_grid(std::span<const unsigned char> bytes);
/// Values are narrowed to 32-bit floats on write.
std::vector<unsigned char> encode_feature_grid(const FeatureGrid& grid);
void save_feature_grid(const FeatureGrid& grid,
                       const std::filesystem::path& path);

struct DescriptorParams {
  int grid_width = 28;
  int grid_height = 28;
  int patch_radius = 16;
  int orientation_bins = 8;
};

/// Classical dense descriptor: for each cell, the mean-subtracted
/// (2r+1)^2 intensity patch around the cell center followed by a
/// magnitude-weighted gradient-orientation histogram over the same patch.
///
/// Cell centers sit at ((c + 0.5) * W / gw - 0.5, (r + 0.5) * H / gh - 0.5)
/// in pixel coordinates; patch samples are bilinear. Orientations are
/// unsigned (mod pi) and soft-assigned to bins centered at k * pi / bins, so
/// bin 0 collects horizontal gradients.
FeatureGrid builtin_dense_descriptor(const GrayImage& image,
                                     const DescriptorParams& params,
                                     std::string image_id = {});

struct NormalizedGrid {
  FeatureGrid grid;
  /// One entry per cell; true where the original norm was below epsilon and
  /// the cell was replaced by the zero vector.
  std::vector<bool> degenerate;

  std::size_t degenerate_count() const;
};

NormalizedGrid l2_normalize_channels(const FeatureGrid& grid,
                                     double epsilon = 1e-12);

/// Bilinear resampling per channel over cell centers, clamped at the border.
FeatureGrid resample_grid(const FeatureGrid& grid, int target_width,
                          int target_height);

}  // namespace jgmatch
