#include "jgmatch/feature_grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>

#include "jgmatch/error.hpp"

namespace jgmatch {

namespace {

constexpr unsigned char kFgrdVersion = 1;
constexpr std::size_t kFgrdFixedHeader = 8 + 4 * 4;

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

// Exact for a == b, which keeps constant grids fixed under resampling.
double lerp(double a, double b, double t) { return a + t * (b - a); }

std::uint32_t get_u32(std::span<const unsigned char> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
  return v;
}

}  // namespace

FeatureGrid::FeatureGrid(int grid_width, int grid_height, int channels,
                         std::vector<double> values, int source_image_width,
                         int source_image_height, std::string image_id)
    : grid_width_(grid_width),
      grid_height_(grid_height),
      channels_(channels),
      values_(std::move(values)),
      source_image_width_(source_image_width),
      source_image_height_(source_image_height),
      image_id_(std::move(image_id)) {
  if (grid_width < 1 || grid_height < 1 || channels < 1) {
    throw Error(ErrorKind::Validation,
                "feature grid dimensions must be positive, got " +
                    std::to_string(grid_width) + "x" + std::to_string(grid_height) +
                    "x" + std::to_string(channels));
  }
  if (source_image_width < 0 || source_image_height < 0) {
    throw Error(ErrorKind::Validation, "negative source image size");
  }
  const auto expected = static_cast<std::size_t>(grid_width) * grid_height * channels;
  if (values_.size() != expected) {
    throw Error(ErrorKind::Validation,
                "feature grid holds " + std::to_string(values_.size()) +
                    " values, expected " + std::to_string(expected));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorKind::Validation,
                  "non-finite feature value at index " + std::to_string(i));
    }
  }
}

std::span<const double> FeatureGrid::cell(int index) const {
  return std::span<const double>(values_).subspan(
      static_cast<std::size_t>(index) * channels_, channels_);
}

GrayImage::GrayImage(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::Validation, "image dimensions must be positive");
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorKind::Validation, "pixel count does not match image size");
  }
  for (double p : pixels_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorKind::Validation, "pixel intensity outside [0, 1]");
    }
  }
}

GrayImage::GrayImage(int width, int height, double fill)
    : GrayImage(width, height,
                std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) *
                                        std::max(height, 0),
                                    fill)) {}

double GrayImage::clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return (*this)(x, y);
}

double GrayImage::bilinear(double x, double y) const {
  x = std::clamp(x, 0.0, static_cast<double>(width_ - 1));
  y = std::clamp(y, 0.0, static_cast<double>(height_ - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (1.0 - fx) * clamped(x0, y0) + fx * clamped(x0 + 1, y0);
  const double bottom = (1.0 - fx) * clamped(x0, y0 + 1) + fx * clamped(x0 + 1, y0 + 1);
  return (1.0 - fy) * top + fy * bottom;
}

std::vector<unsigned char> encode_feature_grid(const FeatureGrid& grid) {
  std::vector<unsigned char> out;
  out.reserve(kFgrdFixedHeader + grid.image_id().size() + 8 + grid.values().size() * 4);
  out.insert(out.end(), {'F', 'G', 'R', 'D', kFgrdVersion, 0, 0, 0});
  put_u32(out, static_cast<std::uint32_t>(grid.grid_width()));
  put_u32(out, static_cast<std::uint32_t>(grid.grid_height()));
  put_u32(out, static_cast<std::uint32_t>(grid.channels()));
  put_u32(out, static_cast<std::uint32_t>(grid.image_id().size()));
  out.insert(out.end(), grid.image_id().begin(), grid.image_id().end());
  put_u32(out, static_cast<std::uint32_t>(grid.source_image_width()));
  put_u32(out, static_cast<std::uint32_t>(grid.source_image_height()));
  for (double v : grid.values()) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

FeatureGrid decode_feature_grid(std::span<const unsigned char> bytes) {
  if (bytes.size() < 8) {
    throw Error(ErrorKind::Truncation, "FGRD header truncated");
  }
  if (!std::equal(bytes.begin(), bytes.begin() + 4, "FGRD")) {
    throw Error(ErrorKind::Format, "bad FGRD magic");
  }
  if (bytes[4] != kFgrdVersion) {
    throw Error(ErrorKind::Format,
                "unsupported FGRD version " + std::to_string(bytes[4]));
  }
  if (bytes[5] != 0 || bytes[6] != 0 || bytes[7] != 0) {
    throw Error(ErrorKind::Format, "FGRD reserved bytes must be zero");
  }
  if (bytes.size() < kFgrdFixedHeader) {
    throw Error(ErrorKind::Truncation, "FGRD header truncated");
  }
  const std::uint64_t width = get_u32(bytes, 8);
  const std::uint64_t height = get_u32(bytes, 12);
  const std::uint64_t channels = get_u32(bytes, 16);
  const std::uint64_t id_length = get_u32(bytes, 20);
  const std::uint64_t ints_end = kFgrdFixedHeader + id_length + 8;
  if (bytes.size() < ints_end) {
    throw Error(ErrorKind::Truncation, "FGRD header truncated");
  }
  std::string image_id(bytes.begin() + kFgrdFixedHeader,
                       bytes.begin() + kFgrdFixedHeader + id_length);
  const auto source_width = get_u32(bytes, kFgrdFixedHeader + id_length);
  const auto source_height = get_u32(bytes, kFgrdFixedHeader + id_length + 4);

  const std::uint64_t count = width * height * channels;
  const std::uint64_t payload = bytes.size() - ints_end;
  if (payload != count * 4) {
    throw Error(ErrorKind::Truncation,
                "FGRD declares " + std::to_string(width) + "x" + std::to_string(height) +
                    "x" + std::to_string(channels) + " (" + std::to_string(count) +
                    " values) but carries " + std::to_string(payload) + " payload bytes");
  }
  if (width > INT32_MAX || height > INT32_MAX || channels > INT32_MAX ||
      source_width > INT32_MAX || source_height > INT32_MAX) {
    throw Error(ErrorKind::Format, "FGRD dimension out of range");
  }

  std::vector<double> values(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<float>(get_u32(bytes, ints_end + 4 * i));
  }
  return FeatureGrid(static_cast<int>(width), static_cast<int>(height),
                     static_cast<int>(channels), std::move(values),
                     static_cast<int>(source_width), static_cast<int>(source_height),
                     std::move(image_id));
}

FeatureGrid load_feature_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open feature grid " + path.string());
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  try {
    return decode_feature_grid(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void save_feature_grid(const FeatureGrid& grid, const std::filesystem::path& path) {
  const auto bytes = encode_feature_grid(grid);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write feature grid " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorKind::Io, "write failed for " + path.string());
  }
}

FeatureGrid builtin_dense_descriptor(const GrayImage& image, const DescriptorParams& params,
                                     std::string image_id) {
  if (params.grid_width < 1 || params.grid_height < 1) {
    throw Error(ErrorKind::Parameter, "descriptor grid dimensions must be positive");
  }
  if (params.patch_radius < 0) {
    throw Error(ErrorKind::Parameter, "patch radius must be non-negative");
  }
  if (params.orientation_bins < 4) {
    throw Error(ErrorKind::Parameter, "orientation_bins must be at least 4");
  }
  const int side = 2 * params.patch_radius + 1;
  if (image.width() < side || image.height() < side) {
    throw Error(ErrorKind::Dimension,
                "image " + std::to_string(image.width()) + "x" +
                    std::to_string(image.height()) + " is smaller than the " +
                    std::to_string(side) + "x" + std::to_string(side) + " patch");
  }

  const int bins = params.orientation_bins;
  const int r = params.patch_radius;
  const int window = side + 2;
  const int channels = side * side + bins;
  const double bin_width = std::numbers::pi / bins;

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(params.grid_width) * params.grid_height * channels);
  std::vector<double> samples(static_cast<std::size_t>(window) * window);
  std::vector<double> histogram(bins);

  for (int row = 0; row < params.grid_height; ++row) {
    const double cy = (row + 0.5) * image.height() / params.grid_height - 0.5;
    for (int col = 0; col < params.grid_width; ++col) {
      const double cx = (col + 0.5) * image.width() / params.grid_width - 0.5;

      for (int dy = -r - 1; dy <= r + 1; ++dy) {
        for (int dx = -r - 1; dx <= r + 1; ++dx) {
          samples[(dy + r + 1) * window + (dx + r + 1)] = image.bilinear(cx + dx, cy + dy);
        }
      }
      auto sample = [&](int sx, int sy) { return samples[(sy + 1) * window + (sx + 1)]; };

      double mean = 0.0;
      for (int sy = 0; sy < side; ++sy)
        for (int sx = 0; sx < side; ++sx) mean += sample(sx, sy);
      mean /= side * side;
      for (int sy = 0; sy < side; ++sy)
        for (int sx = 0; sx < side; ++sx) values.push_back(sample(sx, sy) - mean);

      std::fill(histogram.begin(), histogram.end(), 0.0);
      for (int sy = 0; sy < side; ++sy) {
        for (int sx = 0; sx < side; ++sx) {
          const double gx = 0.5 * (sample(sx + 1, sy) - sample(sx - 1, sy));
          const double gy = 0.5 * (sample(sx, sy + 1) - sample(sx, sy - 1));
          const double magnitude = std::hypot(gx, gy);
          if (magnitude == 0.0) continue;
          double theta = std::atan2(gy, gx);
          if (theta < 0.0) theta += std::numbers::pi;
          const double t = theta / bin_width;
          const double lower = std::floor(t);
          const double frac = t - lower;
          const int b0 = static_cast<int>(lower) % bins;
          histogram[b0] += (1.0 - frac) * magnitude;
          histogram[(b0 + 1) % bins] += frac * magnitude;
        }
      }
      values.insert(values.end(), histogram.begin(), histogram.end());
    }
  }
  return FeatureGrid(params.grid_width, params.grid_height, channels, std::move(values),
                     image.width(), image.height(), std::move(image_id));
}

std::size_t NormalizedGrid::degenerate_count() const {
  return static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), true));
}

NormalizedGrid l2_normalize_channels(const FeatureGrid& grid, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorKind::Parameter, "normalization epsilon must be positive");
  }
  std::vector<double> values = grid.values();
  std::vector<bool> degenerate(grid.cell_count(), false);
  const auto channels = static_cast<std::size_t>(grid.channels());
  for (int i = 0; i < grid.cell_count(); ++i) {
    auto* begin = values.data() + i * channels;
    double sum_sq = 0.0;
    for (std::size_t c = 0; c < channels; ++c) sum_sq += begin[c] * begin[c];
    const double norm = std::sqrt(sum_sq);
    if (norm < epsilon) {
      std::fill(begin, begin + channels, 0.0);
      degenerate[i] = true;
      continue;
    }
    // Already unit length within rounding: leave bit-identical.
    if (std::abs(norm - 1.0) <= 4 * std::numeric_limits<double>::epsilon()) continue;
    for (std::size_t c = 0; c < channels; ++c) begin[c] /= norm;
  }
  return {FeatureGrid(grid.grid_width(), grid.grid_height(), grid.channels(),
                      std::move(values), grid.source_image_width(),
                      grid.source_image_height(), grid.image_id()),
          std::move(degenerate)};
}

FeatureGrid resample_grid(const FeatureGrid& grid, int target_width, int target_height) {
  if (target_width < 1 || target_height < 1) {
    throw Error(ErrorKind::Parameter, "resample target dimensions must be positive");
  }
  if (target_width == grid.grid_width() && target_height == grid.grid_height()) {
    return grid;
  }
  const int channels = grid.channels();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(target_width) * target_height * channels);

  auto source_coord = [](int t, int source, int target) {
    const double s = (t + 0.5) * source / target - 0.5;
    return std::clamp(s, 0.0, static_cast<double>(source - 1));
  };
  for (int row = 0; row < target_height; ++row) {
    const double sy = source_coord(row, grid.grid_height(), target_height);
    const int y0 = static_cast<int>(std::floor(sy));
    const int y1 = std::min(y0 + 1, grid.grid_height() - 1);
    const double fy = sy - y0;
    for (int col = 0; col < target_width; ++col) {
      const double sx = source_coord(col, grid.grid_width(), target_width);
      const int x0 = static_cast<int>(std::floor(sx));
      const int x1 = std::min(x0 + 1, grid.grid_width() - 1);
      const double fx = sx - x0;
      for (int c = 0; c < channels; ++c) {
        const double top = lerp(grid.at(y0, x0, c), grid.at(y0, x1, c), fx);
        const double bottom = lerp(grid.at(y1, x0, c), grid.at(y1, x1, c), fx);
        values.push_back(lerp(top, bottom, fy));
      }
    }
  }
  return FeatureGrid(target_width, target_height, channels, std::move(values),
                     grid.source_image_width(), grid.source_image_height(),
                     grid.image_id());
}

}  // namespace jgmatch
