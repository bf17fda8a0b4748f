#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace jgmatch {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

double distance(const Point2& a, const Point2& b);

/// 3x3 projective transform acting on column vectors, p' = H p. Stored with
/// its largest-magnitude entry scaled to exactly 1; construction rejects
/// non-finite or singular matrices.
class Homography {
 public:
  Homography() : h_(Eigen::Matrix3d::Identity()) {}
  explicit Homography(const Eigen::Matrix3d& h);

  static Homography identity() { return Homography(); }

  const Eigen::Matrix3d& matrix() const noexcept { return h_; }
  double operator()(int row, int col) const { return h_(row, col); }

  Homography inverse() const;
  /// Composition: (a * b) applies b first.
  friend Homography operator*(const Homography& a, const Homography& b) {
    return Homography(a.h_ * b.h_);
  }

 private:
  Eigen::Matrix3d h_;
};

/// Scales h so the entry with the largest absolute value becomes 1.
Eigen::Matrix3d normalize_homography(const Eigen::Matrix3d& h);

Point2 project_point(const Homography& h, const Point2& p);
std::vector<Point2> project_points(const Homography& h, std::span<const Point2> points);

/// Mean squared reprojection distance (1/n) sum |H p1_i - p2_i|^2.
double pointwise_loss(const Homography& h, std::span<const Point2> p1,
                      std::span<const Point2> p2);

/// Mean un-squared reprojection distance; reporting variant of the loss.
double pointwise_mean_distance(const Homography& h, std::span<const Point2> p1,
                               std::span<const Point2> p2);

/// Nine whitespace-separated numbers, row-major.
Homography read_homography(const std::filesystem::path& path);
Homography parse_homography(const std::string& text);
std::string format_homography(const Homography& h);
void write_homography(const Homography& h, const std::filesystem::path& path);

}  // namespace jgmatch
