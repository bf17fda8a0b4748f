#include "jgmatch/homography.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "jgmatch/error.hpp"

namespace jgmatch {

double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Eigen::Matrix3d normalize_homography(const Eigen::Matrix3d& h) {
  Eigen::Index row = 0, col = 0;
  h.cwiseAbs().maxCoeff(&row, &col);
  const double pivot = h(row, col);
  if (!std::isfinite(pivot) || pivot == 0.0) {
    throw Error(ErrorKind::Degenerate, "homography has no finite non-zero entry");
  }
  Eigen::Matrix3d out = h / pivot;
  out(row, col) = 1.0;
  return out;
}

Homography::Homography(const Eigen::Matrix3d& h) {
  if (!h.allFinite()) {
    throw Error(ErrorKind::Validation, "homography has non-finite entries");
  }
  h_ = normalize_homography(h);
  if (!(std::abs(h_.determinant()) > 1e-12)) {
    throw Error(ErrorKind::Degenerate, "homography is singular");
  }
}

Homography Homography::inverse() const { return Homography(h_.inverse()); }

Point2 project_point(const Homography& h, const Point2& p) {
  const Eigen::Vector3d q = h.matrix() * Eigen::Vector3d(p.x, p.y, 1.0);
  if (std::abs(q.z()) < 1e-12) {
    std::ostringstream msg;
    msg << "point (" << p.x << ", " << p.y << ") maps to infinity";
    throw Error(ErrorKind::PointAtInfinity, msg.str());
  }
  return {q.x() / q.z(), q.y() / q.z()};
}

std::vector<Point2> project_points(const Homography& h, std::span<const Point2> points) {
  std::vector<Point2> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    try {
      out.push_back(project_point(h, points[i]));
    } catch (const Error& e) {
      throw Error(e.kind(), "point " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

namespace {

void check_pairs(std::span<const Point2> p1, std::span<const Point2> p2) {
  if (p1.size() != p2.size()) {
    throw Error(ErrorKind::Dimension, "point lists differ in length: " +
                                          std::to_string(p1.size()) + " vs " +
                                          std::to_string(p2.size()));
  }
  if (p1.empty()) throw Error(ErrorKind::Dimension, "point lists are empty");
}

}  // namespace

double pointwise_loss(const Homography& h, std::span<const Point2> p1,
                      std::span<const Point2> p2) {
  check_pairs(p1, p2);
  const auto projected = project_points(h, p1);
  double sum = 0.0;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    const double dx = projected[i].x - p2[i].x;
    const double dy = projected[i].y - p2[i].y;
    sum += dx * dx + dy * dy;
  }
  return sum / static_cast<double>(p1.size());
}

double pointwise_mean_distance(const Homography& h, std::span<const Point2> p1,
                               std::span<const Point2> p2) {
  check_pairs(p1, p2);
  const auto projected = project_points(h, p1);
  double sum = 0.0;
  for (std::size_t i = 0; i < p1.size(); ++i) sum += distance(projected[i], p2[i]);
  return sum / static_cast<double>(p1.size());
}

Homography parse_homography(const std::string& text) {
  std::istringstream in(text);
  Eigen::Matrix3d h;
  for (int i = 0; i < 9; ++i) {
    if (!(in >> h(i / 3, i % 3))) {
      throw Error(ErrorKind::Format, "homography text must hold 9 numbers, got " +
                                         std::to_string(i));
    }
  }
  std::string extra;
  if (in >> extra) {
    throw Error(ErrorKind::Format, "unexpected trailing token '" + extra + "' in homography");
  }
  return Homography(h);
}

Homography read_homography(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open homography " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_homography(buffer.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string format_homography(const Homography& h) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out << h(r, c) << (c == 2 ? '\n' : ' ');
  }
  return out.str();
}

void write_homography(const Homography& h, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write homography " + path.string());
  out << format_homography(h);
}

}  // namespace jgmatch
