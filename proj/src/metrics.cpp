#include "jgmatch/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "jgmatch/error.hpp"

namespace jgmatch {

namespace {

void check(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::Dimension, "estimated and ground-truth lists differ in length: " +
                                          std::to_string(a.size()) + " vs " +
                                          std::to_string(b.size()));
  }
  if (a.empty()) throw Error(ErrorKind::Dimension, "metric needs at least one point");
}

}  // namespace

double mae(std::span<const Point2> estimated, std::span<const Point2> ground_truth) {
  check(estimated, ground_truth);
  double sum = 0.0;
  for (std::size_t i = 0; i < estimated.size(); ++i) sum += distance(estimated[i], ground_truth[i]);
  return sum / static_cast<double>(estimated.size());
}

double delta_match_rate(std::span<const Point2> estimated, std::span<const Point2> ground_truth,
                        double delta, DeltaNorm norm) {
  check(estimated, ground_truth);
  if (!(delta > 0.0)) throw Error(ErrorKind::Parameter, "delta must be positive");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < estimated.size(); ++i) {
    const double dx = std::abs(estimated[i].x - ground_truth[i].x);
    const double dy = std::abs(estimated[i].y - ground_truth[i].y);
    const double d = norm == DeltaNorm::Euclidean ? std::hypot(dx, dy) : std::max(dx, dy);
    if (d <= delta) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(estimated.size());
}

}  // namespace jgmatch
