#include "jgmatch/estimation.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "jgmatch/error.hpp"

namespace jgmatch {

namespace {

// Similarity transform moving the centroid to the origin with mean distance
// sqrt(2).
Eigen::Matrix3d hartley_normalizer(std::span<const Point2> points) {
  double cx = 0.0, cy = 0.0;
  for (const auto& p : points) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(points.size());
  cy /= static_cast<double>(points.size());
  double mean_dist = 0.0;
  for (const auto& p : points) mean_dist += std::hypot(p.x - cx, p.y - cy);
  mean_dist /= static_cast<double>(points.size());
  if (!(mean_dist > 0.0)) {
    throw Error(ErrorKind::Degenerate, "all correspondence points coincide");
  }
  const double s = std::sqrt(2.0) / mean_dist;
  Eigen::Matrix3d t;
  t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
  return t;
}

Eigen::Vector2d apply(const Eigen::Matrix3d& t, const Point2& p) {
  return {t(0, 0) * p.x + t(0, 2), t(1, 1) * p.y + t(1, 2)};
}

}  // namespace

Homography estimate_homography_dlt(std::span<const Point2> p1, std::span<const Point2> p2) {
  if (p1.size() != p2.size()) {
    throw Error(ErrorKind::Dimension, "correspondence lists differ in length");
  }
  if (p1.size() < 4) {
    throw Error(ErrorKind::Insufficient, "homography needs at least 4 correspondences, got " +
                                             std::to_string(p1.size()));
  }
  const Eigen::Matrix3d t1 = hartley_normalizer(p1);
  const Eigen::Matrix3d t2 = hartley_normalizer(p2);

  const auto n = static_cast<Eigen::Index>(p1.size());
  Eigen::MatrixXd a(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector2d s = apply(t1, p1[i]);
    const Eigen::Vector2d d = apply(t2, p2[i]);
    a.row(2 * i) << 0, 0, 0, -s.x(), -s.y(), -1, d.y() * s.x(), d.y() * s.y(), d.y();
    a.row(2 * i + 1) << s.x(), s.y(), 1, 0, 0, 0, -d.x() * s.x(), -d.x() * s.y(), -d.x();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  // With 2n >= 9 rows the ninth singular value exists; for n = 4 the design
  // matrix has 8 rows and the null vector is the ninth column of V.
  const double largest = sv[0];
  const double second_smallest = sv[7];
  if (!(largest > 0.0) || second_smallest < 1e-10 * largest) {
    throw Error(ErrorKind::Degenerate,
                "degenerate correspondence configuration (rank-deficient design matrix)");
  }
  const Eigen::VectorXd hv = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << hv[0], hv[1], hv[2], hv[3], hv[4], hv[5], hv[6], hv[7], hv[8];
  return Homography(t2.inverse() * hn * t1);
}

Homography estimate_homography_dlt(const MatchSet& matches) {
  const auto p1 = matches.points1();
  const auto p2 = matches.points2();
  return estimate_homography_dlt(p1, p2);
}

double huber_penalty(double r, double delta) {
  return r <= delta ? r * r : 2.0 * delta * r - delta * delta;
}

double robust_objective(const Homography& h, std::span<const Point2> p1,
                        std::span<const Point2> p2, double delta) {
  if (p1.size() != p2.size() || p1.empty()) {
    throw Error(ErrorKind::Dimension, "robust objective needs equal non-empty point lists");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    sum += huber_penalty(distance(project_point(h, p1[i]), p2[i]), delta);
  }
  return sum / static_cast<double>(p1.size());
}

namespace {

std::optional<double> try_objective(const Homography& h, std::span<const Point2> p1,
                                    std::span<const Point2> p2, double delta) {
  try {
    const double value = robust_objective(h, p1, p2, delta);
    if (!std::isfinite(value)) return std::nullopt;
    return value;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<Homography> try_homography(const Eigen::Matrix3d& m) {
  try {
    return Homography(m);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

RefineResult refine_homography(const Homography& initial, std::span<const Point2> p1,
                               std::span<const Point2> p2, const RefineOptions& options) {
  if (!(options.huber_delta > 0.0)) {
    throw Error(ErrorKind::Parameter, "huber_delta must be positive");
  }
  if (options.max_iters < 1) throw Error(ErrorKind::Parameter, "max_iters must be at least 1");
  if (!(options.tol >= 0.0)) throw Error(ErrorKind::Parameter, "tol must be non-negative");
  if (p1.size() != p2.size()) {
    throw Error(ErrorKind::Dimension, "correspondence lists differ in length");
  }
  if (p1.size() < 4) {
    throw Error(ErrorKind::Insufficient, "refinement needs at least 4 correspondences");
  }

  const double delta = options.huber_delta;
  RefineResult result;
  result.h = initial;
  result.initial_objective = robust_objective(initial, p1, p2, delta);
  result.final_objective = result.initial_objective;
  result.objective_history.push_back(result.initial_objective);
  result.status = RefineStatus::MaxIterations;

  constexpr double kLambdaMax = 1e12;
  double lambda = 1e-3;
  bool any_solvable = false;
  const auto n = p1.size();

  for (int iter = 0; iter < options.max_iters; ++iter) {
    if (result.final_objective == 0.0) {
      result.status = RefineStatus::Converged;
      break;
    }
    const Eigen::Matrix3d& h = result.h.matrix();
    Eigen::Index pin_row = 0, pin_col = 0;
    h.cwiseAbs().maxCoeff(&pin_row, &pin_col);
    const int pinned = static_cast<int>(pin_row * 3 + pin_col);

    // IRLS normal equations J^T W J and J^T W r over the 9 entries; the
    // pinned column is dropped below.
    Eigen::Matrix<double, 9, 9> jtj = Eigen::Matrix<double, 9, 9>::Zero();
    Eigen::Matrix<double, 9, 1> jtr = Eigen::Matrix<double, 9, 1>::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const double x = p1[i].x, y = p1[i].y;
      const double w = h(2, 0) * x + h(2, 1) * y + h(2, 2);
      const double u = (h(0, 0) * x + h(0, 1) * y + h(0, 2)) / w;
      const double v = (h(1, 0) * x + h(1, 1) * y + h(1, 2)) / w;
      const double ru = u - p2[i].x;
      const double rv = v - p2[i].y;
      const double r = std::hypot(ru, rv);
      const double weight = r <= delta ? 1.0 : delta / r;
      Eigen::Matrix<double, 9, 1> ju, jv;
      ju << x / w, y / w, 1 / w, 0, 0, 0, -u * x / w, -u * y / w, -u / w;
      jv << 0, 0, 0, x / w, y / w, 1 / w, -v * x / w, -v * y / w, -v / w;
      jtj += weight * (ju * ju.transpose() + jv * jv.transpose());
      jtr += weight * (ju * ru + jv * rv);
    }
    Eigen::Matrix<double, 8, 8> a;
    Eigen::Matrix<double, 8, 1> g;
    for (int r = 0, rr = 0; r < 9; ++r) {
      if (r == pinned) continue;
      g[rr] = jtr[r];
      for (int c = 0, cc = 0; c < 9; ++c) {
        if (c == pinned) continue;
        a(rr, cc++) = jtj(r, c);
      }
      ++rr;
    }

    bool accepted = false;
    while (lambda <= kLambdaMax) {
      Eigen::Matrix<double, 8, 8> damped = a;
      for (int k = 0; k < 8; ++k) damped(k, k) += lambda * std::max(a(k, k), 1e-12);
      const Eigen::Matrix<double, 8, 1> step = damped.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      any_solvable = true;
      Eigen::Matrix3d candidate = h;
      for (int k = 0, kk = 0; k < 9; ++k) {
        if (k == pinned) continue;
        candidate(k / 3, k % 3) += step[kk++];
      }
      const auto next = try_homography(candidate);
      const auto value = next ? try_objective(*next, p1, p2, delta) : std::nullopt;
      if (value && *value < result.final_objective) {
        const double previous = result.final_objective;
        result.h = *next;
        result.final_objective = *value;
        result.objective_history.push_back(*value);
        result.iterations = iter + 1;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (previous - *value < options.tol * previous) {
          result.status = RefineStatus::Converged;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      if (!any_solvable) {
        result.h = initial;
        result.final_objective = result.initial_objective;
        result.status = RefineStatus::NumericalFailure;
        result.diagnostic = "normal equations singular at every damping level";
      } else {
        result.status = RefineStatus::Converged;
      }
      break;
    }
    if (result.status == RefineStatus::Converged) break;
  }
  return result;
}

RefineResult refine_homography(const Homography& initial, const MatchSet& matches,
                               const RefineOptions& options) {
  const auto p1 = matches.points1();
  const auto p2 = matches.points2();
  return refine_homography(initial, p1, p2, options);
}

}  // namespace jgmatch
