#pragma once

#include <span>
#include <string>
#include <vector>

#include "jgmatch/homography.hpp"
#include "jgmatch/matching.hpp"

namespace jgmatch {

/// Hartley-normalized direct linear transform. Throws Insufficient for fewer
/// than four correspondences and Degenerate when the design matrix has a
/// null space of dimension above one (e.g. collinear sources).
Homography estimate_homography_dlt(std::span<const Point2> p1, std::span<const Point2> p2);
Homography estimate_homography_dlt(const MatchSet& matches);

struct RefineOptions {
  double huber_delta = 2.0;
  int max_iters = 50;
  /// Stop once an accepted step lowers the objective by less than this
  /// fraction.
  double tol = 1e-10;
};

enum class RefineStatus {
  Converged,
  MaxIterations,
  /// No damping level produced a solvable step; the input is returned.
  NumericalFailure,
};

struct RefineResult {
  Homography h;
  RefineStatus status = RefineStatus::Converged;
  int iterations = 0;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  /// Objective after the start and after every accepted step.
  std::vector<double> objective_history;
  std::string diagnostic;
};

/// Huber penalty applied to a reprojection distance r: r^2 inside delta,
/// 2 delta r - delta^2 outside. Equals the squared loss for delta -> inf.
double huber_penalty(double r, double delta);

/// (1/n) sum huber_penalty(|H p1_i - p2_i|, delta).
double robust_objective(const Homography& h, std::span<const Point2> p1,
                        std::span<const Point2> p2, double delta);

/// Levenberg-Marquardt on the Huber-robustified mean squared reprojection
/// loss, with IRLS weights recomputed each iteration. The largest entry of H
/// stays pinned to 1, leaving eight free parameters. A step is accepted only
/// if it lowers the robust objective, so the history is non-increasing.
RefineResult refine_homography(const Homography& initial, std::span<const Point2> p1,
                               std::span<const Point2> p2, const RefineOptions& options = {});
RefineResult refine_homography(const Homography& initial, const MatchSet& matches,
                               const RefineOptions& options = {});

}  // namespace jgmatch
