// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "jacobi_oracle.hpp"
#include "jgmatch/affinity.hpp"
#include "jgmatch/dataset.hpp"
#include "jgmatch/error.hpp"
#include "jgmatch/estimation.hpp"
#include "jgmatch/evaluation.hpp"
#include "jgmatch/metrics.hpp"
#include "jgmatch/pipeline.hpp"
#include "jgmatch/spectral.hpp"
#include "synthetic.hpp"

using namespace jgmatch;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer), format, args...);
  return buffer;
}

Outcome affinity_invariants() {
  std::mt19937_64 rng(1001);
  const auto start = Clock::now();
  double worst_asym = 0.0, worst_diag = 0.0, min_entry = 1.0, max_entry = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    auto dim = [&](int hi) { return 1 + static_cast<int>(rng() % hi); };
    const int c = dim(16);
    const FeatureGrid a = testing::random_grid(rng, dim(8), dim(8), c);
    const FeatureGrid b = testing::random_grid(rng, dim(8), dim(8), c);
    AffinityOptions opts;
    if (trial % 2) opts.variant = DistanceVariant::SquaredEuclideanNormalized;
    const JointAffinity w = joint_affinity(a, b, opts);
    worst_asym = std::max(worst_asym, (w.matrix - w.matrix.transpose()).cwiseAbs().maxCoeff());
    worst_diag = std::max(worst_diag, (w.matrix.diagonal().array() - 1.0).abs().maxCoeff());
    min_entry = std::min(min_entry, w.matrix.minCoeff());
    max_entry = std::max(max_entry, w.matrix.maxCoeff());
  }
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = worst_asym <= 1e-12 && worst_diag == 0.0 && min_entry >= std::exp(-4.0) &&
           max_entry <= 1.0 && elapsed < 10.0;
  o.detail = fmt("200 pairs, max asymmetry %.1e, max |diag-1| %.1e, entries in [%.5f, %.5f], %.2fs",
                 worst_asym, worst_diag, min_entry, max_entry, elapsed);
  return o;
}

Outcome eigensolver_oracle() {
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto start = Clock::now();
  double worst_value = 0.0, worst_vector = 0.0, worst_residual = 0.0;
  int compared = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 15);
    Eigen::MatrixXd a(n, n);
    if (trial % 2 == 0) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = u(rng);
    } else {
      // Joint affinities of random grids, the matrices the pipeline feeds in.
      const int n1 = 1 + static_cast<int>(rng() % (n - 1));
      const int c = 1 + static_cast<int>(rng() % 8);
      a = joint_affinity(testing::random_grid(rng, n1, 1, c), testing::random_grid(rng, n - n1, 1, c)).matrix;
    }
    std::vector<std::vector<double>> rows(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) rows[i][j] = a(i, j);
    const auto oracle = testing::jacobi_eigen(rows);

    JointAffinity w;
    w.n1 = n / 2;
    w.n2 = n - n / 2;
    w.matrix = a;
    // Largest m the spectrum supports once trivial vectors are skipped.
    std::optional<SpectralEmbedding> found;
    for (int m = n; m >= 1 && !found; --m) {
      try {
        found = eig_topm(w, EigOptions{m, 1e-3});
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::Capacity) throw;
      }
    }
    if (!found) continue;
    const SpectralEmbedding& e = *found;
    const Eigen::MatrixXd vecs = e.stacked();
    const double frob = a.norm();
    for (int k = 0, pos = 0; k < e.m; ++k, ++pos) {
      while (std::find(e.trivial_indices.begin(), e.trivial_indices.end(), pos) != e.trivial_indices.end()) ++pos;
      worst_value = std::max(worst_value, std::abs(e.eigenvalues[k] - oracle.eigenvalues[pos]));
      // Eigenvectors are unique up to sign only for simple eigenvalues; for
      // repeated ones compare against the oracle's eigenspace.
      Eigen::VectorXd rest = vecs.col(k);
      for (int j = 0; j < n; ++j) {
        if (std::abs(oracle.eigenvalues[j] - oracle.eigenvalues[pos]) > 1e-6 * frob) continue;
        Eigen::Map<const Eigen::VectorXd> u(oracle.eigenvectors[j].data(), n);
        rest -= u.dot(vecs.col(k)) * u;
      }
      worst_vector = std::max(worst_vector, rest.cwiseAbs().maxCoeff());
      worst_residual =
          std::max(worst_residual, (a * vecs.col(k) - e.eigenvalues[k] * vecs.col(k)).norm() / frob);
      ++compared;
    }
  }
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = worst_value <= 1e-8 && worst_vector <= 1e-8 && worst_residual <= 1e-8 && elapsed < 5.0;
  o.detail = fmt("%d eigenpairs over 100 matrices, eigenvalue err %.1e, eigenvector err %.1e, "
                 "residual/|W|_F %.1e, %.2fs",
                 compared, worst_value, worst_vector, worst_residual, elapsed);
  return o;
}

Outcome dlt_exactness() {
  std::mt19937_64 rng(1003);
  const int w = 640, h = 480;
  const double diag2 = static_cast<double>(w) * w + static_cast<double>(h) * h;
  const auto start = Clock::now();
  double worst_rel = 0.0, worst_loss_ratio = 0.0;
  testing::WarpLimits limits;
  limits.max_translation = 40;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Matrix3d truth = testing::random_homography(rng, w, h, limits);
    const auto p1 = testing::keypoints_inside(rng, truth, w, h, 12);
    const auto p2 = project_points(Homography(truth), p1);
    const Homography est = estimate_homography_dlt(p1, p2);
    const Eigen::Matrix3d nt = normalize_homography(truth);
    worst_rel = std::max(worst_rel, (est.matrix() - nt).norm() / nt.norm());
    worst_loss_ratio = std::max(worst_loss_ratio, pointwise_loss(est, p1, p2) / diag2);
  }
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = worst_rel <= 1e-8 && worst_loss_ratio <= 1e-16 && elapsed < 2.0;
  o.detail = fmt("50 homographies x 12 points, rel Frobenius err %.1e, loss/diag^2 %.1e, %.3fs",
                 worst_rel, worst_loss_ratio, elapsed);
  return o;
}

Outcome robust_refinement() {
  std::mt19937_64 rng(1004);
  const int w = 320, h = 240;
  std::normal_distribution<double> noise(0.0, 0.5);
  std::uniform_real_distribution<double> ux(0, w - 1), uy(0, h - 1);
  double worst_mae = 0.0, mean_mae = 0.0;
  int increases = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Matrix3d truth = testing::random_homography(rng, w, h);
    const auto p1 = testing::keypoints_inside(rng, truth, w, h, 100);
    auto p2 = project_points(Homography(truth), p1);
    std::vector<Point2> in1, in2;
    for (std::size_t i = 0; i < p1.size(); ++i) {
      if (i % 10 == 3) {
        p2[i] = {ux(rng), uy(rng)};
      } else {
        p2[i].x += noise(rng);
        p2[i].y += noise(rng);
        in1.push_back(p1[i]);
        in2.push_back(p2[i]);
      }
    }
    const Homography h0 = estimate_homography_dlt(p1, p2);
    const RefineResult r = refine_homography(h0, p1, p2);
    for (std::size_t k = 1; k < r.objective_history.size(); ++k) {
      if (r.objective_history[k] > r.objective_history[k - 1]) ++increases;
    }
    const double inlier_mae = pointwise_mean_distance(r.h, in1, in2);
    worst_mae = std::max(worst_mae, inlier_mae);
    mean_mae += inlier_mae / 50.0;
  }
  Outcome o;
  o.pass = worst_mae <= 1.0 && increases == 0;
  o.detail = fmt("50 pairs, 10%% outliers, 0.5px noise: inlier MAE worst %.3f px (mean %.3f), "
                 "objective increases %d",
                 worst_mae, mean_mae, increases);
  return o;
}

std::vector<Point2> cell_centers(const FeatureGrid& grid) {
  const GridGeometry g = geometry_of(grid);
  std::vector<Point2> out;
  for (int i = 0; i < g.cell_count(); ++i) out.push_back(g.cell_center(i));
  return out;
}

Outcome pipeline_identity() {
  std::mt19937_64 rng(1005);
  const RunConfig config;
  double worst_off = 0.0, worst_mae = 0.0, worst_rate = 100.0;
  for (int k = 0; k < 3; ++k) {
    const GrayImage img = testing::textured_scene(rng, 224, 224);
    const FeatureGrid g = describe_image(img, config);
    const PairOutcome out = match_grids(g, g, config);
    worst_off = std::max(worst_off, (out.homography().matrix() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());
    const auto kp = cell_centers(g);
    const auto est = project_points(out.homography(), kp);
    worst_mae = std::max(worst_mae, mae(est, kp));
    worst_rate = std::min(worst_rate, delta_match_rate(est, kp, 5.0));
  }
  Outcome o;
  o.pass = worst_off <= 1e-3 && worst_mae <= 1e-3 && worst_rate == 100.0;
  o.detail = fmt("3 images at 28x28: max off-identity %.1e, MAE %.1e px, delta<=5 rate %.2f%%",
                 worst_off, worst_mae, worst_rate);
  return o;
}

struct EndToEnd {
  Outcome outcome;
  EvalReport report;
};

EndToEnd synthetic_end_to_end() {
  std::mt19937_64 rng(1006);
  const int size = 224;
  RunConfig config;
  std::vector<EvalItem> items;
  const auto start = Clock::now();
  double worst_perspective = 0.0;
  for (int k = 0; k < 20; ++k) {
    const GrayImage img = testing::textured_scene(rng, size, size);
    const Eigen::Matrix3d truth = testing::random_homography(rng, size, size);
    worst_perspective = std::max({worst_perspective, std::abs(truth(2, 0)), std::abs(truth(2, 1))});
    const GrayImage warped =
        testing::photometric_jitter(testing::warp_image(img, truth, size, size), rng);
    const auto p1 = testing::keypoints_inside(rng, truth, size, size, 50);
    items.push_back(make_eval_item("warp" + std::to_string(100 + k), describe_image(img, config),
                                   describe_image(warped, config), p1, Homography(truth)));
  }
  EvalReport report = run_eval(items, config);
  const double elapsed = seconds_since(start);

  int beats_baseline = 0, rate_ok = 0;
  double worst_rate = 100.0;
  std::ostringstream pairs;
  for (const auto& r : report.pairs) {
    if (!r.ok) {
      pairs << "\n    " << r.pair_id << " failed [" << r.failure_code << "] " << r.message;
      continue;
    }
    if (r.mae < r.baseline_mae) ++beats_baseline;
    if (r.delta_rates[3] >= 80.0) ++rate_ok;
    worst_rate = std::min(worst_rate, r.delta_rates[3]);
    pairs << "\n    " << r.pair_id
          << fmt(": MAE %.2f px (identity %.2f), delta<=20 %.1f%%, %zu matches", r.mae,
                 r.baseline_mae, r.delta_rates[3], r.matches);
  }
  const double mean_rate = report.mean ? report.mean->delta_rates[3] : 0.0;
  const double mean_mae = report.mean ? report.mean->mae : -1.0;
  EndToEnd e;
  e.outcome.pass = report.succeeded == 20 && beats_baseline == 20 && rate_ok == 20 &&
                   worst_perspective <= 1e-3 && elapsed < 300.0;
  e.outcome.detail =
      fmt("20 warped pairs: %d/20 below identity MAE, %d/20 with delta<=20 >= 80%% (worst %.1f%%, "
          "mean %.1f%%), mean MAE %.2f px, %.0fs",
          beats_baseline, rate_ok, worst_rate, mean_rate, mean_mae, elapsed) +
      pairs.str();
  e.report = std::move(report);
  return e;
}

Outcome metric_format(const EvalReport& report) {
  std::vector<std::string> rows;
  std::istringstream table(format_report_table(report));
  for (std::string line; std::getline(table, line);) rows.push_back(line.substr(0, line.find('\t')));
  const std::vector<std::string> expected{"metric", "δ ≤ 5", "δ ≤ 10", "δ ≤ 15", "δ ≤ 20", "MAE"};
  bool layout = rows == expected;

  int violations = 0;
  auto monotone = [&](const std::vector<double>& rates) {
    for (std::size_t k = 1; k < rates.size(); ++k)
      if (rates[k] < rates[k - 1]) ++violations;
  };
  for (const auto& r : report.pairs)
    if (r.ok) monotone(r.delta_rates);
  if (report.mean) monotone(report.mean->delta_rates);
  if (report.pooled) monotone(report.pooled->delta_rates);

  // Random inputs of every scale, both neighborhood norms.
  std::mt19937_64 rng(1007);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 60);
    const double spread = std::pow(10.0, std::uniform_real_distribution<double>(-1, 3)(rng));
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<Point2> est(n), gt(n), p1(n);
    for (int i = 0; i < n; ++i) {
      est[i] = {u(rng), u(rng)};
      gt[i] = {0, 0};
    }
    for (DeltaNorm norm : {DeltaNorm::Euclidean, DeltaNorm::Chebyshev}) {
      monotone(score_pair("r", est, gt, p1, {5, 10, 15, 20}, norm).delta_rates);
    }
  }
  Outcome o;
  o.pass = layout && violations == 0;
  std::string joined;
  for (const auto& r : rows) joined += (joined.empty() ? "" : " | ") + r;
  o.detail = fmt("rows [%s], monotonicity violations %d over the end-to-end report and 2000 random "
                 "score sets",
                 joined.c_str(), violations);
  return o;
}

Outcome augmentation_suite() {
  std::mt19937_64 rng(1008);
  double worst = 0.0;
  auto gap = [](const KeypointAnnotation& a, const KeypointAnnotation& b) {
    if (a.size1 != b.size1 || a.size2 != b.size2 || a.p1.size() != b.p1.size()) return 1e300;
    double g = 0.0;
    for (std::size_t i = 0; i < a.p1.size(); ++i)
      g = std::max({g, distance(a.p1[i], b.p1[i]), distance(a.p2[i], b.p2[i])});
    return g;
  };
  const std::vector<AugmentOp> ops{AugmentOp::FlipLR, AugmentOp::Rot90, AugmentOp::Rot180, AugmentOp::Rot270};
  for (int trial = 0; trial < 100; ++trial) {
    KeypointAnnotation a;
    a.pair_id = "aug" + std::to_string(trial);
    a.size1 = {16 + static_cast<int>(rng() % 400), 16 + static_cast<int>(rng() % 400)};
    a.size2 = {16 + static_cast<int>(rng() % 400), 16 + static_cast<int>(rng() % 400)};
    const int n = 4 + static_cast<int>(rng() % 30);
    auto in = [&](ImageSize s) {
      return Point2{std::uniform_real_distribution<double>(0, s.width - 1)(rng),
                    std::uniform_real_distribution<double>(0, s.height - 1)(rng)};
    };
    for (int i = 0; i < n; ++i) {
      a.p1.push_back(in(a.size1));
      a.p2.push_back(in(a.size2));
    }
    worst = std::max(worst, gap(augment_pair(augment_pair(a, AugmentOp::FlipLR), AugmentOp::FlipLR), a));
    KeypointAnnotation r = a;
    for (int k = 0; k < 4; ++k) r = augment_pair(r, AugmentOp::Rot90);
    worst = std::max(worst, gap(r, a));
    worst = std::max(worst, gap(augment_pair(augment_pair(a, AugmentOp::Rot90), AugmentOp::Rot90),
                                augment_pair(a, AugmentOp::Rot180)));

    // Metric invariance: an estimated H scored on the pair equals the
    // conjugated H scored on the jointly transformed pair.
    Eigen::Matrix3d est = Eigen::Matrix3d::Identity();
    est(0, 2) = std::uniform_real_distribution<double>(-20, 20)(rng);
    est(1, 2) = std::uniform_real_distribution<double>(-20, 20)(rng);
    est(0, 1) = std::uniform_real_distribution<double>(-0.05, 0.05)(rng);
    est(2, 0) = std::uniform_real_distribution<double>(-1e-4, 1e-4)(rng);
    const Homography h(est);
    const PairResult base =
        score_pair(a.pair_id, project_points(h, a.p1), a.p2, a.p1, {5, 10, 15, 20}, DeltaNorm::Euclidean);
    for (AugmentOp op : ops) {
      const KeypointAnnotation t = augment_pair(a, op);
      const Homography ht(augmentation_matrix(op, a.size2) * est * augmentation_matrix(op, a.size1).inverse());
      const PairResult moved =
          score_pair(t.pair_id, project_points(ht, t.p1), t.p2, t.p1, {5, 10, 15, 20}, DeltaNorm::Euclidean);
      worst = std::max(worst, std::abs(moved.mae - base.mae));
      for (std::size_t k = 0; k < base.delta_rates.size(); ++k)
        worst = std::max(worst, std::abs(moved.delta_rates[k] - base.delta_rates[k]));
    }
  }
  Outcome o;
  o.pass = worst <= 1e-6;
  o.detail = fmt("100 annotations: flip involution, rot90 4-cycle, rot90.rot90 = rot180, metric "
                 "invariance under 4 isometries; worst deviation %.1e",
                 worst);
  return o;
}

int failures = 0;

void report(const char* name, const Outcome& o) {
  if (!o.pass) ++failures;
  std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
}

Outcome guarded(const std::function<Outcome()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return Outcome{false, std::string("threw: ") + e.what()};
  }
}

}  // namespace

int main() {
  report("affinity invariants", guarded(affinity_invariants));
  report("eigensolver oracle equivalence", guarded(eigensolver_oracle));
  report("DLT exactness", guarded(dlt_exactness));
  report("robust refinement", guarded(robust_refinement));
  report("pipeline identity", guarded(pipeline_identity));
  EvalReport end_to_end;
  report("synthetic end-to-end", guarded([&] {
           EndToEnd e = synthetic_end_to_end();
           end_to_end = std::move(e.report);
           return e.outcome;
         }));
  report("metric-format fidelity", guarded([&] { return metric_format(end_to_end); }));
  report("augmentation suite", guarded(augmentation_suite));
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
