#include "jgmatch/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "jgmatch/error.hpp"
#include "jgmatch/image_io.hpp"
#include "jgmatch/metrics.hpp"
#include "jgmatch/pipeline.hpp"

namespace jgmatch {

namespace {

PairResult failure(std::string pair_id, ErrorKind kind, std::string message) {
  PairResult r;
  r.pair_id = std::move(pair_id);
  r.ok = false;
  r.failure_code = to_string(kind);
  r.message = std::move(message);
  return r;
}

std::string fixed2(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.2f", v);
  return buffer;
}

std::string format_delta(double d) {
  std::ostringstream out;
  out << d;
  return out.str();
}

}  // namespace

EvalItem make_eval_item(const KeypointAnnotation& annotation, FeatureGrid grid1,
                        FeatureGrid grid2) {
  annotation.validate();
  return {annotation.pair_id, std::move(grid1), std::move(grid2), annotation.p1, annotation.p2};
}

EvalItem make_eval_item(std::string pair_id, FeatureGrid grid1, FeatureGrid grid2,
                        const std::vector<Point2>& p1, const Homography& ground_truth) {
  const ImageSize size2{grid2.source_image_width(), grid2.source_image_height()};
  EvalItem item{std::move(pair_id), std::move(grid1), std::move(grid2), {}, {}};
  for (const auto& p : p1) {
    try {
      const Point2 q = project_point(ground_truth, p);
      if (size2.known() && !size2.contains(q)) continue;
      item.p1.push_back(p);
      item.p2.push_back(q);
    } catch (const Error&) {
    }
  }
  if (item.p1.empty()) {
    throw Error(ErrorKind::Validation,
                "no keypoint of '" + item.pair_id + "' projects inside image 2");
  }
  return item;
}

PairResult score_pair(const std::string& pair_id, const std::vector<Point2>& estimated,
                      const std::vector<Point2>& ground_truth, const std::vector<Point2>& p1,
                      const std::vector<double>& deltas, DeltaNorm norm) {
  PairResult r;
  r.pair_id = pair_id;
  r.ok = true;
  r.points = ground_truth.size();
  r.mae = mae(estimated, ground_truth);
  r.baseline_mae = mae(p1, ground_truth);
  r.distance_sum = r.mae * static_cast<double>(r.points);
  for (double d : deltas) {
    const double rate = delta_match_rate(estimated, ground_truth, d, norm);
    r.delta_rates.push_back(rate);
    r.delta_hits.push_back(
        static_cast<std::size_t>(std::llround(rate * static_cast<double>(r.points) / 100.0)));
  }
  return r;
}

void aggregate(EvalReport& report) {
  std::stable_sort(report.pairs.begin(), report.pairs.end(),
                   [](const PairResult& a, const PairResult& b) { return a.pair_id < b.pair_id; });

  report.succeeded = 0;
  report.excluded = 0;
  report.mean.reset();
  report.pooled.reset();
  const std::size_t k = report.deltas.size();
  MetricSummary mean{0.0, std::vector<double>(k, 0.0)};
  double pooled_distance = 0.0;
  std::size_t pooled_points = 0;
  std::vector<std::size_t> pooled_hits(k, 0);
  for (const auto& r : report.pairs) {
    if (!r.ok) {
      ++report.excluded;
      continue;
    }
    ++report.succeeded;
    mean.mae += r.mae;
    for (std::size_t d = 0; d < k; ++d) {
      mean.delta_rates[d] += r.delta_rates[d];
      pooled_hits[d] += r.delta_hits[d];
    }
    pooled_distance += r.distance_sum;
    pooled_points += r.points;
  }
  if (report.succeeded > 0) {
    const auto n = static_cast<double>(report.succeeded);
    mean.mae /= n;
    for (auto& rate : mean.delta_rates) rate /= n;
    report.mean = mean;
    MetricSummary pooled{pooled_distance / static_cast<double>(pooled_points), {}};
    for (std::size_t d = 0; d < k; ++d) {
      pooled.delta_rates.push_back(100.0 * static_cast<double>(pooled_hits[d]) /
                                   static_cast<double>(pooled_points));
    }
    report.pooled = pooled;
  }
}

EvalReport run_eval(const std::vector<EvalItem>& items, const RunConfig& config,
                    std::vector<PairResult> load_failures) {
  config.validate();
  EvalReport report;
  report.deltas = config.deltas;
  report.delta_norm = config.delta_norm;
  report.pairs = std::move(load_failures);

  for (const auto& item : items) {
    try {
      if (item.p1.empty() || item.p1.size() != item.p2.size()) {
        throw Error(ErrorKind::Validation, "keypoint lists must be equal and non-empty");
      }
      const PairOutcome outcome = match_grids(item.grid1, item.grid2, config, item.pair_id);
      const auto estimated = project_points(outcome.homography(), item.p1);
      PairResult r =
          score_pair(item.pair_id, estimated, item.p2, item.p1, config.deltas, config.delta_norm);
      r.matches = outcome.matches.pairs.size();
      r.loss = pointwise_loss(outcome.homography(), item.p1, item.p2);
      r.homography = outcome.homography();
      if (outcome.refined.status == RefineStatus::NumericalFailure) {
        r.message = outcome.refined.diagnostic;
      }
      report.pairs.push_back(std::move(r));
    } catch (const Error& e) {
      report.pairs.push_back(failure(item.pair_id, e.kind(), e.what()));
    }
  }
  aggregate(report);
  return report;
}

FeatureGrid load_grid_for(const std::filesystem::path& path, const RunConfig& config) {
  if (path.extension() == ".fgrd") return load_feature_grid(path);
  return describe_image(load_image(path), config, path.filename().string());
}

LoadedDataset load_dataset(const std::vector<ManifestEntry>& entries, const RunConfig& config) {
  LoadedDataset out;
  for (const auto& entry : entries) {
    std::string pair_id = entry.kind == ManifestEntry::Kind::Annotation
                              ? entry.annotation.stem().string()
                              : entry.homography.stem().string();
    try {
      if (entry.kind == ManifestEntry::Kind::Annotation) {
        KeypointAnnotation annotation = load_annotation(entry.annotation);
        pair_id = annotation.pair_id;
        FeatureGrid g1 = load_grid_for(annotation.image1, config);
        FeatureGrid g2 = load_grid_for(annotation.image2, config);
        annotation.size1 = {g1.source_image_width(), g1.source_image_height()};
        annotation.size2 = {g2.source_image_width(), g2.source_image_height()};
        out.items.push_back(make_eval_item(annotation, std::move(g1), std::move(g2)));
      } else {
        const Homography h = read_homography(entry.homography);
        const auto p1 = load_keypoints(entry.keypoints);
        FeatureGrid g1 = load_grid_for(entry.image1, config);
        FeatureGrid g2 = load_grid_for(entry.image2, config);
        out.items.push_back(make_eval_item(pair_id, std::move(g1), std::move(g2), p1, h));
      }
    } catch (const Error& e) {
      out.failures.push_back(failure(pair_id, e.kind(), e.what()));
    }
  }
  return out;
}

std::string format_report_table(const EvalReport& report) {
  std::ostringstream out;
  out << "metric\tmean\tpooled\n";
  auto cell = [](const std::optional<MetricSummary>& s, std::size_t d) {
    if (!s) return std::string("-");
    return fixed2(d < s->delta_rates.size() ? s->delta_rates[d] : s->mae);
  };
  for (std::size_t d = 0; d < report.deltas.size(); ++d) {
    out << "δ ≤ " << format_delta(report.deltas[d]) << '\t' << cell(report.mean, d) << '\t'
        << cell(report.pooled, d) << '\n';
  }
  const std::size_t mae_row = report.deltas.size();
  out << "MAE\t" << cell(report.mean, mae_row) << '\t' << cell(report.pooled, mae_row) << '\n';
  return out.str();
}

std::string format_pair_table(const EvalReport& report) {
  std::ostringstream out;
  out << "pair_id\tstatus\tpoints\tmatches";
  for (double d : report.deltas) out << "\tδ ≤ " << format_delta(d);
  out << "\tMAE\tbaseline_MAE\n";
  for (const auto& r : report.pairs) {
    out << r.pair_id << '\t' << (r.ok ? "ok" : r.failure_code) << '\t' << r.points << '\t'
        << r.matches;
    for (std::size_t d = 0; d < report.deltas.size(); ++d) {
      out << '\t' << (r.ok ? fixed2(r.delta_rates[d]) : "-");
    }
    out << '\t' << (r.ok ? fixed2(r.mae) : "-") << '\t' << (r.ok ? fixed2(r.baseline_mae) : "-")
        << '\n';
  }
  return out.str();
}

std::string report_to_json(const EvalReport& report) {
  using nlohmann::ordered_json;
  auto summary = [&](const std::optional<MetricSummary>& s) -> ordered_json {
    if (!s) return nullptr;
    ordered_json rates = ordered_json::object();
    for (std::size_t d = 0; d < report.deltas.size(); ++d) {
      rates[format_delta(report.deltas[d])] = s->delta_rates[d];
    }
    return {{"delta_rates", rates}, {"mae", s->mae}};
  };
  ordered_json pairs = ordered_json::array();
  for (const auto& r : report.pairs) {
    ordered_json p = {{"pair_id", r.pair_id}, {"ok", r.ok}};
    if (!r.ok) {
      p["failure_code"] = r.failure_code;
      p["message"] = r.message;
    } else {
      ordered_json rates = ordered_json::object();
      for (std::size_t d = 0; d < report.deltas.size(); ++d) {
        rates[format_delta(report.deltas[d])] = r.delta_rates[d];
      }
      ordered_json rows = ordered_json::array();
      for (int i = 0; i < 3; ++i) {
        rows.push_back({r.homography(i, 0), r.homography(i, 1), r.homography(i, 2)});
      }
      p["points"] = r.points;
      p["matches"] = r.matches;
      p["delta_rates"] = rates;
      p["mae"] = r.mae;
      p["loss"] = r.loss;
      p["baseline_mae"] = r.baseline_mae;
      p["homography"] = rows;
      if (!r.message.empty()) p["message"] = r.message;
    }
    pairs.push_back(std::move(p));
  }
  const ordered_json j = {
      {"deltas", report.deltas},
      {"delta_norm", to_string(report.delta_norm)},
      {"succeeded", report.succeeded},
      {"excluded", report.excluded},
      {"mean", summary(report.mean)},
      {"pooled", summary(report.pooled)},
      {"pairs", pairs},
  };
  return j.dump(2) + "\n";
}

}  // namespace jgmatch
