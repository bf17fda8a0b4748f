#include "jgmatch/matching.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "jgmatch/error.hpp"

namespace jgmatch {

Point2 GridGeometry::cell_center(int index) const {
  const int row = index / grid_width;
  const int col = index % grid_width;
  return {(col + 0.5) * image_width / grid_width - 0.5,
          (row + 0.5) * image_height / grid_height - 0.5};
}

bool GridGeometry::contains(const Point2& p) const {
  return p.x >= -0.5 && p.y >= -0.5 && p.x <= image_width - 0.5 && p.y <= image_height - 0.5;
}

GridGeometry geometry_of(const FeatureGrid& grid) {
  // Grids without a recorded source size are treated as one pixel per cell.
  const int w = grid.source_image_width() > 0 ? grid.source_image_width() : grid.grid_width();
  const int h =
      grid.source_image_height() > 0 ? grid.source_image_height() : grid.grid_height();
  return {grid.grid_width(), grid.grid_height(), w, h};
}

std::vector<Point2> MatchSet::points1() const {
  std::vector<Point2> out;
  out.reserve(pairs.size());
  for (const auto& m : pairs) out.push_back(m.p1);
  return out;
}

std::vector<Point2> MatchSet::points2() const {
  std::vector<Point2> out;
  out.reserve(pairs.size());
  for (const auto& m : pairs) out.push_back(m.p2);
  return out;
}

namespace {

struct Neighbors {
  int nearest = -1;
  double d1 = std::numeric_limits<double>::infinity();
  double d2 = std::numeric_limits<double>::infinity();
};

// Ties resolve to the lowest index.
Neighbors nearest_two(const Eigen::MatrixXd& sq_dist, Eigen::Index row, bool by_column) {
  Neighbors nb;
  const Eigen::Index count = by_column ? sq_dist.rows() : sq_dist.cols();
  for (Eigen::Index j = 0; j < count; ++j) {
    const double d = by_column ? sq_dist(j, row) : sq_dist(row, j);
    if (d < nb.d1) {
      nb.d2 = nb.d1;
      nb.d1 = d;
      nb.nearest = static_cast<int>(j);
    } else if (d < nb.d2) {
      nb.d2 = d;
    }
  }
  nb.d1 = std::sqrt(nb.d1);
  nb.d2 = std::sqrt(nb.d2);
  return nb;
}

}  // namespace

MatchSet embed_match(const SpectralEmbedding& embedding, const GridGeometry& geometry1,
                     const GridGeometry& geometry2, const MatchOptions& options,
                     std::string pair_id) {
  if (embedding.m < 1) throw Error(ErrorKind::Parameter, "embedding has m = 0");
  if (!(options.ratio_threshold > 0.0 && options.ratio_threshold <= 1.0)) {
    throw Error(ErrorKind::Parameter, "ratio threshold must lie in (0, 1]");
  }
  if (embedding.rows1.rows() != geometry1.cell_count() ||
      embedding.rows2.rows() != geometry2.cell_count()) {
    throw Error(ErrorKind::Dimension, "embedding rows do not match the grid geometry");
  }

  const Eigen::MatrixXd& a = embedding.rows1;
  const Eigen::MatrixXd& b = embedding.rows2;
  Eigen::MatrixXd sq_dist(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      sq_dist(i, j) = (a.row(i) - b.row(j)).squaredNorm();
    }
  }

  MatchSet out;
  out.pair_id = std::move(pair_id);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Neighbors fwd = nearest_two(sq_dist, i, false);
    if (fwd.nearest < 0) continue;
    if (options.ratio_threshold < 1.0 && !(fwd.d1 < options.ratio_threshold * fwd.d2)) {
      continue;
    }
    if (options.mutual && nearest_two(sq_dist, fwd.nearest, true).nearest != i) continue;
    out.pairs.push_back({geometry1.cell_center(static_cast<int>(i)),
                         geometry2.cell_center(fwd.nearest), fwd.d1, static_cast<int>(i),
                         fwd.nearest});
  }
  return out;
}

void write_matches(const MatchSet& matches, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write matches " + path.string());
  out << std::setprecision(10);
  for (const auto& m : matches.pairs) {
    out << m.p1.x << ' ' << m.p1.y << ' ' << m.p2.x << ' ' << m.p2.y << ' ' << m.score << '\n';
  }
}

}  // namespace jgmatch
