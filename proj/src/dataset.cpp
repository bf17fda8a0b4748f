#include "jgmatch/dataset.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "jgmatch/error.hpp"

namespace jgmatch {

bool ImageSize::contains(const Point2& p) const {
  return p.x >= -0.5 && p.y >= -0.5 && p.x <= width - 0.5 && p.y <= height - 0.5;
}

void KeypointAnnotation::validate() const {
  if (p1.empty() || p1.size() != p2.size()) {
    throw Error(ErrorKind::Validation,
                "annotation '" + pair_id + "' needs equal, non-empty keypoint lists (" +
                    std::to_string(p1.size()) + " vs " + std::to_string(p2.size()) + ")");
  }
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if ((size1.known() && !size1.contains(p1[i])) || (size2.known() && !size2.contains(p2[i]))) {
      throw Error(ErrorKind::Validation, "annotation '" + pair_id + "' keypoint " +
                                             std::to_string(i) + " lies outside its image");
    }
  }
}

AugmentOp parse_augment_op(const std::string& name) {
  if (name == "flip_lr") return AugmentOp::FlipLR;
  if (name == "rot90") return AugmentOp::Rot90;
  if (name == "rot180") return AugmentOp::Rot180;
  if (name == "rot270") return AugmentOp::Rot270;
  throw Error(ErrorKind::Parameter, "unknown augmentation '" + name + "'");
}

const char* to_string(AugmentOp op) noexcept {
  switch (op) {
    case AugmentOp::FlipLR: return "flip_lr";
    case AugmentOp::Rot90: return "rot90";
    case AugmentOp::Rot180: return "rot180";
    case AugmentOp::Rot270: return "rot270";
  }
  return "?";
}

ImageSize augmented_size(AugmentOp op, ImageSize size) {
  if (op == AugmentOp::Rot90 || op == AugmentOp::Rot270) return {size.height, size.width};
  return size;
}

Eigen::Matrix3d augmentation_matrix(AugmentOp op, ImageSize size) {
  const double w1 = size.width - 1;
  const double h1 = size.height - 1;
  Eigen::Matrix3d t;
  switch (op) {
    case AugmentOp::FlipLR: t << -1, 0, w1, 0, 1, 0, 0, 0, 1; break;
    case AugmentOp::Rot90: t << 0, -1, h1, 1, 0, 0, 0, 0, 1; break;
    case AugmentOp::Rot180: t << -1, 0, w1, 0, -1, h1, 0, 0, 1; break;
    case AugmentOp::Rot270: t << 0, 1, 0, -1, 0, w1, 0, 0, 1; break;
  }
  return t;
}

Point2 augment_point(AugmentOp op, ImageSize size, const Point2& p) {
  const double w1 = size.width - 1;
  const double h1 = size.height - 1;
  switch (op) {
    case AugmentOp::FlipLR: return {w1 - p.x, p.y};
    case AugmentOp::Rot90: return {h1 - p.y, p.x};
    case AugmentOp::Rot180: return {w1 - p.x, h1 - p.y};
    case AugmentOp::Rot270: return {p.y, w1 - p.x};
  }
  return p;
}

KeypointAnnotation augment_pair(const KeypointAnnotation& annotation, AugmentOp op) {
  if (!annotation.size1.known() || !annotation.size2.known()) {
    throw Error(ErrorKind::Parameter,
                "augmentation of '" + annotation.pair_id + "' needs known image sizes");
  }
  annotation.validate();
  KeypointAnnotation out = annotation;
  out.size1 = augmented_size(op, annotation.size1);
  out.size2 = augmented_size(op, annotation.size2);
  for (auto& p : out.p1) p = augment_point(op, annotation.size1, p);
  for (auto& p : out.p2) p = augment_point(op, annotation.size2, p);
  out.validate();
  return out;
}

GrayImage transform_image(const GrayImage& image, AugmentOp op) {
  const ImageSize in_size{image.width(), image.height()};
  const ImageSize out_size = augmented_size(op, in_size);
  std::vector<double> pixels(image.pixels().size());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      int tx = x, ty = y;
      switch (op) {
        case AugmentOp::FlipLR: tx = image.width() - 1 - x; break;
        case AugmentOp::Rot90: tx = image.height() - 1 - y; ty = x; break;
        case AugmentOp::Rot180: tx = image.width() - 1 - x; ty = image.height() - 1 - y; break;
        case AugmentOp::Rot270: tx = y; ty = image.width() - 1 - x; break;
      }
      pixels[static_cast<std::size_t>(ty) * out_size.width + tx] = image(x, y);
    }
  }
  return GrayImage(out_size.width, out_size.height, std::move(pixels));
}

namespace {

std::string read_text(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, std::string("cannot open ") + what + " " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

KeypointAnnotation parse_annotation(const std::string& text,
                                    const std::filesystem::path& base_dir) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_header = false;
  KeypointAnnotation out;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_comment(line);
    if (blank(line)) continue;
    std::istringstream fields(line);
    if (!have_header) {
      std::string keyword, id, img1, img2, extra;
      if (!(fields >> keyword >> id >> img1 >> img2) || keyword != "pair" || (fields >> extra)) {
        throw Error(ErrorKind::Format, "line " + std::to_string(line_no) +
                                           ": expected 'pair <id> <img1> <img2>'");
      }
      out.pair_id = id;
      out.image1 = resolve(base_dir, img1);
      out.image2 = resolve(base_dir, img2);
      have_header = true;
      continue;
    }
    Point2 a, b;
    std::string extra;
    if (!(fields >> a.x >> a.y >> b.x >> b.y) || (fields >> extra)) {
      throw Error(ErrorKind::Format,
                  "line " + std::to_string(line_no) + ": expected 'x1 y1 x2 y2'");
    }
    out.p1.push_back(a);
    out.p2.push_back(b);
  }
  if (!have_header) throw Error(ErrorKind::Format, "annotation has no 'pair' header");
  if (out.p1.empty()) {
    throw Error(ErrorKind::Validation, "annotation '" + out.pair_id + "' has no correspondences");
  }
  return out;
}

KeypointAnnotation load_annotation(const std::filesystem::path& path) {
  const std::string text = read_text(path, "annotation");
  try {
    return parse_annotation(text, path.parent_path());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string format_annotation(const KeypointAnnotation& annotation) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "pair " << annotation.pair_id << ' ' << annotation.image1.string() << ' '
      << annotation.image2.string() << '\n';
  for (std::size_t i = 0; i < annotation.p1.size(); ++i) {
    out << annotation.p1[i].x << ' ' << annotation.p1[i].y << ' ' << annotation.p2[i].x << ' '
        << annotation.p2[i].y << '\n';
  }
  return out.str();
}

std::vector<Point2> load_keypoints(const std::filesystem::path& path) {
  std::istringstream in(read_text(path, "keypoint list"));
  std::vector<Point2> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_comment(line);
    if (blank(line)) continue;
    std::istringstream fields(line);
    Point2 p;
    std::string extra;
    if (!(fields >> p.x >> p.y) || (fields >> extra)) {
      throw Error(ErrorKind::Format,
                  path.string() + ":" + std::to_string(line_no) + ": expected 'x y'");
    }
    out.push_back(p);
  }
  if (out.empty()) throw Error(ErrorKind::Validation, path.string() + ": no keypoints");
  return out;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::istringstream in(read_text(path, "manifest"));
  const auto base = path.parent_path();
  std::vector<ManifestEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_comment(line);
    if (blank(line)) continue;
    std::istringstream fields(line);
    std::string kind, extra;
    fields >> kind;
    ManifestEntry entry;
    entry.line = line_no;
    if (kind == "annotation") {
      std::string a;
      if (!(fields >> a) || (fields >> extra)) {
        throw Error(ErrorKind::Usage, path.string() + ":" + std::to_string(line_no) +
                                          ": expected 'annotation <path>'");
      }
      entry.annotation = resolve(base, a);
    } else if (kind == "homography") {
      std::string i1, i2, h, k;
      if (!(fields >> i1 >> i2 >> h >> k) || (fields >> extra)) {
        throw Error(ErrorKind::Usage,
                    path.string() + ":" + std::to_string(line_no) +
                        ": expected 'homography <img1> <img2> <H-path> <keypoint-source-path>'");
      }
      entry.kind = ManifestEntry::Kind::Homography;
      entry.image1 = resolve(base, i1);
      entry.image2 = resolve(base, i2);
      entry.homography = resolve(base, h);
      entry.keypoints = resolve(base, k);
    } else {
      throw Error(ErrorKind::Usage, path.string() + ":" + std::to_string(line_no) +
                                        ": unknown manifest entry '" + kind + "'");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

DatasetSplit split_dataset(const std::vector<std::string>& pair_ids, std::uint64_t seed) {
  if (pair_ids.size() < 10) {
    throw Error(ErrorKind::Validation, "dataset split needs at least 10 pairs, got " +
                                           std::to_string(pair_ids.size()));
  }
  std::vector<std::string> order = pair_ids;
  std::mt19937_64 rng(seed);
  // Uniform in [0, bound) by rejection; same sequence on every platform.
  auto bounded = [&rng](std::uint64_t bound) {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = rng();
    } while (x >= limit);
    return x % bound;
  };
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[bounded(i + 1)]);
  }
  const std::size_t n = order.size();
  const std::size_t n_validation = n / 10;
  const std::size_t n_test = n / 5;
  const std::size_t n_train = n - n_validation - n_test;
  DatasetSplit split;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.validation.assign(order.begin() + n_train, order.begin() + n_train + n_validation);
  split.test.assign(order.begin() + n_train + n_validation, order.end());
  return split;
}

}  // namespace jgmatch
