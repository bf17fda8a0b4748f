#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "jgmatch/dataset.hpp"
#include "jgmatch/error.hpp"

using namespace jgmatch;

namespace {

KeypointAnnotation random_annotation(std::mt19937_64& rng) {
  KeypointAnnotation a;
  a.pair_id = "p" + std::to_string(rng() % 1000);
  a.image1 = "a.png";
  a.image2 = "b.png";
  a.size1 = {20 + static_cast<int>(rng() % 200), 20 + static_cast<int>(rng() % 200)};
  a.size2 = {20 + static_cast<int>(rng() % 200), 20 + static_cast<int>(rng() % 200)};
  const int n = 1 + static_cast<int>(rng() % 12);
  for (int i = 0; i < n; ++i) {
    a.p1.push_back({std::uniform_real_distribution<double>(0, a.size1.width - 1)(rng),
                    std::uniform_real_distribution<double>(0, a.size1.height - 1)(rng)});
    a.p2.push_back({std::uniform_real_distribution<double>(0, a.size2.width - 1)(rng),
                    std::uniform_real_distribution<double>(0, a.size2.height - 1)(rng)});
  }
  return a;
}

bool near(const KeypointAnnotation& a, const KeypointAnnotation& b, double tol) {
  if (a.size1 != b.size1 || a.size2 != b.size2 || a.p1.size() != b.p1.size()) return false;
  for (std::size_t i = 0; i < a.p1.size(); ++i) {
    if (distance(a.p1[i], b.p1[i]) > tol || distance(a.p2[i], b.p2[i]) > tol) return false;
  }
  return true;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("jgmatch_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("point transforms") {
  const ImageSize s{10, 6};
  const Point2 p{2, 1};
  const Point2 f = augment_point(AugmentOp::FlipLR, s, p);
  CHECK(f.x == 7);
  CHECK(f.y == 1);
  const Point2 r = augment_point(AugmentOp::Rot90, s, p);
  CHECK(r.x == 4);  // h - 1 - y
  CHECK(r.y == 2);  // x
  const Point2 r2 = augment_point(AugmentOp::Rot180, s, p);
  CHECK(r2.x == 7);
  CHECK(r2.y == 4);
  const Point2 r3 = augment_point(AugmentOp::Rot270, s, p);
  CHECK(r3.x == 1);  // y
  CHECK(r3.y == 7);  // w - 1 - x
  CHECK(augmented_size(AugmentOp::Rot90, s) == ImageSize{6, 10});
  CHECK(augmented_size(AugmentOp::Rot180, s) == s);
}

TEST_CASE("pixel transforms agree with point transforms") {
  std::mt19937_64 rng(81);
  std::vector<double> px(5 * 3);
  for (auto& v : px) v = std::uniform_real_distribution<double>(0, 1)(rng);
  const GrayImage img(5, 3, px);
  for (AugmentOp op : {AugmentOp::FlipLR, AugmentOp::Rot90, AugmentOp::Rot180, AugmentOp::Rot270}) {
    const GrayImage t = transform_image(img, op);
    const ImageSize ts = augmented_size(op, {5, 3});
    CHECK(t.width() == ts.width);
    CHECK(t.height() == ts.height);
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 5; ++x) {
        const Point2 q = augment_point(op, {5, 3}, {static_cast<double>(x), static_cast<double>(y)});
        CHECK(t(static_cast<int>(q.x), static_cast<int>(q.y)) == img(x, y));
      }
    }
  }
}

TEST_CASE("augmentation group structure over random annotations") {
  std::mt19937_64 rng(82);
  for (int trial = 0; trial < 100; ++trial) {
    const KeypointAnnotation a = random_annotation(rng);
    CHECK(near(augment_pair(augment_pair(a, AugmentOp::FlipLR), AugmentOp::FlipLR), a, 1e-6));
    KeypointAnnotation r = a;
    for (int k = 0; k < 4; ++k) r = augment_pair(r, AugmentOp::Rot90);
    CHECK(near(r, a, 1e-6));
    CHECK(near(augment_pair(augment_pair(a, AugmentOp::Rot90), AugmentOp::Rot90),
               augment_pair(a, AugmentOp::Rot180), 1e-6));
    CHECK(near(augment_pair(augment_pair(a, AugmentOp::Rot180), AugmentOp::Rot90),
               augment_pair(a, AugmentOp::Rot270), 1e-6));
    for (AugmentOp op : {AugmentOp::FlipLR, AugmentOp::Rot90, AugmentOp::Rot180, AugmentOp::Rot270}) {
      CHECK_NOTHROW(augment_pair(a, op).validate());
    }
  }
}

TEST_CASE("augmentation matrices act like the point maps") {
  const ImageSize s{31, 17};
  for (AugmentOp op : {AugmentOp::FlipLR, AugmentOp::Rot90, AugmentOp::Rot180, AugmentOp::Rot270}) {
    const Eigen::Matrix3d m = augmentation_matrix(op, s);
    const Point2 p{4.25, 9.5};
    const Eigen::Vector3d q = m * Eigen::Vector3d(p.x, p.y, 1.0);
    const Point2 expected = augment_point(op, s, p);
    CHECK(q.x() / q.z() == doctest::Approx(expected.x));
    CHECK(q.y() / q.z() == doctest::Approx(expected.y));
  }
}

TEST_CASE("augment op names") {
  CHECK(parse_augment_op("flip_lr") == AugmentOp::FlipLR);
  CHECK(parse_augment_op("rot270") == AugmentOp::Rot270);
  CHECK(std::string(to_string(AugmentOp::Rot90)) == "rot90");
  try {
    parse_augment_op("shear");
    FAIL("expected a parameter error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parameter);
  }
  KeypointAnnotation unsized;
  unsized.p1 = {{1, 1}};
  unsized.p2 = {{1, 1}};
  CHECK_THROWS_AS(augment_pair(unsized, AugmentOp::FlipLR), Error);
}

TEST_CASE("annotation text") {
  const std::string text =
      "# comment\n"
      "pair p7 left.png right.png\n"
      "1 2 3 4\n"
      "\n"
      "5.5 6.5 7.5 8.5  # trailing\n";
  const KeypointAnnotation a = parse_annotation(text, "/data");
  CHECK(a.pair_id == "p7");
  CHECK(a.image1 == std::filesystem::path("/data/left.png"));
  CHECK(a.image2 == std::filesystem::path("/data/right.png"));
  REQUIRE(a.p1.size() == 2);
  CHECK(a.p1[1] == Point2{5.5, 6.5});
  CHECK(a.p2[1] == Point2{7.5, 8.5});

  const KeypointAnnotation back = parse_annotation(format_annotation(a));
  CHECK(back.pair_id == a.pair_id);
  CHECK(back.p1 == a.p1);
  CHECK(back.p2 == a.p2);

  CHECK_THROWS_AS(parse_annotation("pair x a b\n1 2 3\n"), Error);
  CHECK_THROWS_AS(parse_annotation("1 2 3 4\n"), Error);
  CHECK_THROWS_AS(parse_annotation("pair x a b\n"), Error);
  CHECK_THROWS_AS(parse_annotation("pair x a b\n1 2 3 nan\n"), Error);
}

TEST_CASE("annotation validation") {
  KeypointAnnotation a;
  a.size1 = {10, 10};
  a.size2 = {10, 10};
  a.p1 = {{1, 1}};
  a.p2 = {{12, 1}};
  CHECK_THROWS_AS(a.validate(), Error);
  a.p2 = {{9.4, 1}};
  CHECK_NOTHROW(a.validate());
  a.p2.push_back({1, 1});
  CHECK_THROWS_AS(a.validate(), Error);
}

TEST_CASE("manifest and keypoint files") {
  const auto dir = scratch_dir("manifest");
  {
    std::ofstream(dir / "m.txt") << "# pairs\nannotation a.txt\nhomography i1.png i2.png h.txt kp.txt\n";
    std::ofstream(dir / "kp.txt") << "1 2\n# c\n3.5 4\n";
  }
  const auto entries = load_manifest(dir / "m.txt");
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].kind == ManifestEntry::Kind::Annotation);
  CHECK(entries[0].annotation == dir / "a.txt");
  CHECK(entries[1].kind == ManifestEntry::Kind::Homography);
  CHECK(entries[1].homography == dir / "h.txt");
  CHECK(entries[1].keypoints == dir / "kp.txt");
  CHECK(entries[1].line == 3);

  const auto kp = load_keypoints(dir / "kp.txt");
  REQUIRE(kp.size() == 2);
  CHECK(kp[1] == Point2{3.5, 4});

  std::ofstream(dir / "bad.txt") << "annotation\n";
  CHECK_THROWS_AS(load_manifest(dir / "bad.txt"), Error);
  std::ofstream(dir / "bad2.txt") << "pairs a b\n";
  CHECK_THROWS_AS(load_manifest(dir / "bad2.txt"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("dataset split") {
  auto ids = [](int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back("pair" + std::to_string(i));
    return out;
  };
  const DatasetSplit ten = split_dataset(ids(10), 0);
  CHECK(ten.train.size() == 7);
  CHECK(ten.validation.size() == 1);
  CHECK(ten.test.size() == 2);

  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xFFFFFFFFFFFFFFFFULL}) {
    const auto input = ids(100);
    const DatasetSplit s = split_dataset(input, seed);
    CHECK(s.train.size() == 70);
    CHECK(s.validation.size() == 10);
    CHECK(s.test.size() == 20);
    std::vector<std::string> all = s.train;
    all.insert(all.end(), s.validation.begin(), s.validation.end());
    all.insert(all.end(), s.test.begin(), s.test.end());
    CHECK(std::set<std::string>(all.begin(), all.end()).size() == 100);
    std::sort(all.begin(), all.end());
    auto sorted = input;
    std::sort(sorted.begin(), sorted.end());
    CHECK(all == sorted);

    const DatasetSplit again = split_dataset(input, seed);
    CHECK(again.train == s.train);
    CHECK(again.validation == s.validation);
    CHECK(again.test == s.test);
  }
  CHECK(split_dataset(ids(100), 1).train != split_dataset(ids(100), 2).train);
  CHECK_THROWS_AS(split_dataset(ids(9), 0), Error);
}
