#include <cmath>
#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "mq/error.hpp"
#include "mq/geometry.hpp"
#include "mq/rng.hpp"
#include "oracle.hpp"

using namespace mq;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected mq::Error");
  return ErrorKind::Io;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mq_test_geometry_" + name);
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("csv parsing") {
  auto pc = parse_csv_pointcloud("0,0\n1,0\n");
  CHECK(pc.size() == 2);
  CHECK(pc.dim() == 2);
  CHECK(pc(1, 0) == 1.0);
  CHECK(pc(1, 1) == 0.0);

  auto single = parse_csv_pointcloud("1.5\n");
  CHECK(single.size() == 1);
  CHECK(single.dim() == 1);
  CHECK(single(0, 0) == 1.5);

  auto with_header = parse_csv_pointcloud("# x,y\n\n-1e-3, +2\r\n3,4");
  CHECK(with_header.size() == 2);
  CHECK(with_header(0, 0) == -1e-3);
  CHECK(with_header(0, 1) == 2.0);
}

TEST_CASE("csv errors") {
  CHECK(kind_of([] { parse_csv_pointcloud(""); }) == ErrorKind::EmptyInput);
  CHECK(kind_of([] { parse_csv_pointcloud("# only a header\n"); }) == ErrorKind::EmptyInput);
  CHECK(kind_of([] { parse_csv_pointcloud("1,2\n3\n"); }) == ErrorKind::Format);
  CHECK(kind_of([] { parse_csv_pointcloud("1,2\n3,x\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_csv_pointcloud("1,nan\n"); }) == ErrorKind::Parse);

  try {
    parse_csv_pointcloud("1,2\n3,4\n5\n");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  try {
    parse_csv_pointcloud("1,2\n3,abc\n");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }
}

TEST_CASE("packed binary round trip is bit exact") {
  const PointCloud pc(3, 2, {0.1, -2.5e-300, 1.0 / 3.0, 7.0, -0.0, 1e300});
  const auto bytes = encode_packed_pointcloud(pc);
  REQUIRE(bytes.size() == 13 + 6 * 8);
  CHECK(std::to_integer<char>(bytes[0]) == 'M');
  CHECK(std::to_integer<int>(bytes[4]) == 1);
  CHECK(std::to_integer<int>(bytes[5]) == 3);  // n, little endian
  CHECK(std::to_integer<int>(bytes[9]) == 2);  // D

  const auto path = temp_file("roundtrip.mqpc");
  save_pointcloud(pc, path, CloudFormat::PackedBinary);
  const auto back = load_pointcloud(path);
  REQUIRE(back.size() == 3);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(std::bit_cast<std::uint64_t>(back.data()[k]) ==
          std::bit_cast<std::uint64_t>(pc.data()[k]));
  }
  std::filesystem::remove(path);
}

TEST_CASE("packed binary errors") {
  std::vector<std::byte> none;
  CHECK(kind_of([&] { parse_packed_pointcloud(none); }) == ErrorKind::EmptyInput);
  auto bytes = encode_packed_pointcloud(PointCloud(1, 1, {1.0}));
  bytes[0] = std::byte{'X'};
  CHECK(kind_of([&] { parse_packed_pointcloud(bytes); }) == ErrorKind::Format);
  bytes = encode_packed_pointcloud(PointCloud(1, 1, {1.0}));
  bytes.pop_back();
  CHECK(kind_of([&] { parse_packed_pointcloud(bytes); }) == ErrorKind::Format);
}

TEST_CASE("csv round trip within 1e-12") {
  Rng rng(3);
  std::vector<double> c(40);
  for (auto& v : c) v = rng.normal() * 1e3;
  const PointCloud pc(10, 4, c);
  const auto path = temp_file("roundtrip.csv");
  save_pointcloud(pc, path, CloudFormat::Csv);
  const auto back = load_pointcloud(path);
  REQUIRE(back.size() == 10);
  for (std::size_t k = 0; k < c.size(); ++k) CHECK(back.data()[k] == doctest::Approx(c[k]).epsilon(1e-12));
  std::filesystem::remove(path);
}

TEST_CASE("missing file is an io error") {
  CHECK(kind_of([] { load_pointcloud("/nonexistent/dir/x.csv"); }) == ErrorKind::Io);
}

TEST_CASE("point cloud invariants") {
  CHECK(kind_of([] { PointCloud(0, 2, {}); }) == ErrorKind::Size);
  CHECK(kind_of([] { PointCloud(2, 2, {1, 2, 3}); }) == ErrorKind::Shape);
  CHECK(kind_of([] { PointCloud(1, 1, {INFINITY}); }) == ErrorKind::Parameter);
}

TEST_CASE("flatten images") {
  Image rgb{{1, 1, 3}, {0, 127, 255}};
  auto pc = flatten_images(std::span(&rgb, 1));
  CHECK(pc.dim() == 3);
  CHECK(pc(0, 0) == 0.0);
  CHECK(pc(0, 1) == 127.0);
  CHECK(pc(0, 2) == 255.0);

  Image white{{1, 1, 1}, {255}};
  CHECK(flatten_images(std::span(&white, 1), PixelScale::MinusOneToOne)(0, 0) == 1.0);
  Image black{{1, 1, 1}, {0}};
  CHECK(flatten_images(std::span(&black, 1), PixelScale::MinusOneToOne)(0, 0) == -1.0);

  std::vector<std::uint8_t> cifar(2 * 32 * 32 * 3, 9);
  CHECK(flatten_images(cifar, 2, {32, 32, 3}).dim() == 3072);

  std::vector<Image> mixed{{{1, 1, 3}, {1, 2, 3}}, {{1, 3, 1}, {1, 2, 3}}};
  CHECK(kind_of([&] { flatten_images(mixed); }) == ErrorKind::Shape);
}

TEST_CASE("flatten then unflatten is the identity") {
  Rng rng(11);
  std::vector<Image> batch;
  for (int i = 0; i < 4; ++i) {
    Image img{{4, 5, 3}, std::vector<std::uint8_t>(60)};
    for (auto& b : img.bytes) b = static_cast<std::uint8_t>(rng.below(256));
    batch.push_back(img);
  }
  for (auto scale : {PixelScale::None, PixelScale::MinusOneToOne}) {
    const auto pc = flatten_images(batch, scale);
    // Row-major H, W, C: pixel (h, w, c) lands at column (h*W + w)*C + c.
    CHECK(pc(2, (1 * 5 + 3) * 3 + 2) ==
          flatten_images(std::span(&batch[2], 1), scale)(0, (1 * 5 + 3) * 3 + 2));
    for (std::size_t i = 0; i < batch.size(); ++i) {
      CHECK(unflatten_image(pc, i, {4, 5, 3}, scale).bytes == batch[i].bytes);
    }
  }
}

TEST_CASE("pairwise distances") {
  auto d = pairwise_distances(PointCloud(2, 2, {0, 0, 3, 4}));
  CHECK(d(0, 1) == 5.0);
  CHECK(d(1, 0) == 5.0);

  auto line = pairwise_distances(PointCloud(3, 1, {0, 1, 3}));
  const double expected[3][3] = {{0, 1, 3}, {1, 0, 2}, {3, 2, 0}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(line(i, j) == expected[i][j]);
  }

  auto m = pairwise_distances(PointCloud(2, 2, {0, 0, 3, 4}), Metric::Manhattan);
  CHECK(m(0, 1) == 7.0);
  auto c = pairwise_distances(PointCloud(2, 2, {0, 0, 3, 4}), Metric::Chebyshev);
  CHECK(c(0, 1) == 4.0);
}

TEST_CASE("pairwise distances match a naive double loop") {
  const auto pc = oracle::random_cloud(10, 3, 42);
  const auto d = pairwise_distances(pc);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(d(i, i) == 0.0);
    for (std::size_t j = 0; j < 10; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += (pc(i, k) - pc(j, k)) * (pc(i, k) - pc(j, k));
      CHECK(std::abs(d(i, j) - std::sqrt(s)) <= 1e-12);
    }
  }
}

TEST_CASE("threaded distances equal serial distances") {
  const auto pc = oracle::random_cloud(300, 5, 1);
  const auto a = pairwise_distances(pc, Metric::Euclidean, 1);
  const auto b = pairwise_distances(pc, Metric::Euclidean, 4);
  for (std::size_t i = 0; i < 300; ++i) {
    for (std::size_t j = 0; j < 300; ++j) REQUIRE(a(i, j) == b(i, j));
  }
}

TEST_CASE("distance matrix properties on random clouds") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto pc = oracle::random_cloud(25, 3, seed);
    const auto d = pairwise_distances(pc);

    for (std::size_t i = 0; i < 25; ++i) {
      for (std::size_t j = 0; j < 25; ++j) {
        CHECK(d(i, j) == d(j, i));
        for (std::size_t k = 0; k < 25; ++k) CHECK(d(i, k) <= d(i, j) + d(j, k) + 1e-9);
      }
    }

    // Permutation equivariance.
    std::vector<std::size_t> perm(25);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed + 100);
    for (std::size_t k = 24; k > 0; --k) std::swap(perm[k], perm[rng.below(k + 1)]);
    std::vector<double> c;
    for (auto p : perm) {
      const auto r = pc.row(p);
      c.insert(c.end(), r.begin(), r.end());
    }
    const auto dp = pairwise_distances(PointCloud(25, 3, c));
    for (std::size_t i = 0; i < 25; ++i) {
      for (std::size_t j = 0; j < 25; ++j) CHECK(dp(i, j) == d(perm[i], perm[j]));
    }
  }
}

TEST_CASE("subsample") {
  const auto pc = oracle::random_cloud(50, 2, 5);
  CHECK(subsample(pc, 50, 9) == pc);

  const auto one = subsample(pc, 1, 123);
  bool found = false;
  for (std::size_t i = 0; i < 50; ++i) {
    found |= pc(i, 0) == one(0, 0) && pc(i, 1) == one(0, 1);
  }
  CHECK(found);

  CHECK(subsample(pc, 20, 77) == subsample(pc, 20, 77));
  CHECK_FALSE(subsample(pc, 20, 77) == subsample(pc, 20, 78));

  const auto idx = subsample_indices(50, 20, 77);
  CHECK(std::adjacent_find(idx.begin(), idx.end(), std::greater_equal<>()) == idx.end());

  CHECK(kind_of([&] { subsample(pc, 51, 0); }) == ErrorKind::Size);
  CHECK(kind_of([&] { subsample(pc, 0, 0); }) == ErrorKind::Size);
}

TEST_CASE("subsample is roughly uniform") {
  std::vector<int> hits(10, 0);
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    for (auto i : subsample_indices(10, 3, seed)) ++hits[i];
  }
  for (int h : hits) CHECK(std::abs(h - 600) < 120);
}

}  // TEST_SUITE
