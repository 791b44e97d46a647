#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mq {

// n points in R^D, row-major, double precision. Immutable after construction;
// row indices are stable identifiers used by the filtration and pairing code.
class PointCloud {
 public:
  // Throws Error(Size) if n or D is zero, Error(Shape) if coords.size() != n*D,
  // Error(Parameter) if any coordinate is not finite.
  PointCloud(std::size_t n, std::size_t dim, std::vector<double> coords);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return coords_[i * dim_ + j];
  }
  std::span<const double> data() const noexcept { return coords_; }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::size_t n_;
  std::size_t dim_;
  std::vector<double> coords_;
};

enum class Metric { Euclidean, Manhattan, Chebyshev };

std::string_view to_string(Metric m) noexcept;
Metric parse_metric(std::string_view name);

double distance(std::span<const double> a, std::span<const double> b, Metric metric) noexcept;

// Dense symmetric distance matrix with zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix(std::size_t n, Metric metric, std::vector<double> entries);

  std::size_t size() const noexcept { return n_; }
  Metric metric() const noexcept { return metric_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept { return {d_.data() + i * n_, n_}; }

  // Largest entry; the enclosing diameter of the cloud.
  double max_entry() const noexcept;

 private:
  std::size_t n_;
  Metric metric_;
  std::vector<double> d_;
};

// threads == 0 means hardware concurrency. The result does not depend on it.
DistanceMatrix pairwise_distances(const PointCloud& pc, Metric metric = Metric::Euclidean,
                                  unsigned threads = 1);

// ---- file formats ---------------------------------------------------------

enum class CloudFormat { Csv, PackedBinary };

// ".mqpc" and ".bin" map to PackedBinary, everything else to Csv.
CloudFormat format_for_path(const std::filesystem::path& path);

// CSV: one point per line, comma separated; blank lines and lines starting
// with '#' are skipped.
PointCloud parse_csv_pointcloud(std::string_view text);
std::string format_csv_pointcloud(const PointCloud& pc);

// Packed binary: "MQPC", version 0x01, u32 LE n, u32 LE D, n*D f64 LE.
inline constexpr std::uint8_t kPackedVersion = 0x01;
PointCloud parse_packed_pointcloud(std::span<const std::byte> bytes);
std::vector<std::byte> encode_packed_pointcloud(const PointCloud& pc);

PointCloud load_pointcloud(const std::filesystem::path& path, CloudFormat format);
inline PointCloud load_pointcloud(const std::filesystem::path& path) {
  return load_pointcloud(path, format_for_path(path));
}
void save_pointcloud(const PointCloud& pc, const std::filesystem::path& path, CloudFormat format);
inline void save_pointcloud(const PointCloud& pc, const std::filesystem::path& path) {
  save_pointcloud(pc, path, format_for_path(path));
}

// ---- image ingestion ------------------------------------------------------

enum class PixelScale { None, MinusOneToOne };

struct ImageShape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  std::size_t pixels() const noexcept { return height * width * channels; }
  friend bool operator==(const ImageShape&, const ImageShape&) = default;
};

struct Image {
  ImageShape shape;
  std::vector<std::uint8_t> bytes;  // row-major H, W, C
};

// Each image becomes one point with D = H*W*C. MinusOneToOne maps v to v/127.5 - 1.
PointCloud flatten_images(std::span<const Image> batch, PixelScale scale = PixelScale::None);

// Same, for a contiguous n*H*W*C byte tensor.
PointCloud flatten_images(std::span<const std::uint8_t> tensor, std::size_t count,
                          ImageShape shape, PixelScale scale = PixelScale::None);

// Inverse of flatten_images for one row; values are rounded back to bytes.
Image unflatten_image(const PointCloud& pc, std::size_t row, ImageShape shape,
                      PixelScale scale = PixelScale::None);

// ---- sampling -------------------------------------------------------------

// m distinct rows, uniformly without replacement, in ascending original order.
PointCloud subsample(const PointCloud& pc, std::size_t m, std::uint64_t seed);

// Row indices chosen by subsample(), ascending.
std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t m, std::uint64_t seed);

}  // namespace mq
