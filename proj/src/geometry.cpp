#include "mq/geometry.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <thread>

#include "mq/error.hpp"
#include "mq/rng.hpp"
#include "mq/text.hpp"

namespace mq {

PointCloud::PointCloud(std::size_t n, std::size_t dim, std::vector<double> coords)
    : n_(n), dim_(dim), coords_(std::move(coords)) {
  if (n_ == 0 || dim_ == 0) {
    throw Error(ErrorKind::Size, "point cloud needs n >= 1 and D >= 1");
  }
  if (coords_.size() != n_ * dim_) {
    throw Error(ErrorKind::Shape, "coordinate count " + std::to_string(coords_.size()) +
                                      " does not match n*D = " + std::to_string(n_ * dim_));
  }
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    if (!std::isfinite(coords_[k])) {
      throw Error(ErrorKind::Parameter, "non-finite coordinate at row " +
                                            std::to_string(k / dim_) + ", column " +
                                            std::to_string(k % dim_));
    }
  }
}

std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::Euclidean: return "euclidean";
    case Metric::Manhattan: return "manhattan";
    case Metric::Chebyshev: return "chebyshev";
  }
  return "euclidean";
}

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::Euclidean;
  if (name == "manhattan") return Metric::Manhattan;
  if (name == "chebyshev") return Metric::Chebyshev;
  throw Error(ErrorKind::Parameter, "unknown metric '" + std::string(name) + "'");
}

double distance(std::span<const double> a, std::span<const double> b, Metric metric) noexcept {
  double acc = 0.0;
  switch (metric) {
    case Metric::Euclidean:
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double t = a[k] - b[k];
        acc += t * t;
      }
      return std::sqrt(acc);
    case Metric::Manhattan:
      for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] - b[k]);
      return acc;
    case Metric::Chebyshev:
      for (std::size_t k = 0; k < a.size(); ++k) acc = std::max(acc, std::abs(a[k] - b[k]));
      return acc;
  }
  return acc;
}

DistanceMatrix::DistanceMatrix(std::size_t n, Metric metric, std::vector<double> entries)
    : n_(n), metric_(metric), d_(std::move(entries)) {
  if (d_.size() != n_ * n_) {
    throw Error(ErrorKind::Shape, "distance matrix needs n*n entries");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (d_[i * n_ + i] != 0.0) {
      throw Error(ErrorKind::Parameter, "distance matrix diagonal must be zero");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const double v = d_[i * n_ + j];
      if (!std::isfinite(v) || v < 0.0 || v != d_[j * n_ + i]) {
        throw Error(ErrorKind::Parameter, "distance matrix entry (" + std::to_string(i) + ", " +
                                              std::to_string(j) +
                                              ") is negative, non-finite or asymmetric");
      }
    }
  }
}

double DistanceMatrix::max_entry() const noexcept {
  return d_.empty() ? 0.0 : *std::max_element(d_.begin(), d_.end());
}

DistanceMatrix pairwise_distances(const PointCloud& pc, Metric metric, unsigned threads) {
  const std::size_t n = pc.size();
  std::vector<double> d(n * n, 0.0);

  // Each worker owns a strided set of rows i and writes d[i][j], d[j][i] for j < i,
  // so every entry is computed exactly once by the same expression.
  auto fill = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < n; i += stride) {
      const auto a = pc.row(i);
      for (std::size_t j = 0; j < i; ++j) {
        const double v = distance(a, pc.row(j), metric);
        d[i * n + j] = v;
        d[j * n + i] = v;
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n / 64)));
  if (threads <= 1) {
    fill(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(fill, t, threads);
  }
  return DistanceMatrix(n, metric, std::move(d));
}

// ---- file formats ---------------------------------------------------------

CloudFormat format_for_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".mqpc" || ext == ".bin") return CloudFormat::PackedBinary;
  return CloudFormat::Csv;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

PointCloud parse_csv_pointcloud(std::string_view text) {
  std::vector<double> coords;
  std::size_t dim = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;

  while (!text.empty()) {
    const auto eol = text.find('\n');
    const auto line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    std::size_t cols = 0;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      const auto token = trim(rest.substr(0, comma));
      double v = 0.0;
      const auto* first = token.data();
      const auto* last = token.data() + token.size();
      // from_chars rejects a leading '+', which is still a valid decimal real.
      if (first != last && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (token.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ", column " +
                                          std::to_string(cols + 1) + ": cannot parse '" +
                                          std::string(token) + "' as a finite number");
      }
      coords.push_back(v);
      ++cols;
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }

    if (rows == 0) {
      dim = cols;
    } else if (cols != dim) {
      throw Error(ErrorKind::Format, "line " + std::to_string(line_no) + " has " +
                                         std::to_string(cols) + " columns, expected " +
                                         std::to_string(dim));
    }
    ++rows;
  }

  if (rows == 0) throw Error(ErrorKind::EmptyInput, "no points in CSV input");
  return PointCloud(rows, dim, std::move(coords));
}

std::string format_csv_pointcloud(const PointCloud& pc) {
  std::string out;
  for (std::size_t i = 0; i < pc.size(); ++i) {
    for (std::size_t j = 0; j < pc.dim(); ++j) {
      if (j) out.push_back(',');
      out += format_real(pc(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

namespace {

std::uint32_t read_u32_le(const std::byte* p) {
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) v = (v << 8) | std::to_integer<std::uint32_t>(p[k]);
  return v;
}

void write_u32_le(std::vector<std::byte>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::byte>((v >> (8 * k)) & 0xFF));
}

double read_f64_le(const std::byte* p) {
  std::uint64_t bits = 0;
  for (int k = 7; k >= 0; --k) bits = (bits << 8) | std::to_integer<std::uint64_t>(p[k]);
  return std::bit_cast<double>(bits);
}

void write_f64_le(std::vector<std::byte>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<std::byte>((bits >> (8 * k)) & 0xFF));
}

constexpr std::size_t kHeaderSize = 4 + 1 + 4 + 4;

}  // namespace

PointCloud parse_packed_pointcloud(std::span<const std::byte> bytes) {
  if (bytes.empty()) throw Error(ErrorKind::EmptyInput, "empty packed-binary input");
  if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), "MQPC", 4) != 0) {
    throw Error(ErrorKind::Format, "missing MQPC header");
  }
  if (std::to_integer<std::uint8_t>(bytes[4]) != kPackedVersion) {
    throw Error(ErrorKind::Format, "unsupported packed-binary version " +
                                       std::to_string(std::to_integer<int>(bytes[4])));
  }
  const std::size_t n = read_u32_le(bytes.data() + 5);
  const std::size_t dim = read_u32_le(bytes.data() + 9);
  if (n == 0 || dim == 0) throw Error(ErrorKind::EmptyInput, "packed-binary header declares no points");
  const std::size_t expected = kHeaderSize + n * dim * 8;
  if (bytes.size() != expected) {
    throw Error(ErrorKind::Format, "packed-binary payload is " + std::to_string(bytes.size()) +
                                       " bytes, header implies " + std::to_string(expected));
  }
  std::vector<double> coords(n * dim);
  for (std::size_t k = 0; k < coords.size(); ++k) {
    coords[k] = read_f64_le(bytes.data() + kHeaderSize + 8 * k);
  }
  return PointCloud(n, dim, std::move(coords));
}

std::vector<std::byte> encode_packed_pointcloud(const PointCloud& pc) {
  std::vector<std::byte> out;
  out.reserve(kHeaderSize + pc.data().size() * 8);
  for (char c : {'M', 'Q', 'P', 'C'}) out.push_back(static_cast<std::byte>(c));
  out.push_back(static_cast<std::byte>(kPackedVersion));
  write_u32_le(out, static_cast<std::uint32_t>(pc.size()));
  write_u32_le(out, static_cast<std::uint32_t>(pc.dim()));
  for (double v : pc.data()) write_f64_le(out, v);
  return out;
}

PointCloud load_pointcloud(const std::filesystem::path& path, CloudFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (format == CloudFormat::Csv) return parse_csv_pointcloud(content);
  return parse_packed_pointcloud(std::as_bytes(std::span(content.data(), content.size())));
}

void save_pointcloud(const PointCloud& pc, const std::filesystem::path& path, CloudFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  if (format == CloudFormat::Csv) {
    out << format_csv_pointcloud(pc);
  } else {
    const auto bytes = encode_packed_pointcloud(pc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

// ---- image ingestion ------------------------------------------------------

namespace {

double scale_pixel(std::uint8_t v, PixelScale scale) {
  return scale == PixelScale::None ? static_cast<double>(v) : v / 127.5 - 1.0;
}

}  // namespace

PointCloud flatten_images(std::span<const Image> batch, PixelScale scale) {
  if (batch.empty()) throw Error(ErrorKind::EmptyInput, "empty image batch");
  const ImageShape shape = batch.front().shape;
  if (shape.pixels() == 0) throw Error(ErrorKind::Shape, "image has a zero-length axis");
  std::vector<double> coords;
  coords.reserve(batch.size() * shape.pixels());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& img = batch[i];
    if (!(img.shape == shape) || img.bytes.size() != shape.pixels()) {
      throw Error(ErrorKind::Shape, "image " + std::to_string(i) + " does not share the batch shape " +
                                        std::to_string(shape.height) + "x" +
                                        std::to_string(shape.width) + "x" +
                                        std::to_string(shape.channels));
    }
    for (auto v : img.bytes) coords.push_back(scale_pixel(v, scale));
  }
  return PointCloud(batch.size(), shape.pixels(), std::move(coords));
}

PointCloud flatten_images(std::span<const std::uint8_t> tensor, std::size_t count,
                          ImageShape shape, PixelScale scale) {
  if (count == 0) throw Error(ErrorKind::EmptyInput, "empty image batch");
  if (shape.pixels() == 0 || tensor.size() != count * shape.pixels()) {
    throw Error(ErrorKind::Shape, "byte tensor of size " + std::to_string(tensor.size()) +
                                      " does not hold " + std::to_string(count) + " images of " +
                                      std::to_string(shape.pixels()) + " values");
  }
  std::vector<double> coords(tensor.size());
  std::transform(tensor.begin(), tensor.end(), coords.begin(),
                 [scale](std::uint8_t v) { return scale_pixel(v, scale); });
  return PointCloud(count, shape.pixels(), std::move(coords));
}

Image unflatten_image(const PointCloud& pc, std::size_t row, ImageShape shape, PixelScale scale) {
  if (pc.dim() != shape.pixels()) {
    throw Error(ErrorKind::Shape, "point dimension does not match image shape");
  }
  if (row >= pc.size()) throw Error(ErrorKind::Size, "row out of range");
  Image img{shape, std::vector<std::uint8_t>(shape.pixels())};
  const auto values = pc.row(row);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double v = scale == PixelScale::None ? values[k] : (values[k] + 1.0) * 127.5;
    img.bytes[k] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
  return img;
}

// ---- sampling -------------------------------------------------------------

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m == 0 || m > n) {
    throw Error(ErrorKind::Size, "subsample size " + std::to_string(m) + " not in [1, " +
                                     std::to_string(n) + "]");
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates: the first m slots become a uniform m-subset.
  Rng rng(seed);
  for (std::size_t k = 0; k < m; ++k) {
    const auto pick = k + static_cast<std::size_t>(rng.below(n - k));
    std::swap(idx[k], idx[pick]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

PointCloud subsample(const PointCloud& pc, std::size_t m, std::uint64_t seed) {
  const auto idx = subsample_indices(pc.size(), m, seed);
  std::vector<double> coords;
  coords.reserve(m * pc.dim());
  for (auto i : idx) {
    const auto r = pc.row(i);
    coords.insert(coords.end(), r.begin(), r.end());
  }
  return PointCloud(m, pc.dim(), std::move(coords));
}

}  // namespace mq
