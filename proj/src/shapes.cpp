#include "mq/shapes.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mq/error.hpp"
#include "mq/rng.hpp"

namespace mq {

std::string_view to_string(ShapeKind k) noexcept {
  switch (k) {
    case ShapeKind::Circle: return "circle";
    case ShapeKind::Sphere: return "sphere";
    case ShapeKind::Torus: return "torus";
    case ShapeKind::SwissRoll: return "swiss-roll";
    case ShapeKind::UniformCube: return "uniform-cube";
    case ShapeKind::GaussianBlob: return "gaussian-blob";
  }
  return "circle";
}

ShapeKind parse_shape_kind(std::string_view name) {
  for (auto k : {ShapeKind::Circle, ShapeKind::Sphere, ShapeKind::Torus, ShapeKind::SwissRoll,
                 ShapeKind::UniformCube, ShapeKind::GaussianBlob}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::Parameter, "unknown shape kind '" + std::string(name) + "'");
}

PointCloud circle_points(std::span<const double> angles) {
  std::vector<double> coords;
  coords.reserve(2 * angles.size());
  for (double a : angles) {
    coords.push_back(std::cos(a));
    coords.push_back(std::sin(a));
  }
  return PointCloud(angles.size(), 2, std::move(coords));
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void validate(const ShapeSpec& s) {
  if (s.n == 0) throw Error(ErrorKind::Parameter, "shape needs n >= 1");
  if (!(s.noise >= 0.0) || !std::isfinite(s.noise)) {
    throw Error(ErrorKind::Parameter, "noise must be a finite non-negative real");
  }
  if ((s.kind == ShapeKind::UniformCube || s.kind == ShapeKind::GaussianBlob) && s.dim == 0) {
    throw Error(ErrorKind::Parameter, "dim must be >= 1");
  }
  if (s.kind == ShapeKind::Torus && !(s.major_radius > s.minor_radius && s.minor_radius > 0.0)) {
    throw Error(ErrorKind::Parameter, "torus radii must satisfy R > r > 0");
  }
}

std::size_t ambient_dim(const ShapeSpec& s) {
  switch (s.kind) {
    case ShapeKind::Circle: return 2;
    case ShapeKind::Sphere:
    case ShapeKind::Torus:
    case ShapeKind::SwissRoll: return 3;
    case ShapeKind::UniformCube:
    case ShapeKind::GaussianBlob: return s.dim;
  }
  return 2;
}

}  // namespace

PointCloud generate(const ShapeSpec& spec) {
  validate(spec);
  const std::size_t dim = ambient_dim(spec);
  Rng rng(spec.seed);
  std::vector<double> c;
  c.reserve(spec.n * dim);

  for (std::size_t i = 0; i < spec.n; ++i) {
    switch (spec.kind) {
      case ShapeKind::Circle: {
        const double a = rng.uniform(0.0, kTwoPi);
        c.insert(c.end(), {std::cos(a), std::sin(a)});
        break;
      }
      case ShapeKind::Sphere: {
        double x, y, z, r;
        do {
          x = rng.normal();
          y = rng.normal();
          z = rng.normal();
          r = std::sqrt(x * x + y * y + z * z);
        } while (r == 0.0);
        c.insert(c.end(), {x / r, y / r, z / r});
        break;
      }
      case ShapeKind::Torus: {
        const double big = spec.major_radius, small = spec.minor_radius;
        // Area element is proportional to (R + r cos theta).
        double theta;
        do {
          theta = rng.uniform(0.0, kTwoPi);
        } while (rng.uniform() * (big + small) > big + small * std::cos(theta));
        const double phi = rng.uniform(0.0, kTwoPi);
        const double w = big + small * std::cos(theta);
        c.insert(c.end(), {w * std::cos(phi), w * std::sin(phi), small * std::sin(theta)});
        break;
      }
      case ShapeKind::SwissRoll: {
        const double t = 1.5 * std::numbers::pi * (1.0 + 2.0 * rng.uniform());
        const double height = 21.0 * rng.uniform();
        c.insert(c.end(), {t * std::cos(t), height, t * std::sin(t)});
        break;
      }
      case ShapeKind::UniformCube:
        for (std::size_t k = 0; k < dim; ++k) c.push_back(rng.uniform());
        break;
      case ShapeKind::GaussianBlob:
        for (std::size_t k = 0; k < dim; ++k) c.push_back(rng.normal());
        break;
    }
  }

  if (spec.noise > 0.0) {
    for (auto& v : c) v += spec.noise * rng.normal();
  }
  return PointCloud(spec.n, dim, std::move(c));
}

}  // namespace mq
