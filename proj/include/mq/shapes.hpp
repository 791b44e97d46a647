#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "mq/geometry.hpp"

namespace mq {

enum class ShapeKind { Circle, Sphere, Torus, SwissRoll, UniformCube, GaussianBlob };

std::string_view to_string(ShapeKind k) noexcept;
ShapeKind parse_shape_kind(std::string_view name);

struct ShapeSpec {
  ShapeKind kind = ShapeKind::Circle;
  std::size_t n = 100;
  double noise = 0.0;         // std-dev of isotropic gaussian noise added per coordinate
  std::uint64_t seed = 0;
  std::size_t dim = 2;        // ambient dimension for UniformCube and GaussianBlob
  double major_radius = 2.0;  // torus only, R > r > 0
  double minor_radius = 0.5;
};

// Throws Error(Parameter) for an invalid spec. Deterministic for a fixed spec:
//   circle        uniform angle on the unit circle in R^2
//   sphere        normalized gaussian triple on the unit sphere in R^3
//   torus         angles drawn uniformly w.r.t. surface area (rejection), in R^3
//   swiss-roll    t = 1.5 pi (1 + 2u), height 21 v: (t cos t, height, t sin t)
//   uniform-cube  uniform in [0, 1]^dim
//   gaussian-blob standard normal in R^dim
PointCloud generate(const ShapeSpec& spec);

// Points (cos a, sin a) on the unit circle.
PointCloud circle_points(std::span<const double> angles);

}  // namespace mq
