#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "mq/geometry.hpp"

namespace mq {

using VertexId = std::uint32_t;

inline constexpr int kMaxSimplexDim = 3;

// A simplex of at most four vertices together with its filtration value
// (its diameter: the largest pairwise distance among its vertices).
struct FilteredSimplex {
  std::array<VertexId, kMaxSimplexDim + 1> vertex{};  // first dim+1 entries used, strictly increasing
  int dim = 0;
  double value = 0.0;

  std::span<const VertexId> vertices() const noexcept {
    return {vertex.data(), static_cast<std::size_t>(dim + 1)};
  }

  static FilteredSimplex make(std::span<const VertexId> vertices, double value);

  friend bool operator==(const FilteredSimplex&, const FilteredSimplex&) = default;
};

// Reduction order: value ascending, then dimension, then vertices lexicographically.
// Every face sorts before its cofaces.
bool filtration_less(const FilteredSimplex& a, const FilteredSimplex& b) noexcept;

struct Filtration {
  std::vector<FilteredSimplex> simplices;
  std::size_t n_vertices = 0;
  double eps_max = 0.0;
  int max_dim = 0;  // highest simplex dimension built; homology up to max_dim - 1
};

// nullopt means "auto": the largest entry of the distance matrix.
using EpsMax = std::optional<double>;

// Vietoris-Rips clique filtration of all simplices up to max_dim (1..3) with
// diameter <= eps_max. Throws Error(UnsupportedDimension) for max_dim outside
// 1..3 and Error(Parameter) for an explicit eps_max <= 0.
Filtration build_rips(const DistanceMatrix& dm, int max_dim, EpsMax eps_max = std::nullopt,
                      unsigned threads = 1);

// One simplex per line: "value dim v0 v1 ...".
void write_filtration_dump(std::ostream& out, const Filtration& f);

}  // namespace mq
