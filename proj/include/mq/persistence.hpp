#pragma once

#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "mq/geometry.hpp"
#include "mq/rips.hpp"

namespace mq {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PersistencePair {
  double birth = 0.0;
  double death = kInfinity;  // +inf for essential classes

  bool essential() const noexcept { return death == kInfinity; }
  double lifespan() const noexcept { return death - birth; }

  friend auto operator<=>(const PersistencePair&, const PersistencePair&) = default;
};

// Pairs of one homology dimension, kept sorted by (birth, death).
struct PersistenceDiagram {
  int dim = 0;
  std::vector<PersistencePair> pairs;

  std::size_t essential_count() const noexcept;
  void canonicalize();  // sort pairs

  friend bool operator==(const PersistenceDiagram&, const PersistenceDiagram&) = default;
};

using Face = std::vector<VertexId>;

// Facets of a simplex, deleting each vertex in turn. Z/2 coefficients, so the
// result is an unsigned list. A vertex has an empty boundary.
std::vector<Face> boundary(const FilteredSimplex& simplex);

// Boundary of a Z/2 chain: faces occurring an odd number of times, sorted.
std::vector<Face> boundary_of_chain(std::span<const Face> chain);

// Column reduction of the Z/2 boundary matrix in filtration order, with
// clearing. Returns diagrams for dims 0 .. max_dim-1. Zero-persistence pairs
// are dropped. Throws Error(Integrity) if a face is missing or sorts after
// its coface.
std::vector<PersistenceDiagram> compute_persistence(const Filtration& f);

// Dimension-0 diagram from a Kruskal sweep over the edges with length <= eps_max.
PersistenceDiagram compute_h0_unionfind(const DistanceMatrix& dm, EpsMax eps_max = std::nullopt);

// CSV with header "dim,birth,death"; infinite deaths are written as "inf".
void write_diagrams_csv(std::ostream& out, std::span<const PersistenceDiagram> diagrams);

// Inverse of write_diagrams_csv. Diagrams come back indexed by dim, with empty
// diagrams filling any dimension that has no rows.
std::vector<PersistenceDiagram> parse_diagrams_csv(std::string_view text);

}  // namespace mq
