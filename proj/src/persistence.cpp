#include "mq/persistence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <map>
#include <string>
#include <unordered_map>

#include "mq/error.hpp"
#include "mq/text.hpp"
#include "mq/union_find.hpp"

namespace mq {

std::size_t PersistenceDiagram::essential_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [](const auto& p) { return p.essential(); }));
}

void PersistenceDiagram::canonicalize() { std::sort(pairs.begin(), pairs.end()); }

std::vector<Face> boundary(const FilteredSimplex& simplex) {
  std::vector<Face> faces;
  if (simplex.dim == 0) return faces;
  const auto v = simplex.vertices();
  for (std::size_t drop = 0; drop < v.size(); ++drop) {
    Face f;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k != drop) f.push_back(v[k]);
    }
    faces.push_back(std::move(f));
  }
  return faces;
}

std::vector<Face> boundary_of_chain(std::span<const Face> chain) {
  std::map<Face, int> parity;
  for (const auto& s : chain) {
    if (s.size() <= 1) continue;
    for (auto& f : boundary(FilteredSimplex::make(s, 0.0))) parity[std::move(f)] ^= 1;
  }
  std::vector<Face> out;
  for (auto& [face, odd] : parity) {
    if (odd) out.push_back(face);
  }
  return out;
}

namespace {

using Index = std::uint32_t;
constexpr Index kNone = UINT32_MAX;

// Base-n positional code of a vertex list; unique within one dimension.
class SimplexKey {
 public:
  SimplexKey(std::size_t n, int max_dim) : base_(std::max<std::size_t>(n, 2)) {
    // base^(max_dim+1) must fit in 64 bits.
    long double cap = 1;
    for (int k = 0; k <= max_dim; ++k) cap *= static_cast<long double>(base_);
    if (cap > static_cast<long double>(UINT64_MAX)) {
      throw Error(ErrorKind::Size, "too many vertices for simplex keys of dimension " +
                                       std::to_string(max_dim));
    }
  }

  std::uint64_t operator()(std::span<const VertexId> vertices) const noexcept {
    std::uint64_t key = 0;
    for (auto v : vertices) key = key * base_ + v;
    return key;
  }

 private:
  std::uint64_t base_;
};

// a ^= b for sorted index sets.
void add_column(std::vector<Index>& a, const std::vector<Index>& b, std::vector<Index>& scratch) {
  scratch.clear();
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                std::back_inserter(scratch));
  a.swap(scratch);
}

}  // namespace

std::vector<PersistenceDiagram> compute_persistence(const Filtration& f) {
  const auto& simplices = f.simplices;
  if (simplices.size() >= kNone) throw Error(ErrorKind::Size, "filtration too large");
  const Index m = static_cast<Index>(simplices.size());
  const int top = f.max_dim;

  SimplexKey key(f.n_vertices, std::max(top, 0));
  std::vector<std::unordered_map<std::uint64_t, Index>> position(top + 1);
  std::vector<std::vector<Index>> by_dim(top + 1);
  for (Index j = 0; j < m; ++j) {
    const auto& s = simplices[j];
    if (s.dim < 0 || s.dim > top) {
      throw Error(ErrorKind::Integrity, "simplex " + std::to_string(j) + " has dimension " +
                                            std::to_string(s.dim) + " outside 0.." +
                                            std::to_string(top));
    }
    const auto v = s.vertices();
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (v[k] >= f.n_vertices || (k > 0 && v[k - 1] >= v[k])) {
        throw Error(ErrorKind::Integrity,
                    "simplex " + std::to_string(j) + " has unsorted or out-of-range vertices");
      }
    }
    if (!position[s.dim].emplace(key(v), j).second) {
      throw Error(ErrorKind::Integrity, "simplex " + std::to_string(j) + " appears twice");
    }
    by_dim[s.dim].push_back(j);
  }

  // Facet indices of simplex j, ascending.
  auto facets = [&](Index j, std::vector<Index>& col) {
    const auto& s = simplices[j];
    col.clear();
    std::array<VertexId, kMaxSimplexDim> face{};
    const auto v = s.vertices();
    for (std::size_t drop = 0; drop < v.size(); ++drop) {
      std::size_t w = 0;
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (k != drop) face[w++] = v[k];
      }
      const auto& table = position[s.dim - 1];
      const auto it = table.find(key(std::span<const VertexId>(face.data(), w)));
      if (it == table.end() || it->second >= j) {
        throw Error(ErrorKind::Integrity,
                    "filtration is not face-closed at simplex " + std::to_string(j) +
                        (it == table.end() ? " (missing face)" : " (face sorts after it)"));
      }
      col.push_back(it->second);
    }
    std::sort(col.begin(), col.end());
  };

  // pivot_owner[i] = column whose reduced lowest entry is i.
  std::vector<Index> pivot_owner(m, kNone);
  std::vector<Index> partner(m, kNone);  // birth simplex -> death simplex and back
  std::vector<bool> cleared(m, false);
  std::unordered_map<Index, std::vector<Index>> reduced;
  std::vector<Index> col, scratch;

  // Highest dimension first so that paired births can be cleared.
  for (int d = top; d >= 1; --d) {
    for (Index j : by_dim[d]) {
      if (cleared[j]) continue;
      facets(j, col);
      while (!col.empty()) {
        const Index low = col.back();
        const Index owner = pivot_owner[low];
        if (owner == kNone) break;
        add_column(col, reduced.at(owner), scratch);
      }
      if (col.empty()) continue;
      const Index low = col.back();
      pivot_owner[low] = j;
      partner[low] = j;
      partner[j] = low;
      cleared[low] = true;
      reduced.emplace(j, std::move(col));
      col = {};
    }
  }

  std::vector<PersistenceDiagram> diagrams(std::max(top, 0));
  for (int d = 0; d < top; ++d) {
    diagrams[d].dim = d;
    for (Index i : by_dim[d]) {
      const double birth = simplices[i].value;
      if (partner[i] == kNone) {
        diagrams[d].pairs.push_back({birth, kInfinity});
      } else if (partner[i] > i) {  // i is a birth, not a death
        const double death = simplices[partner[i]].value;
        if (death > birth) diagrams[d].pairs.push_back({birth, death});
      }
    }
    diagrams[d].canonicalize();
  }
  return diagrams;
}

PersistenceDiagram compute_h0_unionfind(const DistanceMatrix& dm, EpsMax eps_max) {
  const std::size_t n = dm.size();
  const double eps = eps_max.value_or(dm.max_entry());

  struct Edge {
    double length;
    std::uint32_t i, j;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dm(i, j) <= eps) {
        edges.push_back({dm(i, j), static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
      }
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.length != b.length) return a.length < b.length;
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });

  PersistenceDiagram h0;
  UnionFind components(n);
  std::size_t alive = n;
  for (const auto& e : edges) {
    if (!components.unite(e.i, e.j)) continue;
    --alive;
    if (e.length > 0.0) h0.pairs.push_back({0.0, e.length});
  }
  for (std::size_t k = 0; k < alive; ++k) h0.pairs.push_back({0.0, kInfinity});
  h0.canonicalize();
  return h0;
}

void write_diagrams_csv(std::ostream& out, std::span<const PersistenceDiagram> diagrams) {
  out << "dim,birth,death\n";
  for (const auto& d : diagrams) {
    for (const auto& p : d.pairs) {
      out << d.dim << ',' << format_real(p.birth) << ',' << format_real(p.death) << '\n';
    }
  }
}

std::vector<PersistenceDiagram> parse_diagrams_csv(std::string_view text) {
  std::vector<PersistenceDiagram> diagrams;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string line(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "dim,birth,death") {
        throw Error(ErrorKind::Format, "diagram CSV must start with header dim,birth,death");
      }
      header_seen = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw Error(ErrorKind::Format, "line " + std::to_string(line_no) + ": expected 3 fields");
    }
    int dim = 0;
    double birth = 0.0, death = 0.0;
    try {
      std::size_t used = 0;
      dim = std::stoi(line.substr(0, c1), &used);
      if (used != c1 || dim < 0) throw std::invalid_argument("dim");
      const auto b = line.substr(c1 + 1, c2 - c1 - 1);
      birth = std::stod(b, &used);
      if (used != b.size() || !std::isfinite(birth)) throw std::invalid_argument("birth");
      const auto d = line.substr(c2 + 1);
      if (d == "inf") {
        death = kInfinity;
      } else {
        death = std::stod(d, &used);
        if (used != d.size() || !std::isfinite(death)) throw std::invalid_argument("death");
      }
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": cannot parse '" +
                                        line + "'");
    }
    if (!(death > birth)) {
      throw Error(ErrorKind::Format, "line " + std::to_string(line_no) + ": death must exceed birth");
    }
    if (static_cast<std::size_t>(dim) >= diagrams.size()) {
      const auto old = diagrams.size();
      diagrams.resize(dim + 1);
      for (auto k = old; k < diagrams.size(); ++k) diagrams[k].dim = static_cast<int>(k);
    }
    diagrams[dim].pairs.push_back({birth, death});
  }
  if (!header_seen) throw Error(ErrorKind::EmptyInput, "empty diagram CSV");
  for (auto& d : diagrams) d.canonicalize();
  return diagrams;
}

}  // namespace mq
