#include "mq/rips.hpp"

#include <algorithm>
#include <atomic>
#include <string>
#include <thread>

#include "mq/error.hpp"
#include "mq/text.hpp"

namespace mq {

FilteredSimplex FilteredSimplex::make(std::span<const VertexId> vertices, double value) {
  if (vertices.empty() || vertices.size() > kMaxSimplexDim + 1) {
    throw Error(ErrorKind::UnsupportedDimension, "simplex must have 1 to 4 vertices");
  }
  FilteredSimplex s;
  s.dim = static_cast<int>(vertices.size()) - 1;
  s.value = value;
  std::copy(vertices.begin(), vertices.end(), s.vertex.begin());
  return s;
}

bool filtration_less(const FilteredSimplex& a, const FilteredSimplex& b) noexcept {
  if (a.value != b.value) return a.value < b.value;
  if (a.dim != b.dim) return a.dim < b.dim;
  return std::lexicographical_compare(a.vertex.begin(), a.vertex.begin() + a.dim + 1,
                                      b.vertex.begin(), b.vertex.begin() + b.dim + 1);
}

namespace {

// Sorted-list intersection restricted to entries > floor.
std::vector<VertexId> intersect_above(std::span<const VertexId> a, std::span<const VertexId> b,
                                      VertexId floor) {
  std::vector<VertexId> out;
  auto ia = std::upper_bound(a.begin(), a.end(), floor);
  auto ib = std::upper_bound(b.begin(), b.end(), floor);
  std::set_intersection(ia, a.end(), ib, b.end(), std::back_inserter(out));
  return out;
}

// All cliques whose smallest vertex is `v`, excluding the vertex itself.
void enumerate_from(VertexId v, const DistanceMatrix& dm, int max_dim,
                    const std::vector<std::vector<VertexId>>& upper,
                    std::vector<FilteredSimplex>& out) {
  const auto& nv = upper[v];
  for (VertexId u : nv) {
    const double duv = dm(v, u);
    const VertexId e[2] = {v, u};
    out.push_back(FilteredSimplex::make(e, duv));
    if (max_dim < 2) continue;
    const auto common_vu = intersect_above(nv, upper[u], u);
    for (VertexId w : common_vu) {
      const double dvuw = std::max({duv, dm(v, w), dm(u, w)});
      const VertexId t[3] = {v, u, w};
      out.push_back(FilteredSimplex::make(t, dvuw));
      if (max_dim < 3) continue;
      for (VertexId x : intersect_above(common_vu, upper[w], w)) {
        const double d4 = std::max({dvuw, dm(v, x), dm(u, x), dm(w, x)});
        const VertexId q[4] = {v, u, w, x};
        out.push_back(FilteredSimplex::make(q, d4));
      }
    }
  }
}

}  // namespace

Filtration build_rips(const DistanceMatrix& dm, int max_dim, EpsMax eps_max, unsigned threads) {
  if (max_dim < 1 || max_dim > kMaxSimplexDim) {
    throw Error(ErrorKind::UnsupportedDimension,
                "max_dim must be in 1..3, got " + std::to_string(max_dim));
  }
  if (eps_max && !(*eps_max > 0.0)) {
    throw Error(ErrorKind::Parameter, "eps_max must be positive, got " + format_real(*eps_max));
  }
  const double eps = eps_max.value_or(dm.max_entry());
  const std::size_t n = dm.size();

  // Neighbors j > i within the threshold, ascending.
  std::vector<std::vector<VertexId>> upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dm(i, j) <= eps) upper[i].push_back(static_cast<VertexId>(j));
    }
  }

  Filtration f;
  f.n_vertices = n;
  f.eps_max = eps;
  f.max_dim = max_dim;
  for (std::size_t i = 0; i < n; ++i) {
    const VertexId v[1] = {static_cast<VertexId>(i)};
    f.simplices.push_back(FilteredSimplex::make(v, 0.0));
  }

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t v = 0; v < n; ++v) {
      enumerate_from(static_cast<VertexId>(v), dm, max_dim, upper, f.simplices);
    }
  } else {
    // Work-stealing by leading vertex; the sort below makes the order canonical.
    std::vector<std::vector<FilteredSimplex>> parts(threads);
    std::atomic<std::size_t> next{0};
    {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          for (std::size_t v = next++; v < n; v = next++) {
            enumerate_from(static_cast<VertexId>(v), dm, max_dim, upper, parts[t]);
          }
        });
      }
    }
    for (auto& p : parts) f.simplices.insert(f.simplices.end(), p.begin(), p.end());
  }

  std::sort(f.simplices.begin(), f.simplices.end(), filtration_less);
  return f;
}

void write_filtration_dump(std::ostream& out, const Filtration& f) {
  for (const auto& s : f.simplices) {
    out << format_real(s.value) << ' ' << s.dim;
    for (auto v : s.vertices()) out << ' ' << v;
    out << '\n';
  }
}

}  // namespace mq
