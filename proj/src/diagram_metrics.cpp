#include "mq/diagram_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "mq/error.hpp"
#include "mq/text.hpp"

namespace mq {

std::string InfinitePolicy::describe() const {
  if (kind == Kind::Exclude) return "excluded";
  return "capped(" + (cap ? format_real(*cap) : std::string("?")) + ")";
}

std::vector<PersistencePair> finite_pairs(const PersistenceDiagram& d, const InfinitePolicy& policy) {
  if (policy.kind == InfinitePolicy::Kind::Cap && !policy.cap) {
    throw Error(ErrorKind::Parameter, "capped infinite policy needs an eps_max");
  }
  std::vector<PersistencePair> out;
  out.reserve(d.pairs.size());
  for (const auto& p : d.pairs) {
    if (!p.essential()) {
      out.push_back(p);
    } else if (policy.kind == InfinitePolicy::Kind::Cap && *policy.cap > p.birth) {
      out.push_back({p.birth, *policy.cap});
    }
  }
  return out;
}

double persistence_entropy(const PersistenceDiagram& d, const InfinitePolicy& policy) {
  const auto pairs = finite_pairs(d, policy);
  if (pairs.size() <= 1) return 0.0;
  double total = 0.0;
  for (const auto& p : pairs) total += p.lifespan();
  double h = 0.0;
  for (const auto& p : pairs) {
    const double q = p.lifespan() / total;
    if (q > 0.0) h -= q * std::log(q);
  }
  return h;
}

namespace {

void check_p(double p) {
  if (!(p >= 1.0) || std::isinf(p)) {
    throw Error(ErrorKind::Parameter, "Wasserstein order p must be a finite real >= 1, got " +
                                          format_real(p));
  }
}

void check_dims(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  if (a.dim != b.dim) {
    throw Error(ErrorKind::Parameter, "cannot compare diagrams of dimension " +
                                          std::to_string(a.dim) + " and " + std::to_string(b.dim));
  }
}

double ground(const PersistencePair& x, const PersistencePair& y) {
  return std::max(std::abs(x.birth - y.birth), std::abs(x.death - y.death));
}

double to_diagonal(const PersistencePair& x) { return (x.death - x.birth) / 2.0; }

// Augmented square cost matrix of size n1+n2: rows are the points of `a` then
// one diagonal slot per point of `b`; columns are the points of `b` then one
// diagonal slot per point of `a`. Diagonal-to-diagonal costs nothing.
struct Augmented {
  std::size_t n1, n2;
  const std::vector<PersistencePair>& a;
  const std::vector<PersistencePair>& b;

  std::size_t size() const { return n1 + n2; }

  double operator()(std::size_t r, std::size_t c) const {
    const bool real_row = r < n1;
    const bool real_col = c < n2;
    if (real_row && real_col) return ground(a[r], b[c]);
    if (real_row) return to_diagonal(a[r]);
    if (real_col) return to_diagonal(b[c]);
    return 0.0;
  }
};

// Minimum-cost perfect assignment (Hungarian method with potentials), O(n^3).
// Returns the total cost of the optimal assignment.
template <class Cost>
double min_assignment(std::size_t n, const Cost& cost) {
  if (n == 0) return 0.0;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based: u, v are row/column potentials, match[c] is the row assigned to column c.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), slack(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (std::size_t r = 1; r <= n; ++r) {
    match[0] = r;
    std::size_t c0 = 0;
    std::fill(slack.begin(), slack.end(), kInf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[c0] = true;
      const std::size_t r0 = match[c0];
      double delta = kInf;
      std::size_t c1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = cost(r0 - 1, c - 1) - u[r0] - v[c];
        if (cur < slack[c]) {
          slack[c] = cur;
          way[c] = c0;
        }
        if (slack[c] < delta) {
          delta = slack[c];
          c1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          slack[c] -= delta;
        }
      }
      c0 = c1;
    } while (match[c0] != 0);
    do {
      const std::size_t c1 = way[c0];
      match[c0] = match[c1];
      c0 = c1;
    } while (c0);
  }
  // Sum the original costs rather than the potentials to avoid drift.
  double total = 0.0;
  for (std::size_t c = 1; c <= n; ++c) total += cost(match[c] - 1, c - 1);
  return total;
}

// Hopcroft-Karp: does the bipartite graph with edges cost(r, c) <= t have a
// perfect matching?
class PerfectMatching {
 public:
  explicit PerfectMatching(const Augmented& g) : g_(g), n_(g.size()) {}

  bool feasible(double t) {
    mate_row_.assign(n_, kFree);
    mate_col_.assign(n_, kFree);
    std::size_t matched = 0;
    while (bfs(t)) {
      for (std::size_t r = 0; r < n_; ++r) {
        if (mate_row_[r] == kFree && dfs(r, t)) ++matched;
      }
    }
    return matched == n_;
  }

 private:
  static constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();

  bool bfs(double t) {
    dist_.assign(n_, kFree);
    std::queue<std::size_t> q;
    for (std::size_t r = 0; r < n_; ++r) {
      if (mate_row_[r] == kFree) {
        dist_[r] = 0;
        q.push(r);
      }
    }
    bool reachable_free = false;
    while (!q.empty()) {
      const auto r = q.front();
      q.pop();
      for (std::size_t c = 0; c < n_; ++c) {
        if (g_(r, c) > t) continue;
        const auto next = mate_col_[c];
        if (next == kFree) {
          reachable_free = true;
        } else if (dist_[next] == kFree) {
          dist_[next] = dist_[r] + 1;
          q.push(next);
        }
      }
    }
    return reachable_free;
  }

  bool dfs(std::size_t r, double t) {
    for (std::size_t c = 0; c < n_; ++c) {
      if (g_(r, c) > t) continue;
      const auto next = mate_col_[c];
      if (next == kFree || (dist_[next] == dist_[r] + 1 && dfs(next, t))) {
        mate_row_[r] = c;
        mate_col_[c] = r;
        return true;
      }
    }
    dist_[r] = kFree;
    return false;
  }

  const Augmented& g_;
  std::size_t n_;
  std::vector<std::size_t> mate_row_, mate_col_, dist_;
};

}  // namespace

double wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, double p,
                   const InfinitePolicy& policy) {
  check_dims(a, b);
  check_p(p);
  const auto pa = finite_pairs(a, policy);
  const auto pb = finite_pairs(b, policy);
  const Augmented g{pa.size(), pb.size(), pa, pb};
  const std::size_t n = g.size();
  std::vector<double> cost(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) cost[r * n + c] = std::pow(g(r, c), p);
  }
  const double total =
      min_assignment(n, [&](std::size_t r, std::size_t c) { return cost[r * n + c]; });
  return std::pow(total, 1.0 / p);
}

double wasserstein_to_trivial(const PersistenceDiagram& d, double p, const InfinitePolicy& policy) {
  check_p(p);
  double total = 0.0;
  for (const auto& x : finite_pairs(d, policy)) total += std::pow(to_diagonal(x), p);
  return std::pow(total, 1.0 / p);
}

double bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b,
                  const InfinitePolicy& policy) {
  check_dims(a, b);
  const auto pa = finite_pairs(a, policy);
  const auto pb = finite_pairs(b, policy);
  const Augmented g{pa.size(), pb.size(), pa, pb};
  if (g.size() == 0) return 0.0;

  // The optimum is one of the edge costs; binary search the sorted candidates.
  std::vector<double> candidates{0.0};
  for (std::size_t r = 0; r < g.size(); ++r) {
    for (std::size_t c = 0; c < g.size(); ++c) candidates.push_back(g(r, c));
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  PerfectMatching matching(g);
  std::size_t lo = 0, hi = candidates.size() - 1;  // candidates[hi] is always feasible
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (matching.feasible(candidates[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return candidates[lo];
}

double bottleneck_to_trivial(const PersistenceDiagram& d, const InfinitePolicy& policy) {
  double worst = 0.0;
  for (const auto& x : finite_pairs(d, policy)) worst = std::max(worst, to_diagonal(x));
  return worst;
}

DiagramSummary summarize(const PersistenceDiagram& d, double p, const InfinitePolicy& policy) {
  DiagramSummary s;
  s.dim = d.dim;
  s.p = p;
  s.policy = policy;
  s.n_features = finite_pairs(d, policy).size();
  s.entropy = persistence_entropy(d, policy);
  s.wasserstein = wasserstein_to_trivial(d, p, policy);
  s.bottleneck = bottleneck_to_trivial(d, policy);
  return s;
}

nlohmann::json to_json(const DiagramSummary& s) {
  return {
      {"dim", s.dim},
      {"entropy", s.entropy},
      {"wasserstein", {{"p", s.p}, {"value", s.wasserstein}}},
      {"bottleneck", s.bottleneck},
      {"n_features", s.n_features},
      {"infinite_policy", s.policy.describe()},
  };
}

}  // namespace mq
