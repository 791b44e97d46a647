#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mq/persistence.hpp"
#include "json.hpp"

namespace mq {

// How essential (infinite-death) pairs enter a metric: dropped, or given the
// death value `cap` (normally the filtration's eps_max).
struct InfinitePolicy {
  enum class Kind { Exclude, Cap };
  Kind kind = Kind::Exclude;
  std::optional<double> cap;

  static InfinitePolicy exclude() { return {}; }
  static InfinitePolicy capped(double eps_max) { return {Kind::Cap, eps_max}; }

  std::string describe() const;  // "excluded" or "capped(<value>)"

  friend bool operator==(const InfinitePolicy&, const InfinitePolicy&) = default;
};

// Finite pairs after applying the policy. Capped pairs whose cap does not
// exceed their birth are dropped. Throws Error(Parameter) for Cap without a value.
std::vector<PersistencePair> finite_pairs(const PersistenceDiagram& d, const InfinitePolicy& policy);

// Shannon entropy (nats) of the normalized lifespans. 0 for fewer than two features.
double persistence_entropy(const PersistenceDiagram& d,
                           const InfinitePolicy& policy = InfinitePolicy::exclude());

// p-Wasserstein distance with L-infinity ground metric; points may be matched
// to their diagonal projection at cost (death - birth) / 2. Exact, via an
// assignment problem on the augmented bipartite graph.
double wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, double p,
                   const InfinitePolicy& policy = InfinitePolicy::exclude());

// Closed form of wasserstein(d, empty, p): (sum ((death - birth) / 2)^p)^(1/p).
double wasserstein_to_trivial(const PersistenceDiagram& d, double p,
                              const InfinitePolicy& policy = InfinitePolicy::exclude());

// Bottleneck distance: min over matchings of the largest single cost.
double bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b,
                  const InfinitePolicy& policy = InfinitePolicy::exclude());

// Closed form of bottleneck(d, empty): the largest half-lifespan.
double bottleneck_to_trivial(const PersistenceDiagram& d,
                             const InfinitePolicy& policy = InfinitePolicy::exclude());

struct DiagramSummary {
  int dim = 0;
  double entropy = 0.0;
  double p = 1.0;
  double wasserstein = 0.0;  // to the empty diagram
  double bottleneck = 0.0;   // to the empty diagram
  std::size_t n_features = 0;
  InfinitePolicy policy;
};

DiagramSummary summarize(const PersistenceDiagram& d, double p,
                         const InfinitePolicy& policy = InfinitePolicy::exclude());

// {dim, entropy, wasserstein: {p, value}, bottleneck, n_features, infinite_policy}
nlohmann::json to_json(const DiagramSummary& s);

}  // namespace mq
