#pragma once

#include <string_view>
#include <vector>

#include "json.hpp"
#include "mq/geometry.hpp"

namespace mq {

enum class IdMethod { TwoNnMle, TwoNnFit, BoxCount };

std::string_view to_string(IdMethod m) noexcept;
IdMethod parse_id_method(std::string_view name);

struct IdEstimate {
  double value = 0.0;
  IdMethod method = IdMethod::TwoNnMle;
  std::size_t n_used = 0;

  // two-nn
  double discard_fraction = 0.0;
  // box-count
  std::vector<double> scales;
  std::vector<std::size_t> occupied;
  double r_squared = 0.0;
};

// {value, method, n_used, diagnostics}
nlohmann::json to_json(const IdEstimate& e);

enum class TwoNnVariant { Mle, Fit };

inline constexpr double kDefaultDiscardFraction = 0.1;

// Two-nearest-neighbour estimator. For each point mu = r2 / r1; the largest
// `discard_fraction` of the ratios are trimmed. Neighbours are found by exact
// brute force, ties going to the smaller index.
//
// Mle treats the trimmed ratios as right-censored, so that the estimate stays
// unbiased when discarding: d = k / (sum_{i<=k} ln mu_(i) + (n - k) ln mu_(k)).
// With nothing discarded this is n / sum ln mu.
//
// Fit is the least-squares slope through the origin of -ln(1 - i/n) against
// ln mu_(i) over the retained ratios (the last one is skipped when nothing is
// discarded, since its ordinate is infinite).
//
// Throws Error(Size) for n < 3 and Error(Degenerate) if a point has a
// duplicate (r1 = 0).
IdEstimate estimate_id_2nn(const PointCloud& pc, double discard_fraction = kDefaultDiscardFraction,
                           TwoNnVariant variant = TwoNnVariant::Mle, unsigned threads = 1);

// Box-counting dimension: slope of log N(eps) against log(1/eps) for
// eps_j = eps_0 * decay^j, j = 1..n_scales, where eps_0 is the largest side of
// the bounding box and the grid is anchored at its minimum corner.
IdEstimate estimate_id_boxcount(const PointCloud& pc, std::size_t n_scales = 5,
                                double scale_decay = 0.5);

}  // namespace mq
