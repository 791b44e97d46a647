#include "mq/intrinsic_dim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "mq/error.hpp"

namespace mq {

std::string_view to_string(IdMethod m) noexcept {
  switch (m) {
    case IdMethod::TwoNnMle: return "two-nn-mle";
    case IdMethod::TwoNnFit: return "two-nn-fit";
    case IdMethod::BoxCount: return "box-count";
  }
  return "two-nn-mle";
}

IdMethod parse_id_method(std::string_view name) {
  if (name == "two-nn-mle") return IdMethod::TwoNnMle;
  if (name == "two-nn-fit") return IdMethod::TwoNnFit;
  if (name == "box-count") return IdMethod::BoxCount;
  throw Error(ErrorKind::Parameter, "unknown intrinsic-dimension method '" + std::string(name) + "'");
}

nlohmann::json to_json(const IdEstimate& e) {
  nlohmann::json diagnostics;
  if (e.method == IdMethod::BoxCount) {
    diagnostics = {{"scales", e.scales}, {"occupied", e.occupied}, {"r_squared", e.r_squared}};
  } else {
    diagnostics = {{"discard_fraction", e.discard_fraction}};
  }
  return {{"value", e.value},
          {"method", std::string(to_string(e.method))},
          {"n_used", e.n_used},
          {"diagnostics", diagnostics}};
}

namespace {

struct TwoNeighbours {
  double r1 = std::numeric_limits<double>::infinity();
  double r2 = std::numeric_limits<double>::infinity();
  std::size_t nearest = 0;
};

// Squared distances are compared; j ascends, so strict '<' keeps the smaller index on ties.
TwoNeighbours two_nearest(const PointCloud& pc, std::size_t i) {
  TwoNeighbours nb;
  const auto a = pc.row(i);
  for (std::size_t j = 0; j < pc.size(); ++j) {
    if (j == i) continue;
    const auto b = pc.row(j);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double t = a[k] - b[k];
      s += t * t;
    }
    if (s < nb.r1) {
      nb.r2 = nb.r1;
      nb.r1 = s;
      nb.nearest = j;
    } else if (s < nb.r2) {
      nb.r2 = s;
    }
  }
  nb.r1 = std::sqrt(nb.r1);
  nb.r2 = std::sqrt(nb.r2);
  return nb;
}

// Least-squares slope and R^2 of y on x with intercept.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  const double slope = sxy / sxx;
  const double r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return {slope, r2};
}

}  // namespace

IdEstimate estimate_id_2nn(const PointCloud& pc, double discard_fraction, TwoNnVariant variant,
                           unsigned threads) {
  const std::size_t n = pc.size();
  if (n < 3) throw Error(ErrorKind::Size, "two-nn needs at least 3 points, got " + std::to_string(n));
  if (!(discard_fraction >= 0.0 && discard_fraction < 1.0)) {
    throw Error(ErrorKind::Parameter, "discard_fraction must be in [0, 1)");
  }

  std::vector<TwoNeighbours> nbs(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n / 64)));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < n; i += threads) nbs[i] = two_nearest(pc, i);
      });
    }
    for (std::size_t i = 0; i < n; i += threads) nbs[i] = two_nearest(pc, i);
  }

  std::vector<double> log_mu(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (nbs[i].r1 == 0.0) {
      throw Error(ErrorKind::Degenerate, "points " + std::to_string(std::min(i, nbs[i].nearest)) +
                                             " and " + std::to_string(std::max(i, nbs[i].nearest)) +
                                             " coincide (r1 = 0)");
    }
    log_mu[i] = std::log(nbs[i].r2 / nbs[i].r1);
  }
  std::sort(log_mu.begin(), log_mu.end());

  const auto kept = static_cast<std::size_t>(std::floor(n * (1.0 - discard_fraction) + 1e-9));
  if (kept < 2) throw Error(ErrorKind::Size, "fewer than 2 ratios left after discarding");

  IdEstimate est;
  est.n_used = kept;
  est.discard_fraction = discard_fraction;
  if (variant == TwoNnVariant::Mle) {
    est.method = IdMethod::TwoNnMle;
    double sum = 0.0;
    for (std::size_t i = 0; i < kept; ++i) sum += log_mu[i];
    sum += static_cast<double>(n - kept) * log_mu[kept - 1];
    est.value = static_cast<double>(kept) / sum;
  } else {
    est.method = IdMethod::TwoNnFit;
    const std::size_t last = std::min(kept, n - 1);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 1; i <= last; ++i) {
      const double x = log_mu[i - 1];
      const double y = -std::log(1.0 - static_cast<double>(i) / static_cast<double>(n));
      sxy += x * y;
      sxx += x * x;
    }
    est.value = sxy / sxx;
  }
  if (!std::isfinite(est.value) || est.value <= 0.0) {
    throw Error(ErrorKind::Degenerate, "two-nn estimate is not a positive finite number");
  }
  return est;
}

IdEstimate estimate_id_boxcount(const PointCloud& pc, std::size_t n_scales, double scale_decay) {
  const std::size_t n = pc.size(), dim = pc.dim();
  if (n < 2) throw Error(ErrorKind::Size, "box counting needs at least 2 points");
  if (n_scales < 2) throw Error(ErrorKind::Parameter, "box counting needs at least 2 scales");
  if (!(scale_decay > 0.0 && scale_decay < 1.0)) {
    throw Error(ErrorKind::Parameter, "scale_decay must be in (0, 1)");
  }

  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < dim; ++k) {
      lo[k] = std::min(lo[k], pc(i, k));
      hi[k] = std::max(hi[k], pc(i, k));
    }
  }
  double side = 0.0;
  for (std::size_t k = 0; k < dim; ++k) side = std::max(side, hi[k] - lo[k]);
  if (side == 0.0) throw Error(ErrorKind::Degenerate, "point cloud has zero extent");

  IdEstimate est;
  est.method = IdMethod::BoxCount;
  est.n_used = n;
  std::vector<double> x, y;
  std::vector<std::vector<long long>> cells(n, std::vector<long long>(dim));
  for (std::size_t j = 1; j <= n_scales; ++j) {
    const double eps = side * std::pow(scale_decay, static_cast<double>(j));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < dim; ++k) {
        // Points on the far face of the box belong to the last cell, not a new one.
        const auto last = std::max(0LL, static_cast<long long>(std::ceil((hi[k] - lo[k]) / eps)) - 1);
        const auto c = static_cast<long long>(std::floor((pc(i, k) - lo[k]) / eps));
        cells[i][k] = std::min(c, last);
      }
    }
    auto sorted = cells;
    std::sort(sorted.begin(), sorted.end());
    const auto occupied =
        static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    est.scales.push_back(eps);
    est.occupied.push_back(occupied);
    x.push_back(std::log(1.0 / eps));
    y.push_back(std::log(static_cast<double>(occupied)));
  }
  std::tie(est.value, est.r_squared) = linear_fit(x, y);
  if (!std::isfinite(est.value) || est.value <= 0.0) {
    throw Error(ErrorKind::Degenerate, "box-count slope is not positive; add points or coarser scales");
  }
  return est;
}

}  // namespace mq
