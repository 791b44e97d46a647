// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// gating criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "mq/diagram_metrics.hpp"
#include "mq/intrinsic_dim.hpp"
#include "mq/persistence.hpp"
#include "mq/rng.hpp"
#include "mq/shapes.hpp"
#include "mq/tracker.hpp"
#include "oracle.hpp"

using namespace mq;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum { Pass, Fail, Skip } status;
  std::string detail;
};

Outcome pass(std::string d) { return {Outcome::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::Fail, std::move(d)}; }
Outcome verdict(bool ok, std::string d) { return {ok ? Outcome::Pass : Outcome::Fail, std::move(d)}; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> lifespans(const PersistenceDiagram& d, double cap) {
  std::vector<double> out;
  for (const auto& p : d.pairs) out.push_back((p.essential() ? cap : p.death) - p.birth);
  std::sort(out.rbegin(), out.rend());
  return out;
}

// k longest bars each at least `factor` times the (k+1)-th; returns the ratio achieved.
double dominance(const std::vector<double>& life, std::size_t k) {
  if (life.size() < k) return 0.0;
  const double next = life.size() > k ? life[k] : 0.0;
  return next == 0.0 ? INFINITY : life[k - 1] / next;
}

std::vector<oracle::Pair> pairs_of(const PersistenceDiagram& d) {
  std::vector<oracle::Pair> out;
  for (const auto& p : d.pairs) out.emplace_back(p.birth, p.death);
  return out;
}

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  int mismatches = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 3 + seed % 10;  // 3..12
    const auto pc = oracle::random_cloud(n, 2 + seed % 2, 9000 + seed);
    const auto dm = pairwise_distances(pc);
    const double eps = seed % 4 == 0 ? 0.5 : dm.max_entry();
    const auto dg = compute_persistence(build_rips(dm, 3, eps));
    const auto expected = oracle::naive_persistence(pc, 3, eps);
    for (int d = 0; d < 3; ++d) mismatches += pairs_of(dg[d]) != expected[d];
  }
  const double secs = seconds_since(t0);
  return verdict(mismatches == 0 && secs < 60.0,
                 std::to_string(mismatches) + " mismatching diagrams, " + fmt(secs) + " s");
}

Outcome square_h1() {
  const auto dg = compute_persistence(
      build_rips(pairwise_distances(PointCloud(4, 2, {0, 0, 1, 0, 1, 1, 0, 1})), 2));
  bool ok = dg[1].pairs.size() == 1 && std::abs(dg[1].pairs[0].birth - 1.0) <= 1e-12 &&
            std::abs(dg[1].pairs[0].death - std::sqrt(2.0)) <= 1e-12;
  ok = ok && dg[0].pairs.size() == 4 && dg[0].essential_count() == 1;
  for (std::size_t k = 0; ok && k < 3; ++k) {
    ok = dg[0].pairs[k].birth == 0.0 && std::abs(dg[0].pairs[k].death - 1.0) <= 1e-12;
  }
  return verdict(ok, "H1 " + (dg[1].pairs.empty() ? std::string("empty")
                                                  : "(" + fmt(dg[1].pairs[0].birth) + ", " +
                                                        fmt(dg[1].pairs[0].death) + ")"));
}

Outcome unionfind_agreement() {
  int mismatches = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto pc = oracle::random_cloud(5 + seed % 46, 2 + seed % 2, 700 + seed);
    const auto dm = pairwise_distances(pc);
    const EpsMax eps = seed % 3 == 0 ? EpsMax{0.25} : std::nullopt;
    mismatches += !(compute_h0_unionfind(dm, eps) == compute_persistence(build_rips(dm, 1, eps))[0]);
  }
  return verdict(mismatches == 0, std::to_string(mismatches) + " of 50 differ");
}

Outcome trivial_distance() {
  Rng rng(2024);
  const PersistenceDiagram empty{1, {}};
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    PersistenceDiagram d{1, {}};
    const auto n = rng.below(20);
    double half_sum = 0.0;
    for (std::uint64_t k = 0; k < n; ++k) {
      const double b = rng.uniform(0.0, 3.0);
      d.pairs.push_back({b, b + rng.uniform(0.001, 2.0)});
      half_sum += (d.pairs.back().death - b) / 2;
    }
    for (double p : {1.0, 2.0}) {
      worst = std::max(worst, std::abs(wasserstein(d, empty, p) - wasserstein_to_trivial(d, p)));
    }
    worst = std::max(worst, std::abs(wasserstein_to_trivial(d, 1.0) - half_sum));
  }
  return verdict(worst <= 1e-9, "max deviation " + fmt(worst));
}

Outcome betti_dominance() {
  std::string detail;
  bool ok = true;

  const auto circle = generate({.kind = ShapeKind::Circle, .n = 200, .noise = 0.01, .seed = 7});
  const auto fc = build_rips(pairwise_distances(circle, Metric::Euclidean, 0), 2, std::nullopt, 0);
  const double rc = dominance(lifespans(compute_persistence(fc)[1], fc.eps_max), 1);
  ok &= rc >= 5.0;
  detail += "circle H1 " + fmt(rc) + "x (need 5)";

  const auto sphere = generate({.kind = ShapeKind::Sphere, .n = 300, .seed = 7});
  const auto fs2 = build_rips(pairwise_distances(sphere, Metric::Euclidean, 0), 3, 1.0, 0);
  const double rs = dominance(lifespans(compute_persistence(fs2)[2], fs2.eps_max), 1);
  ok &= rs >= 3.0;
  detail += "; sphere H2 " + fmt(rs) + "x (need 3)";

  const auto t0 = std::chrono::steady_clock::now();
  const auto torus = generate({.kind = ShapeKind::Torus, .n = 400, .seed = 7});
  const auto ft = build_rips(pairwise_distances(torus, Metric::Euclidean, 0), 2, 1.5, 0);
  const auto lt = lifespans(compute_persistence(ft)[1], ft.eps_max);
  const double rt = dominance(lt, 2);
  const double secs = seconds_since(t0);
  ok &= rt >= 3.0 && secs <= 600.0;
  detail += "; torus H1 2nd/3rd " + fmt(rt) + "x (need 3), top bars";
  for (std::size_t k = 0; k < std::min<std::size_t>(3, lt.size()); ++k) detail += " " + fmt(lt[k]);
  detail += ", " + fmt(secs) + " s";
  return verdict(ok, detail);
}

Outcome id_bands() {
  struct Band {
    std::string name;
    std::function<double(std::uint64_t)> estimate;
    double lo, hi;
  };
  const std::vector<Band> bands{
      {"cube d=2",
       [](std::uint64_t s) {
         return estimate_id_2nn(generate({.kind = ShapeKind::UniformCube, .n = 2000, .seed = s, .dim = 2}),
                                kDefaultDiscardFraction, TwoNnVariant::Mle, 0).value;
       },
       1.8, 2.2},
      {"cube d=5",
       [](std::uint64_t s) {
         return estimate_id_2nn(generate({.kind = ShapeKind::UniformCube, .n = 5000, .seed = s, .dim = 5}),
                                kDefaultDiscardFraction, TwoNnVariant::Mle, 0).value;
       },
       4.5, 5.5},
      {"swiss roll",
       [](std::uint64_t s) {
         return estimate_id_2nn(generate({.kind = ShapeKind::SwissRoll, .n = 2000, .seed = s}),
                                kDefaultDiscardFraction, TwoNnVariant::Mle, 0).value;
       },
       1.7, 2.3},
      {"box-count square",
       [](std::uint64_t s) {
         return estimate_id_boxcount(
                    generate({.kind = ShapeKind::UniformCube, .n = 10000, .seed = s, .dim = 2}))
             .value;
       },
       1.7, 2.2},
  };
  bool ok = true;
  std::string detail;
  for (const auto& b : bands) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const double v = b.estimate(seed);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    ok &= lo >= b.lo && hi <= b.hi;
    if (!detail.empty()) detail += "; ";
    detail += b.name + " [" + fmt(lo) + ", " + fmt(hi) + "] in [" + fmt(b.lo) + ", " + fmt(b.hi) + "]";
  }
  return verdict(ok, detail);
}

Outcome entropy_closed_forms() {
  const double e1 = persistence_entropy({0, {{0, 1}}});
  const double e2 = persistence_entropy({0, {{0, 1}, {2, 3}}});
  const double e3 = persistence_entropy({0, {{0, 1}, {0, 3}}});
  const double expected3 = -(0.25 * std::log(0.25) + 0.75 * std::log(0.75));
  const bool ok = std::abs(e1) <= 1e-12 && std::abs(e2 - std::log(2.0)) <= 1e-12 &&
                  std::abs(e3 - expected3) <= 1e-12;
  return verdict(ok, fmt(e1) + ", " + fmt(e2) + ", " + fmt(e3));
}

struct Scratch {
  fs::path path = fs::temp_directory_path() / "mq_acceptance";
  Scratch() {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Scratch() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome tracker_determinism() {
  Scratch dir;
  const auto ref = dir.path / "reference.csv";
  save_pointcloud(generate({.kind = ShapeKind::Torus, .n = 150, .noise = 0.02, .seed = 5}), ref);
  const RunConfig cfg{.subsample = 120, .seed = 3, .max_dim = 2, .eps_max = 1.5};
  const std::vector<fs::path> snaps{ref};
  export_report(track(snaps, ref, cfg, 0), ReportFormat::Csv, dir.path / "a.csv");
  const auto r = track(snaps, ref, cfg, 1);
  export_report(r, ReportFormat::Csv, dir.path / "b.csv");
  const bool zero = std::all_of(r.snapshots[0].gaps.begin(), r.snapshots[0].gaps.end(),
                                [](double g) { return g == 0.0; });
  const bool same = slurp(dir.path / "a.csv") == slurp(dir.path / "b.csv");
  return verdict(zero && same, std::string(zero ? "zero gaps" : "non-zero gaps") + ", " +
                                   (same ? "identical CSV" : "CSV differs"));
}

Outcome synthetic_convergence() {
  Scratch dir;
  const auto target = generate({.kind = ShapeKind::Circle, .n = 100, .noise = 0.02, .seed = 21});
  const auto start = generate({.kind = ShapeKind::GaussianBlob, .n = 100, .seed = 22, .dim = 2});
  save_pointcloud(target, dir.path / "reference.csv");
  std::vector<fs::path> snaps;
  for (int k = 1; k <= 10; ++k) {
    std::vector<double> c(target.data().size());
    const double t = k / 10.0;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = (1 - t) * start.data()[i] + t * target.data()[i];
    snaps.push_back(dir.path / ("step" + std::to_string(k) + ".csv"));
    save_pointcloud(PointCloud(100, 2, std::move(c)), snaps.back());
  }
  const auto r = track(snaps, dir.path / "reference.csv", RunConfig{.max_dim = 2}, 0);
  const auto names = metric_names(2);
  const auto col = std::find(names.begin(), names.end(), "wasserstein_h1") - names.begin();
  const double first = r.snapshots.front().gaps[col], last = r.snapshots.back().gaps[col];
  return verdict(last < first, "dim-1 gap step 1 " + fmt(first) + ", step 10 " + fmt(last));
}

Outcome cifar_band() {
  const char* path = std::getenv("MQ_CIFAR_CATS");
  if (!path || !*path) return {Outcome::Skip, "set MQ_CIFAR_CATS to a packed cloud of cat images"};
  const auto pc = subsample(load_pointcloud(path, CloudFormat::PackedBinary), 2000, 0);
  const double v = estimate_id_2nn(pc, kDefaultDiscardFraction, TwoNnVariant::Mle, 0).value;
  return verdict(v >= 18.0 && v <= 28.0, "2NN-MLE " + fmt(v) + " in [18, 28]");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
    bool gating;
  };
  const Criterion criteria[] = {
      {1, "oracle equivalence", oracle_equivalence, true},
      {2, "square H1", square_h1, true},
      {3, "union-find agreement", unionfind_agreement, true},
      {4, "distance to the trivial diagram", trivial_distance, true},
      {5, "betti dominance", betti_dominance, true},
      {6, "intrinsic dimension bands", id_bands, true},
      {7, "entropy closed forms", entropy_closed_forms, true},
      {8, "tracker determinism", tracker_determinism, true},
      {9, "synthetic convergence", synthetic_convergence, true},
      {10, "cifar cats dimension", cifar_band, false},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.status == Outcome::Pass ? "PASS" : o.status == Outcome::Fail ? "FAIL" : "SKIP";
    std::printf("%s %2d %s: %s\n", tag, c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    if (o.status == Outcome::Fail && c.gating) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
