#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mq/diagram_metrics.hpp"
#include "mq/geometry.hpp"
#include "mq/intrinsic_dim.hpp"
#include "mq/rips.hpp"

namespace mq {

// Everything that determines a MetricVector. Shared by every snapshot and the
// reference of one run; its hash is stamped on every result.
struct RunConfig {
  std::optional<std::size_t> subsample;  // nullopt: use every point
  std::uint64_t seed = 0;
  int max_dim = 2;                       // simplex dimension; diagrams for H0..H(max_dim-1)
  EpsMax eps_max;                        // nullopt: auto (enclosing diameter)
  double p = 1.0;
  InfinitePolicy::Kind infinite_policy = InfinitePolicy::Kind::Exclude;  // Cap uses eps_max
  double discard_fraction = kDefaultDiscardFraction;
  Metric metric = Metric::Euclidean;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline constexpr std::string_view kConfigHashAlgorithm = "fnv1a-64";

// Canonical "key=value;..." rendering that the hash is taken over.
std::string canonical_config(const RunConfig& cfg);
// 16 lowercase hex digits of FNV-1a 64 over canonical_config(cfg).
std::string config_hash(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);

struct MetricVector {
  double id_2nn = 0.0;
  std::vector<double> entropy;      // per homology dim 0 .. max_dim-1
  std::vector<double> wasserstein;  // to the trivial diagram, order cfg.p
  std::vector<double> bottleneck;   // to the trivial diagram
  std::size_t n_points_used = 0;
  std::string config_hash;

  // Flattened in metric_names() order.
  std::vector<double> values() const;

  friend bool operator==(const MetricVector&, const MetricVector&) = default;
};

// "id_2nn", "entropy_h0".., "wasserstein_h0".., "bottleneck_h0"..
std::vector<std::string> metric_names(int max_dim);

struct SnapshotResult {
  std::string label;
  MetricVector metrics;
  std::vector<double> gaps;  // |snapshot - reference| per metric_names() entry

  friend bool operator==(const SnapshotResult&, const SnapshotResult&) = default;
};

struct ConvergenceReport {
  RunConfig config;
  std::string reference_label;
  MetricVector reference;
  std::vector<SnapshotResult> snapshots;

  friend bool operator==(const ConvergenceReport&, const ConvergenceReport&) = default;
};

// subsample -> distances -> Rips -> persistence -> summaries, plus 2NN on the
// subsample. Errors are re-thrown with `label` prepended.
MetricVector analyze_snapshot(const PointCloud& pc, const RunConfig& cfg,
                              std::string_view label = "snapshot", unsigned threads = 1);

// Gaps against a precomputed reference.
SnapshotResult compare_to_reference(std::string label, MetricVector metrics,
                                    const MetricVector& reference);

// Loads every file before analysing any, so a bad path aborts the run without
// a partial report. Labels are the file stems; order is preserved.
ConvergenceReport track(std::span<const std::filesystem::path> snapshot_paths,
                        const std::filesystem::path& reference_path, const RunConfig& cfg,
                        unsigned threads = 1);

// Snapshot list from a glob pattern (natural-sorted) or a manifest file (one
// path per line, relative paths resolved against the manifest's directory).
std::vector<std::filesystem::path> resolve_snapshots(std::string_view glob_or_manifest);

// "epoch2" < "epoch10": digit runs compare numerically.
bool natural_less(std::string_view a, std::string_view b);

// Header: label,n_points_used,<metrics...>,gap_<metrics...>; one row per snapshot.
void write_report_csv(std::ostream& out, const ConvergenceReport& r);
nlohmann::json to_json(const ConvergenceReport& r);
ConvergenceReport report_from_json(const nlohmann::json& j);

enum class ReportFormat { Csv, Json };
void export_report(const ConvergenceReport& r, ReportFormat format,
                   const std::filesystem::path& path);

}  // namespace mq
