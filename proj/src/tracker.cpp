#include "mq/tracker.hpp"

#include <glob.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mq/error.hpp"
#include "mq/intrinsic_dim.hpp"
#include "mq/persistence.hpp"
#include "mq/text.hpp"

namespace mq {

namespace {

std::string_view policy_name(InfinitePolicy::Kind k) {
  return k == InfinitePolicy::Kind::Exclude ? "exclude" : "cap";
}

InfinitePolicy::Kind parse_policy_name(std::string_view s) {
  if (s == "exclude") return InfinitePolicy::Kind::Exclude;
  if (s == "cap") return InfinitePolicy::Kind::Cap;
  throw Error(ErrorKind::Parameter, "unknown infinite policy '" + std::string(s) + "'");
}

}  // namespace

std::string canonical_config(const RunConfig& cfg) {
  std::ostringstream s;
  s << "subsample=" << (cfg.subsample ? std::to_string(*cfg.subsample) : "all")
    << ";seed=" << cfg.seed << ";max_dim=" << cfg.max_dim
    << ";eps_max=" << (cfg.eps_max ? format_real(*cfg.eps_max) : "auto")
    << ";p=" << format_real(cfg.p) << ";infinite_policy=" << policy_name(cfg.infinite_policy)
    << ";discard_fraction=" << format_real(cfg.discard_fraction)
    << ";metric=" << to_string(cfg.metric);
  return s.str();
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["subsample"] = cfg.subsample ? nlohmann::json(*cfg.subsample) : nlohmann::json(nullptr);
  j["seed"] = cfg.seed;
  j["max_dim"] = cfg.max_dim;
  j["eps_max"] = cfg.eps_max ? nlohmann::json(*cfg.eps_max) : nlohmann::json("auto");
  j["p"] = cfg.p;
  j["infinite_policy"] = policy_name(cfg.infinite_policy);
  j["discard_fraction"] = cfg.discard_fraction;
  j["metric"] = to_string(cfg.metric);
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  try {
    RunConfig cfg;
    if (!j.at("subsample").is_null()) cfg.subsample = j.at("subsample").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.max_dim = j.at("max_dim").get<int>();
    if (!j.at("eps_max").is_string()) cfg.eps_max = j.at("eps_max").get<double>();
    cfg.p = j.at("p").get<double>();
    cfg.infinite_policy = parse_policy_name(j.at("infinite_policy").get<std::string>());
    cfg.discard_fraction = j.at("discard_fraction").get<double>();
    cfg.metric = parse_metric(j.at("metric").get<std::string>());
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("invalid run config: ") + e.what());
  }
}

std::vector<double> MetricVector::values() const {
  std::vector<double> v{id_2nn};
  v.insert(v.end(), entropy.begin(), entropy.end());
  v.insert(v.end(), wasserstein.begin(), wasserstein.end());
  v.insert(v.end(), bottleneck.begin(), bottleneck.end());
  return v;
}

std::vector<std::string> metric_names(int max_dim) {
  std::vector<std::string> names{"id_2nn"};
  for (const char* family : {"entropy", "wasserstein", "bottleneck"}) {
    for (int d = 0; d < max_dim; ++d) names.push_back(std::string(family) + "_h" + std::to_string(d));
  }
  return names;
}

MetricVector analyze_snapshot(const PointCloud& pc, const RunConfig& cfg, std::string_view label,
                              unsigned threads) {
  try {
    const PointCloud sample =
        cfg.subsample ? subsample(pc, *cfg.subsample, cfg.seed) : pc;
    const auto dm = pairwise_distances(sample, cfg.metric, threads);
    const auto filtration = build_rips(dm, cfg.max_dim, cfg.eps_max, threads);
    const auto diagrams = compute_persistence(filtration);
    const InfinitePolicy policy = cfg.infinite_policy == InfinitePolicy::Kind::Cap
                                      ? InfinitePolicy::capped(filtration.eps_max)
                                      : InfinitePolicy::exclude();

    MetricVector mv;
    mv.n_points_used = sample.size();
    mv.config_hash = config_hash(cfg);
    for (const auto& d : diagrams) {
      const auto s = summarize(d, cfg.p, policy);
      mv.entropy.push_back(s.entropy);
      mv.wasserstein.push_back(s.wasserstein);
      mv.bottleneck.push_back(s.bottleneck);
    }
    mv.id_2nn = estimate_id_2nn(sample, cfg.discard_fraction, TwoNnVariant::Mle, threads).value;
    return mv;
  } catch (const Error& e) {
    throw e.annotated(label);
  }
}

SnapshotResult compare_to_reference(std::string label, MetricVector metrics,
                                    const MetricVector& reference) {
  const auto a = metrics.values();
  const auto b = reference.values();
  if (a.size() != b.size()) {
    throw Error(ErrorKind::Shape, label + ": metric vector length differs from the reference");
  }
  SnapshotResult r{std::move(label), std::move(metrics), {}};
  r.gaps.reserve(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) r.gaps.push_back(std::abs(a[k] - b[k]));
  return r;
}

ConvergenceReport track(std::span<const std::filesystem::path> snapshot_paths,
                        const std::filesystem::path& reference_path, const RunConfig& cfg,
                        unsigned threads) {
  if (snapshot_paths.empty()) throw Error(ErrorKind::EmptyInput, "no snapshots to track");

  auto load = [](const std::filesystem::path& p) {
    try {
      return load_pointcloud(p);
    } catch (const Error& e) {
      throw e.annotated(p.string());
    }
  };
  const PointCloud reference = load(reference_path);
  std::vector<PointCloud> clouds;
  clouds.reserve(snapshot_paths.size());
  for (const auto& p : snapshot_paths) {
    clouds.push_back(load(p));
    if (clouds.back().dim() != reference.dim()) {
      throw Error(ErrorKind::Shape, p.string() + ": ambient dimension " +
                                        std::to_string(clouds.back().dim()) +
                                        " differs from the reference's " +
                                        std::to_string(reference.dim()));
    }
  }

  ConvergenceReport report;
  report.config = cfg;
  report.reference_label = reference_path.stem().string();
  report.reference = analyze_snapshot(reference, cfg, reference_path.string(), threads);
  for (std::size_t k = 0; k < clouds.size(); ++k) {
    auto mv = analyze_snapshot(clouds[k], cfg, snapshot_paths[k].string(), threads);
    report.snapshots.push_back(
        compare_to_reference(snapshot_paths[k].stem().string(), std::move(mv), report.reference));
  }
  return report;
}

bool natural_less(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  while (i < a.size() && j < b.size()) {
    if (digit(a[i]) && digit(b[j])) {
      auto si = i, sj = j;
      while (si < a.size() && a[si] == '0') ++si;
      while (sj < b.size() && b[sj] == '0') ++sj;
      auto ei = si, ej = sj;
      while (ei < a.size() && digit(a[ei])) ++ei;
      while (ej < b.size() && digit(b[ej])) ++ej;
      if (ei - si != ej - sj) return ei - si < ej - sj;
      const auto cmp = a.substr(si, ei - si).compare(b.substr(sj, ej - sj));
      if (cmp != 0) return cmp < 0;
      i = ei;
      j = ej;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return a.size() - i < b.size() - j;
  return a < b;  // e.g. "01" vs "1"
}

std::vector<std::filesystem::path> resolve_snapshots(std::string_view glob_or_manifest) {
  const std::string spec(glob_or_manifest);
  std::vector<std::filesystem::path> out;
  if (spec.find_first_of("*?[") != std::string::npos) {
    glob_t g{};
    const int rc = ::glob(spec.c_str(), 0, nullptr, &g);
    if (rc == 0) {
      for (std::size_t k = 0; k < g.gl_pathc; ++k) out.emplace_back(g.gl_pathv[k]);
    }
    globfree(&g);
    if (out.empty()) throw Error(ErrorKind::Io, "no files match " + spec);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      return natural_less(a.string(), b.string());
    });
    return out;
  }

  std::ifstream in(spec);
  if (!in) throw Error(ErrorKind::Io, "cannot open manifest " + spec);
  const auto base = std::filesystem::path(spec).parent_path();
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::filesystem::path p(line);
    out.push_back(p.is_absolute() ? p : base / p);
  }
  if (out.empty()) throw Error(ErrorKind::EmptyInput, "manifest " + spec + " lists no files");
  return out;
}

void write_report_csv(std::ostream& out, const ConvergenceReport& r) {
  const auto names = metric_names(r.config.max_dim);
  out << "label,n_points_used";
  for (const auto& n : names) out << ',' << n;
  for (const auto& n : names) out << ",gap_" << n;
  out << '\n';
  for (const auto& s : r.snapshots) {
    out << s.label << ',' << s.metrics.n_points_used;
    for (double v : s.metrics.values()) out << ',' << format_real(v);
    for (double v : s.gaps) out << ',' << format_real(v);
    out << '\n';
  }
}

namespace {

nlohmann::json metrics_json(const MetricVector& mv, const std::vector<std::string>& names) {
  nlohmann::json values = nlohmann::json::object();
  const auto v = mv.values();
  for (std::size_t k = 0; k < names.size(); ++k) values[names[k]] = v[k];
  return {{"n_points_used", mv.n_points_used}, {"config_hash", mv.config_hash}, {"values", values}};
}

MetricVector metrics_from_json(const nlohmann::json& j, int max_dim) {
  MetricVector mv;
  mv.n_points_used = j.at("n_points_used").get<std::size_t>();
  mv.config_hash = j.at("config_hash").get<std::string>();
  const auto& v = j.at("values");
  mv.id_2nn = v.at("id_2nn").get<double>();
  for (int d = 0; d < max_dim; ++d) {
    const auto h = "_h" + std::to_string(d);
    mv.entropy.push_back(v.at("entropy" + h).get<double>());
    mv.wasserstein.push_back(v.at("wasserstein" + h).get<double>());
    mv.bottleneck.push_back(v.at("bottleneck" + h).get<double>());
  }
  return mv;
}

}  // namespace

nlohmann::json to_json(const ConvergenceReport& r) {
  const auto names = metric_names(r.config.max_dim);
  nlohmann::json j;
  j["config"] = to_json(r.config);
  j["config_hash"] = config_hash(r.config);
  j["config_hash_algorithm"] = kConfigHashAlgorithm;
  j["metric_names"] = names;
  j["reference"] = {{"label", r.reference_label}, {"metrics", metrics_json(r.reference, names)}};
  j["snapshots"] = nlohmann::json::array();
  for (const auto& s : r.snapshots) {
    nlohmann::json gaps = nlohmann::json::object();
    for (std::size_t k = 0; k < names.size(); ++k) gaps[names[k]] = s.gaps.at(k);
    j["snapshots"].push_back(
        {{"label", s.label}, {"metrics", metrics_json(s.metrics, names)}, {"gaps", gaps}});
  }
  return j;
}

ConvergenceReport report_from_json(const nlohmann::json& j) {
  try {
    ConvergenceReport r;
    r.config = run_config_from_json(j.at("config"));
    const auto names = metric_names(r.config.max_dim);
    r.reference_label = j.at("reference").at("label").get<std::string>();
    r.reference = metrics_from_json(j.at("reference").at("metrics"), r.config.max_dim);
    for (const auto& s : j.at("snapshots")) {
      SnapshotResult res;
      res.label = s.at("label").get<std::string>();
      res.metrics = metrics_from_json(s.at("metrics"), r.config.max_dim);
      for (const auto& n : names) res.gaps.push_back(s.at("gaps").at(n).get<double>());
      r.snapshots.push_back(std::move(res));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("invalid report JSON: ") + e.what());
  }
}

void export_report(const ConvergenceReport& r, ReportFormat format,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  if (format == ReportFormat::Csv) {
    write_report_csv(out, r);
  } else {
    out << to_json(r).dump(2) << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace mq
