// mq: command-line front end for the manifold-quantification library.
//
// Exit codes: 0 success, 1 usage error, 2 data or computation error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mq/diagram_metrics.hpp"
#include "mq/error.hpp"
#include "mq/geometry.hpp"
#include "mq/intrinsic_dim.hpp"
#include "mq/persistence.hpp"
#include "mq/rips.hpp"
#include "mq/shapes.hpp"
#include "mq/tracker.hpp"

namespace {

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int verbosity = 0;

void log(const std::string& msg) {
  if (verbosity > 0) std::cerr << "[mq] " << msg << '\n';
}

mq::EpsMax parse_eps(const std::string& s) {
  if (s == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Usage("--eps-max expects a real number or 'auto', got '" + s + "'");
}

mq::CloudFormat parse_format(const std::string& s, const std::string& path) {
  if (s.empty()) return mq::format_for_path(path);
  if (s == "csv") return mq::CloudFormat::Csv;
  if (s == "packed" || s == "packed-binary") return mq::CloudFormat::PackedBinary;
  throw Usage("unknown point-cloud format '" + s + "'");
}

mq::InfinitePolicy::Kind parse_policy(const std::string& s) {
  if (s == "exclude") return mq::InfinitePolicy::Kind::Exclude;
  if (s == "cap") return mq::InfinitePolicy::Kind::Cap;
  throw Usage("--infinite-policy expects exclude or cap");
}

// Writes to `path`, or standard output when path is empty or "-".
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw mq::Error(mq::ErrorKind::Io, "cannot write " + path);
  out << content;
  if (!out) throw mq::Error(mq::ErrorKind::Io, "write failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mq::Error(mq::ErrorKind::Io, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

mq::PointCloud load_input(const std::string& path, const std::string& format,
                          std::optional<std::size_t> m, std::uint64_t seed) {
  try {
    auto pc = mq::load_pointcloud(path, parse_format(format, path));
    log("loaded " + path + ": n=" + std::to_string(pc.size()) + " D=" + std::to_string(pc.dim()));
    if (m) pc = mq::subsample(pc, *m, seed);
    return pc;
  } catch (const mq::Error& e) {
    throw e.annotated(path);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Manifold quantification: persistent homology, diagram metrics and "
               "intrinsic dimension of point clouds"};
  app.require_subcommand(0, 1);
  unsigned threads = 0;
  bool show_version = false;
  app.add_flag("--version", show_version, "Print version and config-hash algorithm");
  app.add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_flag("-v,--verbose", verbosity, "Log progress to stderr");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic point cloud");
  std::string kind, synth_out, synth_format;
  mq::ShapeSpec spec;
  synth->add_option("--kind", kind,
                    "circle | sphere | torus | swiss-roll | uniform-cube | gaussian-blob")
      ->required();
  synth->add_option("--n", spec.n, "Number of points")->required();
  synth->add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
  synth->add_option("--noise", spec.noise, "Gaussian noise std-dev")->capture_default_str();
  synth->add_option("--dim", spec.dim, "Ambient dimension (uniform-cube, gaussian-blob)")
      ->capture_default_str();
  synth->add_option("--major-radius", spec.major_radius, "Torus R")->capture_default_str();
  synth->add_option("--minor-radius", spec.minor_radius, "Torus r")->capture_default_str();
  synth->add_option("--out", synth_out, "Output file")->required();
  synth->add_option("--format", synth_format, "csv | packed (default: from extension)");

  // ph
  auto* ph = app.add_subcommand("ph", "Persistence diagrams of a point cloud");
  std::string ph_input, ph_format, ph_metric = "euclidean", ph_eps = "auto", ph_out, ph_summary,
                        ph_dump, ph_policy = "exclude";
  int ph_max_dim = 2;
  double ph_p = 1.0;
  std::optional<std::size_t> ph_subsample;
  std::uint64_t ph_seed = 0;
  ph->add_option("--input", ph_input, "Point cloud file")->required();
  ph->add_option("--format", ph_format, "csv | packed (default: from extension)");
  ph->add_option("--max-dim", ph_max_dim, "Highest simplex dimension (1..3)")->capture_default_str();
  ph->add_option("--eps-max", ph_eps, "Rips threshold or 'auto'")->capture_default_str();
  ph->add_option("--metric", ph_metric, "euclidean | manhattan | chebyshev")->capture_default_str();
  ph->add_option("--subsample", ph_subsample, "Use M random points");
  ph->add_option("--seed", ph_seed, "Subsampling seed")->capture_default_str();
  ph->add_option("--out", ph_out, "Diagram CSV (default: stdout)");
  ph->add_option("--summary", ph_summary, "Also write per-dimension summaries as JSON");
  ph->add_option("--p", ph_p, "Wasserstein order for --summary")->capture_default_str();
  ph->add_option("--infinite-policy", ph_policy, "exclude | cap")->capture_default_str();
  ph->add_option("--dump-filtration", ph_dump, "Write the filtration, one simplex per line");

  // id
  auto* id = app.add_subcommand("id", "Intrinsic dimension estimate");
  std::string id_input, id_format, id_method = "two-nn-mle", id_out;
  double id_discard = mq::kDefaultDiscardFraction, id_decay = 0.5;
  std::size_t id_scales = 5;
  std::optional<std::size_t> id_subsample;
  std::uint64_t id_seed = 0;
  id->add_option("--input", id_input, "Point cloud file")->required();
  id->add_option("--format", id_format, "csv | packed (default: from extension)");
  id->add_option("--method", id_method, "two-nn-mle | two-nn-fit | box-count")->capture_default_str();
  id->add_option("--discard", id_discard, "two-nn: fraction of largest ratios to trim")
      ->capture_default_str();
  id->add_option("--scales", id_scales, "box-count: number of scales")->capture_default_str();
  id->add_option("--decay", id_decay, "box-count: scale ratio in (0,1)")->capture_default_str();
  id->add_option("--subsample", id_subsample, "Use M random points");
  id->add_option("--seed", id_seed, "Subsampling seed")->capture_default_str();
  id->add_option("--out", id_out, "JSON output (default: stdout)");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Summaries of, or distances between, diagrams");
  std::string mt_diagram, mt_against, mt_policy = "exclude", mt_eps, mt_out;
  double mt_p = 1.0;
  metrics->add_option("--diagram", mt_diagram, "Diagram CSV (dim,birth,death)")->required();
  metrics->add_option("--against", mt_against, "Second diagram CSV for Wasserstein/bottleneck");
  metrics->add_option("--p", mt_p, "Wasserstein order")->capture_default_str();
  metrics->add_option("--infinite-policy", mt_policy, "exclude | cap")->capture_default_str();
  metrics->add_option("--eps-max", mt_eps, "Cap value for --infinite-policy cap");
  metrics->add_option("--out", mt_out, "JSON output (default: stdout)");

  // track
  auto* track = app.add_subcommand("track", "Metric trajectories of snapshots against a reference");
  std::string tr_snapshots, tr_reference, tr_eps = "auto", tr_policy = "exclude",
                                          tr_metric = "euclidean", tr_out, tr_json;
  mq::RunConfig cfg;
  std::optional<std::size_t> tr_subsample;
  track->add_option("--snapshots", tr_snapshots, "Glob pattern or manifest file")->required();
  track->add_option("--reference", tr_reference, "Reference point cloud")->required();
  track->add_option("--subsample", tr_subsample, "Points per cloud (default: all)");
  track->add_option("--seed", cfg.seed, "Shared subsampling seed")->capture_default_str();
  track->add_option("--max-dim", cfg.max_dim, "Highest simplex dimension (1..3)")->capture_default_str();
  track->add_option("--eps-max", tr_eps, "Rips threshold or 'auto'")->capture_default_str();
  track->add_option("--p", cfg.p, "Wasserstein order")->capture_default_str();
  track->add_option("--infinite-policy", tr_policy, "exclude | cap")->capture_default_str();
  track->add_option("--discard", cfg.discard_fraction, "two-nn discard fraction")->capture_default_str();
  track->add_option("--metric", tr_metric, "euclidean | manhattan | chebyshev")->capture_default_str();
  track->add_option("--out", tr_out, "Report CSV");
  track->add_option("--json", tr_json, "Report JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  if (show_version) {
    std::cout << "mq " << MQ_VERSION << " (config-hash " << mq::kConfigHashAlgorithm << ")\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << "error: a subcommand is required\n\n" << app.help();
    return 1;
  }

  try {
    if (*synth) {
      spec.kind = mq::parse_shape_kind(kind);
      const auto pc = mq::generate(spec);
      mq::save_pointcloud(pc, synth_out, parse_format(synth_format, synth_out));
      log("wrote " + std::to_string(pc.size()) + " points to " + synth_out);
    } else if (*ph) {
      const auto eps = parse_eps(ph_eps);
      const auto policy_kind = parse_policy(ph_policy);
      const auto pc = load_input(ph_input, ph_format, ph_subsample, ph_seed);
      const auto dm = mq::pairwise_distances(pc, mq::parse_metric(ph_metric), threads);
      const auto f = mq::build_rips(dm, ph_max_dim, eps, threads);
      log("filtration: " + std::to_string(f.simplices.size()) + " simplices");
      if (!ph_dump.empty()) {
        std::ostringstream s;
        mq::write_filtration_dump(s, f);
        emit(ph_dump, s.str());
      }
      const auto diagrams = mq::compute_persistence(f);
      std::ostringstream csv;
      mq::write_diagrams_csv(csv, diagrams);
      emit(ph_out, csv.str());
      if (!ph_summary.empty()) {
        const auto policy = policy_kind == mq::InfinitePolicy::Kind::Cap
                                ? mq::InfinitePolicy::capped(f.eps_max)
                                : mq::InfinitePolicy::exclude();
        auto out = nlohmann::json::array();
        for (const auto& d : diagrams) out.push_back(mq::to_json(mq::summarize(d, ph_p, policy)));
        emit(ph_summary, out.dump(2) + "\n");
      }
    } else if (*id) {
      const auto method = mq::parse_id_method(id_method);
      const auto pc = load_input(id_input, id_format, id_subsample, id_seed);
      const auto est =
          method == mq::IdMethod::BoxCount
              ? mq::estimate_id_boxcount(pc, id_scales, id_decay)
              : mq::estimate_id_2nn(pc, id_discard,
                                    method == mq::IdMethod::TwoNnMle ? mq::TwoNnVariant::Mle
                                                                     : mq::TwoNnVariant::Fit,
                                    threads);
      emit(id_out, mq::to_json(est).dump(2) + "\n");
    } else if (*metrics) {
      mq::InfinitePolicy policy;
      if (parse_policy(mt_policy) == mq::InfinitePolicy::Kind::Cap) {
        if (mt_eps.empty()) throw Usage("--infinite-policy cap needs --eps-max");
        const auto eps = parse_eps(mt_eps);
        if (!eps) throw Usage("--infinite-policy cap needs a numeric --eps-max");
        policy = mq::InfinitePolicy::capped(*eps);
      }
      const auto first = mq::parse_diagrams_csv(read_file(mt_diagram));
      nlohmann::json out;
      out["summaries"] = nlohmann::json::array();
      for (const auto& d : first) out["summaries"].push_back(mq::to_json(mq::summarize(d, mt_p, policy)));
      if (!mt_against.empty()) {
        const auto second = mq::parse_diagrams_csv(read_file(mt_against));
        out["distances"] = nlohmann::json::array();
        for (std::size_t k = 0; k < std::max(first.size(), second.size()); ++k) {
          const mq::PersistenceDiagram empty{static_cast<int>(k), {}};
          const auto& a = k < first.size() ? first[k] : empty;
          const auto& b = k < second.size() ? second[k] : empty;
          out["distances"].push_back({{"dim", k},
                                      {"wasserstein", {{"p", mt_p}, {"value", mq::wasserstein(a, b, mt_p, policy)}}},
                                      {"bottleneck", mq::bottleneck(a, b, policy)}});
        }
      }
      emit(mt_out, out.dump(2) + "\n");
    } else if (*track) {
      cfg.subsample = tr_subsample;
      cfg.eps_max = parse_eps(tr_eps);
      cfg.infinite_policy = parse_policy(tr_policy);
      cfg.metric = mq::parse_metric(tr_metric);
      if (tr_out.empty() && tr_json.empty()) throw Usage("track needs --out and/or --json");
      const auto paths = mq::resolve_snapshots(tr_snapshots);
      log("tracking " + std::to_string(paths.size()) + " snapshots, config " + mq::config_hash(cfg));
      const auto report = mq::track(paths, tr_reference, cfg, threads);
      if (!tr_out.empty()) mq::export_report(report, mq::ReportFormat::Csv, tr_out);
      if (!tr_json.empty()) mq::export_report(report, mq::ReportFormat::Json, tr_json);
    }
  } catch (const Usage& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const mq::Error& e) {
    std::cerr << nlohmann::json{{"error", mq::to_string(e.kind())}, {"message", e.what()}}.dump()
              << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }
  return 0;
}
