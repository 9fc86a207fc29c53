// nafs: training-free graph embeddings by node-adaptive feature smoothing,
// plus the evaluation harness (clustering, link prediction) and diagnostics.
//
// Exit codes: 0 success, 1 data error, 2 usage error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nafs/cluster.hpp"
#include "nafs/ensemble.hpp"
#include "nafs/error.hpp"
#include "nafs/graph.hpp"
#include "nafs/io.hpp"
#include "nafs/linkpred.hpp"
#include "nafs/rng.hpp"
#include "nafs/smoothing.hpp"
#include "nafs/spectral.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct GraphInput {
  std::string graph_path;
  std::string features_path;
  std::string manifest_path;
  std::int64_t nodes = 0;  // 0 = infer from the edge list
};

struct EmbedOptions {
  int k_max = 20;
  std::vector<double> r_values = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::string ensemble = "mean";
  std::string distance = "cos-initial";
  std::string weighting = "adaptive";
  std::string normalize_rows = "on";
  bool post_normalize = false;
  bool parallel_branches = false;
  std::uint64_t seed = 42;
};

void add_graph_options(CLI::App* cmd, GraphInput& in, bool require) {
  auto* graph = cmd->add_option("--graph", in.graph_path, "edge-list file");
  auto* features = cmd->add_option("--features", in.features_path,
                                   "feature matrix (binary or CSV)");
  auto* manifest =
      cmd->add_option("--manifest", in.manifest_path, "dataset manifest JSON");
  cmd->add_option("--nodes", in.nodes,
                  "node count override (default: max index + 1)");
  if (require) {
    graph->needs(features);
    features->needs(graph);
    manifest->excludes(graph)->excludes(features);
  }
}

void add_embed_options(CLI::App* cmd, EmbedOptions& opt, bool include_k_max = true) {
  if (include_k_max) {
    cmd->add_option("--k-max", opt.k_max, "maximal smoothing step")
        ->check(CLI::Range(0, 1000000))
        ->capture_default_str();
  }
  cmd->add_option("--r", opt.r_values, "operator exponents, comma separated")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--ensemble", opt.ensemble, "mean | max | concat")
      ->check(CLI::IsMember({"mean", "max", "concat"}))
      ->capture_default_str();
  cmd->add_option("--distance", opt.distance, "cos-initial | euclid-stationary")
      ->check(CLI::IsMember({"cos-initial", "euclid-stationary"}))
      ->capture_default_str();
  cmd->add_option("--weighting", opt.weighting, "adaptive | naive | single-hop")
      ->check(CLI::IsMember({"adaptive", "naive", "single-hop"}))
      ->capture_default_str();
  cmd->add_option("--normalize-rows", opt.normalize_rows,
                  "L2-normalize input feature rows")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  cmd->add_flag("--post-normalize", opt.post_normalize,
                "L2-normalize the pooled embedding rows");
  cmd->add_flag("--parallel-branches", opt.parallel_branches,
                "run ensemble branches in parallel");
  cmd->add_option("--seed", opt.seed, "random seed")->capture_default_str();
}

struct LoadedInput {
  nafs::Graph graph;
  nafs::FeatureMatrix features;
  std::vector<int> labels;
  std::int64_t num_classes = 0;
};

LoadedInput load_input(const GraphInput& in) {
  LoadedInput loaded;
  if (!in.manifest_path.empty()) {
    nafs::Dataset d = nafs::load_dataset(nafs::load_manifest(in.manifest_path));
    loaded.graph = std::move(d.graph);
    loaded.features = std::move(d.features);
    loaded.labels = std::move(d.labels);
    loaded.num_classes = d.manifest.num_classes;
    return loaded;
  }
  if (in.graph_path.empty() || in.features_path.empty())
    throw CLI::ValidationError("--graph and --features (or --manifest) are required");
  loaded.graph = nafs::load_graph(
      in.graph_path, in.nodes > 0 ? std::optional<nafs::NodeId>(in.nodes) : std::nullopt);
  loaded.features = nafs::load_features(in.features_path);
  if (loaded.features.rows() != loaded.graph.num_nodes()) {
    throw nafs::DataError("feature rows (" + std::to_string(loaded.features.rows()) +
                          ") do not match node count (" +
                          std::to_string(loaded.graph.num_nodes()) + ")");
  }
  return loaded;
}

nafs::SmoothingConfig smoothing_config(const EmbedOptions& opt) {
  nafs::SmoothingConfig cfg;
  cfg.k_max = opt.k_max;
  cfg.distance_mode = nafs::distance_mode_from_string(opt.distance);
  cfg.weighting = nafs::weighting_from_string(opt.weighting);
  cfg.row_normalize_input = opt.normalize_rows == "on";
  return cfg;
}

nafs::EnsembleConfig ensemble_config(const EmbedOptions& opt) {
  nafs::EnsembleConfig ens;
  ens.r_values = opt.r_values;
  ens.strategy = nafs::ensemble_strategy_from_string(opt.ensemble);
  ens.post_normalize = opt.post_normalize;
  ens.parallel_branches = opt.parallel_branches;
  return ens;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    std::ostringstream ss;
    ss << values[i];
    out += ss.str();
  }
  return out;
}

void echo_embed_config(nafs::MetricReport& report, const EmbedOptions& opt) {
  report.config["k_max"] = std::to_string(opt.k_max);
  report.config["r"] = join_doubles(opt.r_values);
  report.config["ensemble"] = opt.ensemble;
  report.config["distance"] = opt.distance;
  report.config["weighting"] = opt.weighting;
  report.config["normalize_rows"] = opt.normalize_rows;
  report.config["seed"] = std::to_string(opt.seed);
}

// Reports stay byte-stable across runs; wall-clock timing goes to stderr
// and is only recorded in the file when explicitly requested.
void emit_report(const nafs::MetricReport& report, const std::string& path,
                 bool to_stdout) {
  if (to_stdout) {
    std::cout << nafs::report_to_json(report);
  } else if (!path.empty()) {
    nafs::write_report(report, path);
  }
}

std::vector<std::int64_t> percentile_thresholds(const nafs::Graph& g,
                                                const std::vector<double>& percentiles) {
  if (g.num_nodes() == 0) return {};
  std::vector<std::int64_t> degrees(static_cast<std::size_t>(g.num_nodes()));
  for (nafs::NodeId i = 0; i < g.num_nodes(); ++i) degrees[i] = g.degree(i);
  std::sort(degrees.begin(), degrees.end());
  std::vector<std::int64_t> thresholds;
  for (double p : percentiles) {
    const auto idx = static_cast<std::size_t>(
        std::clamp(p / 100.0 * static_cast<double>(degrees.size() - 1), 0.0,
                   static_cast<double>(degrees.size() - 1)));
    thresholds.push_back(degrees[idx]);
  }
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  return thresholds;
}

// ---------------------------------------------------------------------------
// embed

int cmd_embed(const GraphInput& in, const EmbedOptions& opt, const std::string& out_path,
              const std::string& report_path, bool to_stdout, bool timing) {
  const LoadedInput loaded = load_input(in);

  const auto start = Clock::now();
  const nafs::FeatureMatrix z =
      nafs::nafs_ensemble(loaded.graph, loaded.features, smoothing_config(opt),
                          ensemble_config(opt));
  const double elapsed = seconds_since(start);
  std::cerr << "embed: " << z.rows() << "x" << z.cols() << " in " << elapsed << " s\n";

  nafs::save_matrix(z, out_path);

  nafs::MetricReport report;
  report.task = "embed";
  echo_embed_config(report, opt);
  report.config["graph"] = in.manifest_path.empty() ? in.graph_path : in.manifest_path;
  report.metrics["nodes"] = static_cast<double>(z.rows());
  report.metrics["dims"] = static_cast<double>(z.cols());
  if (timing) report.runtime_seconds = elapsed;
  emit_report(report, report_path, to_stdout);
  return 0;
}

// ---------------------------------------------------------------------------
// cluster

int cmd_cluster(const std::string& embedding_path, const std::string& labels_path,
                int clusters, int restarts, int repeats, std::uint64_t seed,
                const std::string& report_path, bool to_stdout, bool timing) {
  const nafs::FeatureMatrix z = nafs::load_features(embedding_path);
  const std::vector<int> labels = nafs::load_labels(labels_path);
  if (static_cast<std::int64_t>(labels.size()) != z.rows())
    throw nafs::DataError("label count does not match embedding rows");
  if (clusters <= 0) {
    std::vector<int> sorted(labels);
    std::sort(sorted.begin(), sorted.end());
    clusters = static_cast<int>(
        std::unique(sorted.begin(), sorted.end()) - sorted.begin());
  }

  const auto start = Clock::now();
  std::vector<double> acc, nmi, ari, ari_raw;
  for (int rep = 0; rep < repeats; ++rep) {
    const nafs::ClusterResult result = nafs::kmeans(
        z, clusters, restarts, nafs::derive_seed(seed, static_cast<std::uint64_t>(rep)));
    const nafs::ClusteringMetrics cm = nafs::clustering_metrics(result.assignments, labels);
    acc.push_back(cm.acc);
    nmi.push_back(cm.nmi);
    ari.push_back(cm.ari);
    ari_raw.push_back(cm.ari_raw);
  }
  const double elapsed = seconds_since(start);

  const auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const auto stddev = [&](const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
  };

  nafs::MetricReport report;
  report.task = "clustering";
  report.metrics["acc"] = mean(acc);
  report.metrics["acc_std"] = stddev(acc);
  report.metrics["nmi"] = mean(nmi);
  report.metrics["nmi_std"] = stddev(nmi);
  report.metrics["ari"] = mean(ari);
  report.metrics["ari_std"] = stddev(ari);
  report.metrics["ari_raw"] = mean(ari_raw);
  report.config["clusters"] = std::to_string(clusters);
  report.config["restarts"] = std::to_string(restarts);
  report.config["repeats"] = std::to_string(repeats);
  report.config["seed"] = std::to_string(seed);
  report.config["embedding"] = embedding_path;
  if (timing) report.runtime_seconds = elapsed;
  std::cerr << "cluster: " << repeats << " repeats in " << elapsed << " s\n";
  emit_report(report, report_path, to_stdout);
  return 0;
}

// ---------------------------------------------------------------------------
// linkpred

int cmd_linkpred(const GraphInput& in, const EmbedOptions& opt, double val_frac,
                 double test_frac, const std::string& report_path, bool to_stdout,
                 bool timing) {
  const LoadedInput loaded = load_input(in);
  nafs::LinkPredConfig lp;
  lp.val_frac = val_frac;
  lp.test_frac = test_frac;
  lp.seed = opt.seed;

  const auto start = Clock::now();
  nafs::MetricReport report = nafs::run_linkpred(
      loaded.graph, loaded.features, smoothing_config(opt), ensemble_config(opt), lp);
  const double elapsed = seconds_since(start);

  echo_embed_config(report, opt);
  report.config["val_frac"] = nafs::format_double(val_frac);
  report.config["test_frac"] = nafs::format_double(test_frac);
  if (timing) report.runtime_seconds = elapsed;
  std::cerr << "linkpred: done in " << elapsed << " s\n";
  emit_report(report, report_path, to_stdout);
  return 0;
}

// ---------------------------------------------------------------------------
// diagnose

int cmd_diagnose_distances(const GraphInput& in, double r, int k_max,
                           std::vector<std::int64_t> thresholds,
                           const std::vector<double>& percentiles, bool normalize,
                           const std::string& out_path) {
  const LoadedInput loaded = load_input(in);
  nafs::FeatureMatrix x = loaded.features;
  if (normalize) x.l2_normalize_rows();
  if (!percentiles.empty()) {
    const auto extra = percentile_thresholds(loaded.graph, percentiles);
    thresholds.insert(thresholds.end(), extra.begin(), extra.end());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  }
  const nafs::DegreeBucketCurves curves =
      nafs::smoothing_speed_report(loaded.graph, x, r, k_max, thresholds);

  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw nafs::DataError("cannot open for writing: " + out_path);
  out << "k";
  for (const auto& bucket : curves.buckets) {
    if (bucket.count == 0) continue;  // absent
    out << ",deg[" << (bucket.lo ? std::to_string(*bucket.lo) : std::string("-inf"))
        << ".." << (bucket.hi ? std::to_string(*bucket.hi) : std::string("inf"))
        << ")n=" << bucket.count;
  }
  out << "\n";
  for (int k = 0; k <= k_max; ++k) {
    out << k;
    for (const auto& bucket : curves.buckets) {
      if (bucket.count == 0) continue;
      out << "," << nafs::format_double(bucket.mean_distance[k]);
    }
    out << "\n";
  }
  return 0;
}

int cmd_diagnose_theorem1(const GraphInput& in, int k_max, bool normalize,
                          const std::string& out_path) {
  const LoadedInput loaded = load_input(in);
  nafs::FeatureMatrix x = loaded.features;
  if (normalize) x.l2_normalize_rows();
  const nafs::SpectralInfo info = nafs::compute_spectral_info(loaded.graph, x);

  const nafs::NormalizedOperator op(loaded.graph, 0.0);
  const nafs::FeatureMatrix stationary =
      nafs::stationary_state(op, x, nafs::connected_components(loaded.graph)).matrix;

  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw nafs::DataError("cannot open for writing: " + out_path);
  out << "node,k,distance,bound\n";

  std::int64_t violations = 0;
  nafs::FeatureMatrix cur = x;
  nafs::FeatureMatrix next;
  for (int k = 0; k <= k_max; ++k) {
    const auto bound = nafs::theorem1_bound(loaded.graph, info, k);
    for (nafs::NodeId i = 0; i < loaded.graph.num_nodes(); ++i) {
      double s = 0.0;
      for (std::int64_t c = 0; c < x.cols(); ++c) {
        const double d = cur(i, c) - stationary(i, c);
        s += d * d;
      }
      const double distance = std::sqrt(s);
      if (distance > bound[i] + 1e-9) ++violations;
      out << i << "," << k << "," << nafs::format_double(distance) << ","
          << nafs::format_double(bound[i]) << "\n";
    }
    if (k < k_max) {
      nafs::spmm(op, cur, next);
      std::swap(cur, next);
    }
  }
  out << "# lambda2," << nafs::format_double(info.lambda2) << "\n";
  out << "# violations," << violations << "\n";
  std::cerr << "theorem1: lambda2=" << info.lambda2 << " violations=" << violations
            << "\n";
  return 0;
}

int cmd_diagnose_mixing(const GraphInput& in, double epsilon, int k_cap, bool normalize,
                        const std::string& out_path) {
  const LoadedInput loaded = load_input(in);
  nafs::FeatureMatrix x = loaded.features;
  if (normalize) x.l2_normalize_rows();
  const nafs::SpectralInfo info = nafs::compute_spectral_info(loaded.graph, x);
  const auto bound = nafs::mixing_time_bound(loaded.graph, x, info, epsilon);

  const nafs::NormalizedOperator op(loaded.graph, 0.0);
  const nafs::FeatureMatrix stationary =
      nafs::stationary_state(op, x, nafs::connected_components(loaded.graph)).matrix;

  std::vector<std::int64_t> first(static_cast<std::size_t>(loaded.graph.num_nodes()), -1);
  nafs::FeatureMatrix cur = x;
  nafs::FeatureMatrix next;
  for (int k = 0; k <= k_cap; ++k) {
    for (nafs::NodeId i = 0; i < loaded.graph.num_nodes(); ++i) {
      if (first[i] >= 0) continue;
      double s = 0.0;
      for (std::int64_t c = 0; c < x.cols(); ++c) {
        const double d = cur(i, c) - stationary(i, c);
        s += d * d;
      }
      if (std::sqrt(s) <= epsilon) first[i] = k;
    }
    if (k < k_cap) {
      nafs::spmm(op, cur, next);
      std::swap(cur, next);
    }
  }

  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw nafs::DataError("cannot open for writing: " + out_path);
  out << "node,empirical_step,bound\n";
  for (nafs::NodeId i = 0; i < loaded.graph.num_nodes(); ++i)
    out << i << "," << first[i] << "," << bound[i] << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const GraphInput& in, const EmbedOptions& opt, const std::string& task,
              int k_min, int k_max, const std::vector<std::string>& strategy_names,
              double val_frac, double test_frac, const std::string& labels_path,
              int clusters, int restarts, int repeats, const std::string& out_path,
              bool to_stdout) {
  const LoadedInput loaded = load_input(in);
  std::vector<nafs::EnsembleStrategy> strategies;
  for (const auto& name : strategy_names)
    strategies.push_back(nafs::ensemble_strategy_from_string(name));

  nafs::SmoothingConfig cfg = smoothing_config(opt);
  nafs::EnsembleConfig ens = ensemble_config(opt);

  std::vector<nafs::SweepRow> rows;
  if (task == "linkpred") {
    nafs::LinkPredConfig lp;
    lp.val_frac = val_frac;
    lp.test_frac = test_frac;
    lp.seed = opt.seed;
    rows = nafs::sweep_linkpred(loaded.graph, loaded.features, cfg, ens, lp, k_min,
                                k_max, strategies);
  } else {
    std::vector<int> labels = loaded.labels;
    if (!labels_path.empty()) labels = nafs::load_labels(labels_path);
    if (labels.empty()) throw nafs::DataError("clustering sweep needs labels");
    int c = clusters;
    if (c <= 0) {
      if (loaded.num_classes > 0) {
        c = static_cast<int>(loaded.num_classes);
      } else {
        std::vector<int> sorted(labels);
        std::sort(sorted.begin(), sorted.end());
        c = static_cast<int>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
      }
    }
    rows = nafs::sweep_cluster(loaded.graph, loaded.features, cfg, ens, labels, c,
                               restarts, repeats, opt.seed, k_min, k_max, strategies);
  }

  std::ostringstream json;
  json << "{\"rows\": [";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) json << ", ";
    json << "{\"k\": " << rows[i].k << ", \"strategy\": \""
         << nafs::to_string(rows[i].strategy) << "\", \"selection\": "
         << nafs::format_double(rows[i].selection);
    for (const auto& [name, value] : rows[i].metrics)
      json << ", \"" << name << "\": " << nafs::format_double(value);
    json << "}";
  }
  json << "], \"task\": \"" << task << "\"}\n";

  if (to_stdout) {
    std::cout << json.str();
  } else {
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw nafs::DataError("cannot open for writing: " + out_path);
    out << json.str();
  }
  if (!rows.empty()) {
    std::cerr << "sweep: best k=" << rows.front().k << " strategy="
              << nafs::to_string(rows.front().strategy)
              << " selection=" << rows.front().selection << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// gen-er

int cmd_gen_er(std::int64_t nodes, double edge_prob, std::int64_t feat_dim,
               std::uint64_t seed, const std::string& out_graph,
               const std::string& out_features) {
  const nafs::Graph g = nafs::generate_er(nodes, edge_prob, nafs::derive_seed(seed, 0));
  nafs::write_edge_list(g, out_graph);

  nafs::Rng rng(nafs::derive_seed(seed, 1));
  nafs::FeatureMatrix x(nodes, feat_dim);
  for (double& v : x.data()) v = rng.next_normal();
  nafs::save_matrix(x, out_features);

  std::cerr << "gen-er: n=" << nodes << " m=" << g.num_edges() << " f=" << feat_dim
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"node-adaptive feature smoothing toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nafs 0.1.0");

  int threads = 0;
  app.add_option("--threads", threads, "cap worker threads (0 = default)");

  // embed
  GraphInput embed_in;
  EmbedOptions embed_opt;
  std::string embed_out, embed_report;
  bool embed_stdout = false, embed_timing = false;
  auto* embed = app.add_subcommand("embed", "compute node embeddings");
  add_graph_options(embed, embed_in, true);
  add_embed_options(embed, embed_opt);
  embed->add_option("--out", embed_out, "embedding output (binary matrix)")->required();
  embed->add_option("--report", embed_report, "report JSON path");
  embed->add_flag("--stdout", embed_stdout, "print the report to stdout");
  embed->add_flag("--timing", embed_timing, "record wall-clock runtime in the report");

  // cluster
  std::string cl_embedding, cl_labels, cl_report;
  int cl_clusters = 0, cl_restarts = 10, cl_repeats = 10;
  std::uint64_t cl_seed = 42;
  bool cl_stdout = false, cl_timing = false;
  auto* cluster = app.add_subcommand("cluster", "k-means clustering evaluation");
  cluster->add_option("--embedding", cl_embedding, "embedding matrix file")->required();
  cluster->add_option("--labels", cl_labels, "ground-truth labels")->required();
  cluster->add_option("--clusters", cl_clusters, "cluster count (0 = #distinct labels)")
      ->capture_default_str();
  cluster->add_option("--restarts", cl_restarts, "k-means restarts per run")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cluster->add_option("--repeats", cl_repeats, "independent runs to aggregate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cluster->add_option("--seed", cl_seed, "random seed")->capture_default_str();
  cluster->add_option("--report", cl_report, "report JSON path");
  cluster->add_flag("--stdout", cl_stdout, "print the report to stdout");
  cluster->add_flag("--timing", cl_timing, "record wall-clock runtime in the report");

  // linkpred
  GraphInput lp_in;
  EmbedOptions lp_opt;
  double lp_val = 0.05, lp_test = 0.10;
  std::string lp_report;
  bool lp_stdout = false, lp_timing = false;
  auto* linkpred = app.add_subcommand("linkpred", "link prediction evaluation");
  add_graph_options(linkpred, lp_in, true);
  add_embed_options(linkpred, lp_opt);
  linkpred->add_option("--val-frac", lp_val, "validation edge fraction")
      ->check(CLI::Range(0.0, 0.99))
      ->capture_default_str();
  linkpred->add_option("--test-frac", lp_test, "test edge fraction")
      ->check(CLI::Range(0.0, 0.99))
      ->capture_default_str();
  linkpred->add_option("--report", lp_report, "report JSON path");
  linkpred->add_flag("--stdout", lp_stdout, "print the report to stdout");
  linkpred->add_flag("--timing", lp_timing, "record wall-clock runtime in the report");

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "smoothing diagnostics");
  diagnose->require_subcommand(1);

  GraphInput dd_in;
  double dd_r = 0.0;
  int dd_kmax = 20;
  std::vector<std::int64_t> dd_thresholds;
  std::vector<double> dd_percentiles;
  std::string dd_out, dd_normalize = "off";
  auto* dd = diagnose->add_subcommand("distances", "degree-bucketed distance curves");
  add_graph_options(dd, dd_in, true);
  dd->add_option("--r", dd_r, "operator exponent")->check(CLI::Range(0.0, 1.0));
  dd->add_option("--k-max", dd_kmax, "steps")->capture_default_str();
  dd->add_option("--thresholds", dd_thresholds, "degree thresholds")->delimiter(',');
  dd->add_option("--percentiles", dd_percentiles,
                 "degree percentiles converted to thresholds")
      ->delimiter(',');
  dd->add_option("--normalize-rows", dd_normalize, "L2-normalize feature rows")
      ->check(CLI::IsMember({"on", "off"}));
  dd->add_option("--out", dd_out, "CSV output")->required();

  GraphInput dt_in;
  int dt_kmax = 10;
  std::string dt_out, dt_normalize = "off";
  auto* dt = diagnose->add_subcommand("theorem1", "per-node distance vs decay bound");
  add_graph_options(dt, dt_in, true);
  dt->add_option("--k-max", dt_kmax, "steps")->capture_default_str();
  dt->add_option("--normalize-rows", dt_normalize, "L2-normalize feature rows")
      ->check(CLI::IsMember({"on", "off"}));
  dt->add_option("--out", dt_out, "CSV output")->required();

  GraphInput dm_in;
  double dm_eps = 0.01;
  int dm_kcap = 200;
  std::string dm_out, dm_normalize = "off";
  auto* dm = diagnose->add_subcommand("mixing-time", "empirical vs bounded mixing step");
  add_graph_options(dm, dm_in, true);
  dm->add_option("--epsilon", dm_eps, "distance threshold")->capture_default_str();
  dm->add_option("--k-cap", dm_kcap, "largest step probed empirically")
      ->capture_default_str();
  dm->add_option("--normalize-rows", dm_normalize, "L2-normalize feature rows")
      ->check(CLI::IsMember({"on", "off"}));
  dm->add_option("--out", dm_out, "CSV output")->required();

  // sweep
  GraphInput sw_in;
  EmbedOptions sw_opt;
  std::string sw_task, sw_labels, sw_out;
  std::vector<std::string> sw_strategies = {"mean"};
  int sw_kmin = 1, sw_kmax = 20, sw_clusters = 0, sw_restarts = 10, sw_repeats = 3;
  double sw_val = 0.05, sw_test = 0.10;
  bool sw_stdout = false;
  auto* sweep = app.add_subcommand("sweep", "rank K (and strategies) by validation metric");
  add_graph_options(sweep, sw_in, true);
  add_embed_options(sweep, sw_opt, false);
  sweep->add_option("--task", sw_task, "cluster | linkpred")
      ->check(CLI::IsMember({"cluster", "linkpred"}))
      ->required();
  sweep->add_option("--k-min", sw_kmin, "smallest K")->capture_default_str();
  sweep->add_option("--k-max", sw_kmax, "largest K")->capture_default_str();
  sweep->add_option("--strategies", sw_strategies, "ensemble strategies to try")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--val-frac", sw_val, "validation fraction (linkpred)")
      ->capture_default_str();
  sweep->add_option("--test-frac", sw_test, "test fraction (linkpred)")
      ->capture_default_str();
  sweep->add_option("--labels", sw_labels, "labels (cluster task)");
  sweep->add_option("--clusters", sw_clusters, "cluster count (0 = infer)")
      ->capture_default_str();
  sweep->add_option("--restarts", sw_restarts, "k-means restarts")->capture_default_str();
  sweep->add_option("--repeats", sw_repeats, "k-means repeats per K")
      ->capture_default_str();
  sweep->add_option("--out", sw_out, "ranked table JSON output");
  sweep->add_flag("--stdout", sw_stdout, "print the table to stdout");

  // gen-er
  std::int64_t ge_nodes = 0, ge_featdim = 32;
  double ge_prob = 0.0;
  std::uint64_t ge_seed = 42;
  std::string ge_graph, ge_features;
  auto* gen_er = app.add_subcommand("gen-er", "generate a random graph + features");
  gen_er->add_option("--nodes", ge_nodes, "node count")->required();
  gen_er->add_option("--edge-prob", ge_prob, "edge probability")
      ->check(CLI::Range(0.0, 1.0))
      ->required();
  gen_er->add_option("--feat-dim", ge_featdim, "feature dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen_er->add_option("--seed", ge_seed, "random seed")->capture_default_str();
  gen_er->add_option("--out-graph", ge_graph, "edge-list output")->required();
  gen_er->add_option("--out-features", ge_features, "feature matrix output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  nafs::set_max_threads(threads);

  try {
    if (embed->parsed())
      return cmd_embed(embed_in, embed_opt, embed_out,
                       embed_report.empty() && !embed_stdout ? embed_out + ".json"
                                                             : embed_report,
                       embed_stdout, embed_timing);
    if (cluster->parsed())
      return cmd_cluster(cl_embedding, cl_labels, cl_clusters, cl_restarts, cl_repeats,
                         cl_seed, cl_report, cl_stdout, cl_timing);
    if (linkpred->parsed()) {
      if (lp_report.empty() && !lp_stdout)
        throw CLI::ValidationError("linkpred needs --report or --stdout");
      return cmd_linkpred(lp_in, lp_opt, lp_val, lp_test, lp_report, lp_stdout,
                          lp_timing);
    }
    if (diagnose->parsed()) {
      if (dd->parsed())
        return cmd_diagnose_distances(dd_in, dd_r, dd_kmax, dd_thresholds,
                                      dd_percentiles, dd_normalize == "on", dd_out);
      if (dt->parsed())
        return cmd_diagnose_theorem1(dt_in, dt_kmax, dt_normalize == "on", dt_out);
      if (dm->parsed())
        return cmd_diagnose_mixing(dm_in, dm_eps, dm_kcap, dm_normalize == "on", dm_out);
    }
    if (sweep->parsed()) {
      if (sw_out.empty() && !sw_stdout)
        throw CLI::ValidationError("sweep needs --out or --stdout");
      return cmd_sweep(sw_in, sw_opt, sw_task, sw_kmin, sw_kmax, sw_strategies, sw_val,
                       sw_test, sw_labels, sw_clusters, sw_restarts, sw_repeats, sw_out,
                       sw_stdout);
    }
    if (gen_er->parsed())
      return cmd_gen_er(ge_nodes, ge_prob, ge_featdim, ge_seed, ge_graph, ge_features);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nafs::ParamError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
