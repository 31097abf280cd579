// netinfof: probe and act on graphs, synthetic data generation, scaling
// benchmark. Run `netinfof --help` for the command list.

#include "netinfof/bench.hpp"
#include "netinfof/io.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>

namespace nf = netinfof;
namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string command;
  fs::path graph;
  fs::path features;
  fs::path labels;
  fs::path out = "netinfof_out";
  nf::Index dim = 128;
  int bins = 32;
  int clusters = 0;  // 0: twice the class count
  std::size_t sample_size = 200000;
  int walk_trials = 1000;
  std::uint64_t seed = 0;
  int splits = 5;
  double lp_train = 0.7;
  double lp_valid = 0.1;
  double nc_train = 0.025;
  double nc_valid = 0.025;
  std::vector<double> wd1{1e-4, 1e-5};
  std::vector<double> wd2{1e-3, 1e-4, 1e-5, 1e-6};
  double lr = 0.1;
  int epochs = 100;
  int patience = 5;
  bool resample = true;
  std::size_t hits_k = 100;
  bool cache = true;
  std::string cluster_fit = "test";
  // synth-gen / bench-scaling
  std::string suite = "all";
  int nodes = 4000;
  int num_features = 800;
  std::optional<double> density;  // scenario defaults when unset
  std::optional<double> noise;
  std::vector<double> factors{1, 2, 4, 8};
  int repeats = 1;
};

nf::LinkConfig link_config(const RunConfig& rc, std::uint64_t seed) {
  nf::LinkConfig lc;
  lc.embed.dim = rc.dim;
  lc.embed.walk_trials = rc.walk_trials;
  lc.compat.sample_size = rc.sample_size;
  lc.bins = rc.bins;
  lc.seed = seed;
  return lc;
}

nf::ActConfig act_config(const RunConfig& rc, std::uint64_t seed) {
  nf::ActConfig ac;
  ac.train.lr = rc.lr;
  ac.train.epochs = rc.epochs;
  ac.train.patience = rc.patience;
  ac.train.negative_resampling = rc.resample;
  ac.train.seed = seed;
  ac.wd1_grid = rc.wd1;
  ac.wd2_grid = rc.wd2;
  ac.hits_k = rc.hits_k;
  ac.seed = seed;
  return ac;
}

nf::Json manifest(const RunConfig& rc) {
  nf::Json m{{"command", rc.command},
             {"dim", rc.dim},
             {"bins", rc.bins},
             {"clusters", rc.clusters},
             {"sample_size", rc.sample_size},
             {"walk_trials", rc.walk_trials},
             {"seed", rc.seed},
             {"splits", rc.splits},
             {"lp_split", {rc.lp_train, rc.lp_valid, 1.0 - rc.lp_train - rc.lp_valid}},
             {"nc_split", {rc.nc_train, rc.nc_valid, 1.0 - rc.nc_train - rc.nc_valid}},
             {"wd1", rc.wd1},
             {"wd2", rc.wd2},
             {"lr", rc.lr},
             {"epochs", rc.epochs},
             {"patience", rc.patience},
             {"negative_resampling", rc.resample},
             {"hits_k", rc.hits_k},
             {"cluster_fit", rc.cluster_fit}};
  for (const auto& [key, path] : {std::pair{"graph", rc.graph}, {"features", rc.features}, {"labels", rc.labels}}) {
    if (!path.empty()) m["inputs"][key] = {{"path", path.string()}, {"hash", nf::file_hash(path)}};
  }
  return m;
}

void write_json(const fs::path& p, const nf::Json& j) {
  std::ofstream out(p);
  if (!out) throw nf::ResourceError("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

struct Inputs {
  nf::SparseGraph graph;
  nf::FeatureMatrix features;
  std::vector<int> labels;
  int num_classes = 0;
};

Inputs load_inputs(const RunConfig& rc, bool need_labels) {
  if (rc.graph.empty() || rc.features.empty()) throw nf::InputError("--graph and --features are required");
  Inputs in;
  const nf::EdgeFile ef = nf::read_edge_list(rc.graph);
  in.features = nf::read_features(rc.features);
  const auto n = std::max<nf::NodeId>(ef.num_nodes, static_cast<nf::NodeId>(in.features.num_nodes()));
  in.graph = nf::build_graph(ef.edges, n);
  in.features.validate(n);
  if (need_labels) {
    if (rc.labels.empty()) throw nf::InputError("--labels is required");
    in.labels = nf::read_labels(rc.labels);
    if (in.labels.size() != static_cast<std::size_t>(n))
      throw nf::InputError("label count (" + std::to_string(in.labels.size()) + ") does not match node count (" +
                           std::to_string(n) + ")");
    in.num_classes = *std::max_element(in.labels.begin(), in.labels.end()) + 1;
  }
  return in;
}

/// Embeddings keyed by a hash of everything they depend on; a stale or
/// missing cache entry is recomputed and rewritten.
nf::EmbeddingSet cached_embeddings(const RunConfig& rc, const nf::SparseGraph& g,
                                   const nf::FeatureMatrix& x, const nf::EmbedConfig& cfg,
                                   const std::string& scope) {
  std::ostringstream key;
  key << "graph=" << (rc.graph.empty() ? "" : nf::file_hash(rc.graph))
      << ";features=" << (rc.features.empty() ? "" : nf::file_hash(rc.features)) << ";scope=" << scope
      << ";dim=" << cfg.dim << ";T=" << cfg.walk_trials << ";k_ppr=" << cfg.walk_steps
      << ";k_row=" << cfg.row_steps << ";k_sym=" << cfg.sym_steps
      << ";mode=" << static_cast<int>(cfg.count_mode) << ";start=" << cfg.count_start << ";seed=" << cfg.seed;
  const std::string hash = nf::content_hash(key.str());
  const fs::path dir = rc.out / "cache" / scope;
  const fs::path meta = dir / "embeddings.json";
  if (rc.cache && fs::exists(meta)) {
    std::ifstream in(meta);
    const nf::Json j = nf::Json::parse(in, nullptr, false);
    if (!j.is_discarded() && j.value("key", "") == hash) {
      nf::EmbeddingSet e;
      e.dim = cfg.dim;
      for (nf::Component c : nf::kAllComponents)
        e[c] = nf::read_dense(dir / (std::string(nf::component_name(c)) + ".bin"));
      for (const auto& [k, v] : j.at("provenance").items()) e.provenance[k] = v.get<std::string>();
      e.provenance["cache"] = "hit";
      return e;
    }
  }
  nf::EmbeddingSet e = nf::compute_embeddings(g, x, cfg);
  if (rc.cache) {
    fs::create_directories(dir);
    for (nf::Component c : nf::kAllComponents)
      nf::write_dense(dir / (std::string(nf::component_name(c)) + ".bin"), e[c]);
    nf::Json prov = nf::Json::object();
    for (const auto& [k, v] : e.provenance) prov[k] = v;
    write_json(meta, {{"key", hash}, {"key_source", key.str()}, {"provenance", prov}});
  }
  return e;
}

/// Same pipeline as prepare_link_prediction, with the embedding step cached.
nf::LinkPredictionData prepare_lp(const RunConfig& rc, const Inputs& in, const nf::EdgeSplit& split,
                                  const nf::LinkConfig& lc, int split_index) {
  nf::LinkPredictionData data;
  data.graph = &in.graph;
  data.split = split;
  auto t0 = std::chrono::steady_clock::now();
  data.train_graph = nf::build_graph(split.train_pos, in.graph.num_nodes());
  nf::EmbedConfig ec = lc.embed;
  ec.seed = nf::derive_seed(lc.seed, "embed");
  data.embeddings = cached_embeddings(rc, data.train_graph, in.features, ec,
                                      "lp_split" + std::to_string(split_index) + "_" + std::to_string(split.seed));
  data.timings["embed"] = nf::detail::seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  for (nf::Component c : nf::kAllComponents)
    data.z_hat[static_cast<int>(c)] = nf::preprocess_hat(data.embeddings[c]);
  data.timings["preprocess"] = nf::detail::seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  for (nf::Component c : nf::kAllComponents) {
    const int i = static_cast<int>(c);
    data.compat[i] = nf::estimate_compatibility(data.z_hat[i], in.graph, split.train_pos, lc.compat,
                                                nf::derive_seed(lc.seed, "compat", static_cast<std::uint64_t>(i)));
    for (const std::string& w : data.compat[i].sample.warnings)
      std::cerr << "warning: " << nf::component_name(c) << ": " << w << '\n';
  }
  data.timings["compat"] = nf::detail::seconds_since(t0);
  return data;
}

std::string pct(double mean, double sd) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%5.1f +- %4.1f", 100.0 * mean, 100.0 * sd);
  return buf;
}

class TimingLog {
 public:
  void add(int split, const std::map<std::string, double>& t) {
    for (const auto& [k, v] : t) rows_.push_back({split, k, v});
  }
  void write(const fs::path& p) const {
    std::ofstream out(p);
    out << "split,phase,seconds\n";
    for (const auto& r : rows_) out << r.split << ',' << r.phase << ',' << r.seconds << '\n';
  }
  std::map<std::string, double> mean() const {
    std::map<std::string, double> sum;
    std::map<std::string, int> n;
    for (const auto& r : rows_) {
      sum[r.phase] += r.seconds;
      ++n[r.phase];
    }
    for (auto& [k, v] : sum) v /= n[k];
    return sum;
  }

 private:
  struct Row {
    int split;
    std::string phase;
    double seconds;
  };
  std::vector<Row> rows_;
};

/// Aggregate score report: mean per component at the top level, every split
/// under "splits".
void write_reports(const RunConfig& rc, const std::vector<nf::ScoreReport>& reports, const TimingLog& tl) {
  nf::Json splits = nf::Json::array();
  for (const auto& r : reports) splits.push_back(nf::to_json(r));
  nf::Json comps = nf::Json::object();
  std::ostringstream summary;
  summary << "NetInfoF_Score (" << nf::task_name(reports.front().task) << ", " << reports.size()
          << " splits, percent)\n";
  for (nf::Component c : nf::kAllComponents) {
    std::vector<double> s;
    std::vector<double> b;
    for (const auto& r : reports) {
      s.push_back(r[c].score);
      b.push_back(r[c].accuracy_bound);
    }
    const auto [sm, ss] = nf::mean_std(s);
    const auto [bm, bs] = nf::mean_std(b);
    comps[std::string(nf::component_name(c))] = {{"score", sm}, {"score_std", ss}, {"accuracy_bound", bm},
                                                 {"accuracy_bound_std", bs}, {"params", reports.front().params}};
    summary << "  " << nf::component_name(c) << "  score " << pct(sm, ss) << "   accuracy bound " << pct(bm, bs) << '\n';
  }
  nf::Json timings = nf::Json::object();
  for (const auto& [k, v] : tl.mean()) timings[k] = v;
  write_json(rc.out / "score_report.json", {{"task", nf::task_name(reports.front().task)},
                                           {"components", comps},
                                           {"seed", rc.seed},
                                           {"timings", timings},
                                           {"splits", splits}});
  tl.write(rc.out / "timings.csv");
  std::ofstream(rc.out / "summary.txt") << summary.str();
  std::cout << summary.str();
}

void write_metrics(const RunConfig& rc, const std::string& metric, const std::vector<nf::ActResult>& results,
                   const TimingLog& tl) {
  std::vector<double> test;
  std::vector<double> valid;
  nf::Json per = nf::Json::array();
  for (const auto& r : results) {
    test.push_back(r.test_metric);
    valid.push_back(r.valid_metric);
    per.push_back({{"test", r.test_metric}, {"valid", r.valid_metric}, {"wd1", r.selected.wd1},
                   {"wd2", r.selected.wd2}, {"best_epoch", r.selected.best_epoch}});
  }
  const auto [tm, ts] = nf::mean_std(test);
  const auto [vm, vs] = nf::mean_std(valid);
  nf::Json timings = nf::Json::object();
  for (const auto& [k, v] : tl.mean()) timings[k] = v;
  write_json(rc.out / "metrics.json", {{"metric", metric}, {"value", tm}, {"std", ts}, {"valid", vm},
                                       {"valid_std", vs}, {"splits", per}, {"timings", timings}});
  {
    std::ofstream csv(rc.out / "results.csv");
    csv << "command,metric,mean,std,splits\n"
        << rc.command << ',' << metric << ',' << tm << ',' << ts << ',' << results.size() << '\n';
  }
  tl.write(rc.out / "timings.csv");
  std::ostringstream summary;
  summary << "NetInfoF_Act " << metric << " over " << results.size() << " splits (percent)\n"
          << "  test  " << pct(tm, ts) << "\n  valid " << pct(vm, vs) << '\n';
  std::ofstream(rc.out / "summary.txt") << summary.str();
  std::cout << summary.str();
}

std::uint64_t split_seed(const RunConfig& rc, int s) { return nf::derive_seed(rc.seed, "split", static_cast<std::uint64_t>(s)); }

int run_lp(const RunConfig& rc, bool act) {
  const Inputs in = load_inputs(rc, false);
  std::vector<nf::ScoreReport> reports;
  std::vector<nf::ActResult> results;
  TimingLog tl;
  for (int s = 0; s < rc.splits; ++s) {
    const nf::EdgeSplit split =
        nf::split_edges(in.graph, {rc.lp_train, rc.lp_valid, 1.0 - rc.lp_train - rc.lp_valid}, split_seed(rc, s));
    const std::uint64_t run_seed = nf::derive_seed(rc.seed, "run", static_cast<std::uint64_t>(s));
    const nf::LinkConfig lc = link_config(rc, run_seed);
    const nf::LinkPredictionData data = prepare_lp(rc, in, split, lc, s);
    if (act) {
      nf::ActResult r = nf::act_link_prediction(data, act_config(rc, nf::derive_seed(run_seed, "act")));
      nf::write_dense(rc.out / ("model_split" + std::to_string(s) + ".bin"), r.model.weights);
      tl.add(s, r.timings);
      results.push_back(std::move(r));
    } else {
      nf::ScoreReport r = nf::probe_link_prediction(data, lc);
      for (nf::Component c : nf::kAllComponents) {
        const int i = static_cast<int>(c);
        nf::write_compat(rc.out / ("compat_split" + std::to_string(s) + "_" + std::string(nf::component_name(c)) + ".bin"),
                         data.compat[i].h_star);
      }
      tl.add(s, r.timings);
      write_json(rc.out / ("score_report_split" + std::to_string(s) + ".json"), nf::to_json(r));
      reports.push_back(std::move(r));
    }
  }
  if (act) write_metrics(rc, "hits@" + std::to_string(rc.hits_k), results, tl);
  else write_reports(rc, reports, tl);
  return 0;
}

int run_nc(const RunConfig& rc, bool act) {
  const Inputs in = load_inputs(rc, true);
  nf::EmbedConfig ec;
  ec.dim = rc.dim;
  ec.walk_trials = rc.walk_trials;
  ec.seed = nf::derive_seed(rc.seed, "embed");
  const auto t0 = std::chrono::steady_clock::now();
  const nf::EmbeddingSet emb = cached_embeddings(rc, in.graph, in.features, ec, "nc_full");
  const double embed_time = nf::detail::seconds_since(t0);
  const nf::ClusterFitScope scope =
      rc.cluster_fit == "all" ? nf::ClusterFitScope::AllRows : nf::ClusterFitScope::TestRows;
  std::vector<nf::ScoreReport> reports;
  std::vector<nf::ActResult> results;
  TimingLog tl;
  for (int s = 0; s < rc.splits; ++s) {
    const nf::NodeSplit split = nf::split_nodes(in.graph.num_nodes(), rc.nc_train, rc.nc_valid, split_seed(rc, s));
    const std::uint64_t run_seed = nf::derive_seed(rc.seed, "run", static_cast<std::uint64_t>(s));
    if (act) {
      nf::ActResult r = nf::act_node_classification(emb, in.labels, in.num_classes, split,
                                                    act_config(rc, nf::derive_seed(run_seed, "act")));
      r.timings["embed"] = embed_time;
      nf::write_dense(rc.out / ("model_split" + std::to_string(s) + ".bin"), r.model.weights);
      tl.add(s, r.timings);
      results.push_back(std::move(r));
    } else {
      nf::ScoreReport r = nf::probe_node_classification(emb, in.labels, in.num_classes, split, rc.clusters,
                                                        nf::derive_seed(run_seed, "probe"), scope);
      r.timings["embed"] = embed_time;
      tl.add(s, r.timings);
      write_json(rc.out / ("score_report_split" + std::to_string(s) + ".json"), nf::to_json(r));
      reports.push_back(std::move(r));
    }
  }
  if (act) write_metrics(rc, "accuracy", results, tl);
  else write_reports(rc, reports, tl);
  return 0;
}

int run_synth(const RunConfig& rc) {
  std::vector<nf::SynthSpec> specs;
  if (rc.suite == "lp" || rc.suite == "all") {
    auto s = nf::scenario_suite(nf::Task::LinkPrediction, rc.seed);
    specs.insert(specs.end(), s.begin(), s.end());
  }
  if (rc.suite == "nc" || rc.suite == "all") {
    auto s = nf::scenario_suite(nf::Task::NodeClassification, rc.seed);
    specs.insert(specs.end(), s.begin(), s.end());
  }
  if (specs.empty()) throw nf::InputError("--suite must be lp, nc or all");
  for (nf::SynthSpec sp : specs) {
    sp.num_nodes = rc.nodes;
    sp.num_features = rc.num_features;
    if (rc.density) sp.target_density = *rc.density;
    if (rc.noise) sp.noise_rate = *rc.noise;
    sp.walk_trials = rc.walk_trials;
    const nf::SynthDataset d = nf::generate(sp);
    nf::write_dataset(rc.out / sp.name, d);
    std::cout << sp.name << ": " << d.graph.num_nodes() << " nodes, " << d.graph.num_edges() << " edges\n";
  }
  return 0;
}

int run_bench(const RunConfig& rc) {
  nf::SynthSpec base = nf::scenario_suite(nf::Task::LinkPrediction, rc.seed)[2];  // global X, diagonal A
  base.num_nodes = rc.nodes;
  base.num_features = rc.num_features;
  if (rc.density) base.target_density = *rc.density;
  if (rc.noise) base.noise_rate = *rc.noise;
  base.walk_trials = rc.walk_trials;
  const auto rows = nf::bench_scaling(base, rc.factors, link_config(rc, rc.seed), act_config(rc, rc.seed), rc.repeats);
  fs::create_directories(rc.out);
  std::ofstream csv(rc.out / "scaling.csv");
  csv << "factor,nodes,edges";
  for (const auto& [k, v] : rows.front().phases) csv << ',' << k;
  csv << ",total\n";
  std::vector<double> e;
  std::vector<double> t;
  for (const auto& r : rows) {
    csv << r.factor << ',' << r.nodes << ',' << r.edges;
    for (const auto& [k, v] : r.phases) csv << ',' << v;
    csv << ',' << r.total << '\n';
    e.push_back(static_cast<double>(r.edges));
    t.push_back(r.total);
    std::cout << "factor " << r.factor << ": " << r.edges << " edges, " << r.total << " s\n";
  }
  const nf::LinearFit fit = nf::fit_line(e, t);
  std::cout << "linear fit: seconds = " << fit.slope << " * edges + " << fit.intercept << ", R^2 = " << fit.r2 << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network usable information: probe and act for link prediction and node classification"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; command-line flags override it");
  RunConfig rc;

  app.add_option("--graph", rc.graph, "edge list (u<TAB>v per line)");
  app.add_option("--features", rc.features, "feature matrix (binary dense or CSV)");
  app.add_option("--labels", rc.labels, "node labels, one per line");
  app.add_option("--out", rc.out, "output directory");
  app.add_option("--dim", rc.dim, "embedding dimension d")->check(CLI::PositiveNumber);
  app.add_option("--bins", rc.bins, "discretizer bins for link probes")->check(CLI::PositiveNumber);
  app.add_option("--clusters", rc.clusters, "k-means clusters for node probes (0: 2c)")->check(CLI::NonNegativeNumber);
  app.add_option("--sample-size", rc.sample_size, "positive pairs S for H*")->check(CLI::PositiveNumber);
  app.add_option("--walk-trials", rc.walk_trials, "random walks per node")->check(CLI::PositiveNumber);
  app.add_option("--seed", rc.seed, "master seed");
  app.add_option("--splits", rc.splits, "number of random splits")->check(CLI::PositiveNumber);
  app.add_option("--lp-train", rc.lp_train, "edge fraction for training")->check(CLI::Range(0.0, 1.0));
  app.add_option("--lp-valid", rc.lp_valid, "edge fraction for validation")->check(CLI::Range(0.0, 1.0));
  app.add_option("--nc-train", rc.nc_train, "node fraction for training")->check(CLI::Range(0.0, 1.0));
  app.add_option("--nc-valid", rc.nc_valid, "node fraction for validation")->check(CLI::Range(0.0, 1.0));
  app.add_option("--wd1", rc.wd1, "L1 grid")->delimiter(',');
  app.add_option("--wd2", rc.wd2, "group penalty grid")->delimiter(',');
  app.add_option("--lr", rc.lr, "learning rate")->check(CLI::PositiveNumber);
  app.add_option("--epochs", rc.epochs, "training epochs")->check(CLI::PositiveNumber);
  app.add_option("--patience", rc.patience, "early stopping patience")->check(CLI::PositiveNumber);
  app.add_option("--resample", rc.resample, "fresh negatives every epoch (true/false)");
  app.add_option("--hits-k", rc.hits_k, "K of Hits@K")->check(CLI::PositiveNumber);
  app.add_option("--cache", rc.cache, "reuse cached embeddings (true/false)");
  app.add_option("--cluster-fit", rc.cluster_fit, "rows k-means is fit on")->check(CLI::IsMember({"test", "all"}));
  app.add_option("--suite", rc.suite, "synthetic suite")->check(CLI::IsMember({"lp", "nc", "all"}));
  app.add_option("--nodes", rc.nodes, "synthetic node count")->check(CLI::PositiveNumber);
  app.add_option("--num-features", rc.num_features, "synthetic feature count")->check(CLI::PositiveNumber);
  app.add_option("--density", rc.density, "synthetic average degree")->check(CLI::PositiveNumber);
  app.add_option("--noise", rc.noise, "synthetic noise edge fraction")->check(CLI::Range(0.0, 1.0));
  app.add_option("--factors", rc.factors, "scaling factors")->delimiter(',');
  app.add_option("--repeats", rc.repeats, "timing repeats (minimum kept)")->check(CLI::PositiveNumber);

  const std::pair<const char*, const char*> commands[] = {
      {"probe-lp", "NetInfoF_Score per component for link prediction"},
      {"probe-nc", "NetInfoF_Score per component for node classification"},
      {"act-lp", "train the link predictor and report Hits@K"},
      {"act-nc", "train the node classifier and report accuracy"},
      {"synth-gen", "write the synthetic scenario datasets"},
      {"bench-scaling", "time act-lp on growing synthetic graphs"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  rc.command = app.get_subcommands().front()->get_name();

  try {
    if (rc.lp_train + rc.lp_valid > 1.0 || rc.nc_train + rc.nc_valid > 1.0)
      throw nf::InputError("train and valid fractions must sum to at most 1");
    fs::create_directories(rc.out);
    write_json(rc.out / "manifest.json", manifest(rc));
    if (rc.command == "probe-lp") return run_lp(rc, false);
    if (rc.command == "act-lp") return run_lp(rc, true);
    if (rc.command == "probe-nc") return run_nc(rc, false);
    if (rc.command == "act-nc") return run_nc(rc, true);
    if (rc.command == "synth-gen") return run_synth(rc);
    if (rc.command == "bench-scaling") return run_bench(rc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
