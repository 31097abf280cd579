#pragma once

// Wall-clock of the link-prediction pipeline on synthetic graphs whose node
// and edge counts grow by the given factors at fixed average degree.

#include "netinfof/act.hpp"
#include "netinfof/synth.hpp"

namespace netinfof {

struct ScalingRow {
  double factor = 1.0;
  NodeId nodes = 0;
  std::size_t edges = 0;
  std::map<std::string, double> phases;  // seconds, minimum over repeats
  double total = 0.0;
  int epochs = 0;  // most epochs run by any grid cell
};

inline std::vector<ScalingRow> bench_scaling(const SynthSpec& base, std::span<const double> factors,
                                             const LinkConfig& lcfg, const ActConfig& acfg,
                                             int repeats = 1) {
  if (repeats < 1) throw InputError("repeats must be >= 1");
  std::vector<ScalingRow> rows;
  for (double f : factors) {
    if (!(f > 0.0)) throw InputError("scaling factors must be positive");
    SynthSpec spec = base;
    spec.task = Task::LinkPrediction;
    const auto c = static_cast<NodeId>(spec.num_classes);
    spec.num_nodes = std::max<NodeId>(c, static_cast<NodeId>(std::llround(base.num_nodes * f / c)) * c);
    const SynthDataset ds = generate(spec);
    ScalingRow row;
    row.factor = f;
    row.nodes = ds.graph.num_nodes();
    row.edges = ds.graph.num_edges();
    for (int r = 0; r < repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const EdgeSplit split = split_edges(ds.graph, {}, derive_seed(lcfg.seed, "bench-split"));
      const double t_split = detail::seconds_since(t0);
      const LinkPredictionData data = prepare_link_prediction(ds.graph, ds.features, split, lcfg);
      const ActResult act = act_link_prediction(data, acfg);
      std::map<std::string, double> ph{{"split", t_split},
                                       {"embed", data.timings.at("embed")},
                                       {"preprocess", data.timings.at("preprocess")},
                                       {"compat", data.timings.at("compat")},
                                       {"features", act.timings.at("features")},
                                       {"train", act.timings.at("train")}};
      for (const GridCell& g : act.grid) row.epochs = std::max(row.epochs, g.epochs_run);
      for (const auto& [k, v] : ph) {
        auto it = row.phases.find(k);
        if (it == row.phases.end() || v < it->second) row.phases[k] = v;
      }
    }
    for (const auto& [k, v] : row.phases) row.total += v;
    rows.push_back(std::move(row));
  }
  return rows;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = a x + b.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("fit_line needs two or more points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

}  // namespace netinfof
