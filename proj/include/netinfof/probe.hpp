#pragma once

// Probes: per-component NetInfoF_Score without training a predictor.
//   link prediction      adjusted similarity under H*, quantile-binned
//   node classification  k-means cluster ids

#include "netinfof/compat.hpp"
#include "netinfof/embed.hpp"
#include "netinfof/score.hpp"

#include <chrono>
#include <map>

namespace netinfof {

enum class Task { LinkPrediction, NodeClassification };

inline std::string_view task_name(Task t) {
  return t == Task::LinkPrediction ? "link_prediction" : "node_classification";
}

struct ComponentScore {
  double score = 0.0;           // in [0, 1]
  double accuracy_bound = 0.0;  // sum_x max_y p(x, y) on the same table
  int effective_bins = 0;       // bins or clusters actually used
  std::size_t samples = 0;
};

struct ScoreReport {
  Task task = Task::LinkPrediction;
  std::array<ComponentScore, kNumComponents> components{};
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
  std::map<std::string, double> timings;

  const ComponentScore& operator[](Component c) const { return components[static_cast<int>(c)]; }
  ComponentScore& operator[](Component c) { return components[static_cast<int>(c)]; }
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline ComponentScore score_table(const JointCounts& t, int bins) {
  ComponentScore s;
  s.score = netinfof_score(t);
  s.accuracy_bound = accuracy_bound(t);
  s.effective_bins = bins;
  s.samples = static_cast<std::size_t>(t.total());
  return s;
}

}  // namespace detail

/// Probe of one preprocessed component for link prediction. The discretizer
/// is fit on training positives (capped at S) and 2x sampled non-edges, then
/// applied to the validation pairs.
inline ComponentScore probe_link_component(const Matrix& z_hat, const Matrix& h_star,
                                           const SparseGraph& g, std::span<const Edge> train_pos,
                                           std::span<const Edge> valid_pos,
                                           std::span<const Edge> valid_neg,
                                           std::size_t sample_size, int bins, std::uint64_t seed) {
  if (valid_pos.empty() || valid_neg.empty())
    throw InputError("link probe needs validation positives and negatives");
  Rng rng = make_rng(seed, "probe-lp");
  EdgeList pos(train_pos.begin(), train_pos.end());
  if (pos.size() > sample_size) {
    for (std::size_t i = 0; i < sample_size; ++i)
      std::swap(pos[i], pos[i + uniform_index(rng, pos.size() - i)]);
    pos.resize(sample_size);
  }
  std::unordered_set<std::uint64_t> taken;
  const EdgeList neg = sample_non_edges(g, 2 * pos.size(), rng, taken, true);
  EdgeList fit_pairs = pos;
  fit_pairs.insert(fit_pairs.end(), neg.begin(), neg.end());
  const Vector fit_sim = adjusted_similarities(z_hat, fit_pairs, h_star);
  const Discretizer disc = Discretizer::fit({fit_sim.data(), static_cast<std::size_t>(fit_sim.size())}, bins);

  JointCounts table(disc.effective_bins(), 2);
  const Vector sp = adjusted_similarities(z_hat, valid_pos, h_star);
  const Vector sn = adjusted_similarities(z_hat, valid_neg, h_star);
  for (Index i = 0; i < sp.size(); ++i) table.add(disc.transform(sp(i)), 1);
  for (Index i = 0; i < sn.size(); ++i) table.add(disc.transform(sn(i)), 0);
  return detail::score_table(table, disc.effective_bins());
}

struct LinkConfig {
  EmbedConfig embed;
  CompatConfig compat;
  int bins = 32;
  std::uint64_t seed = 0;
};

/// Everything the link-prediction probe and predictor share for one split:
/// embeddings of the training graph, their preprocessed forms and the
/// estimated compatibility matrices.
struct LinkPredictionData {
  const SparseGraph* graph = nullptr;  // full graph, used to reject negatives
  EdgeSplit split;
  SparseGraph train_graph;
  EmbeddingSet embeddings;
  std::array<Matrix, kNumComponents> z_hat;
  std::array<CompatEstimate, kNumComponents> compat;
  std::map<std::string, double> timings;
};

inline LinkPredictionData prepare_link_prediction(const SparseGraph& g, const FeatureMatrix& x,
                                                  const EdgeSplit& split, const LinkConfig& cfg) {
  LinkPredictionData data;
  data.graph = &g;
  data.split = split;
  auto t0 = std::chrono::steady_clock::now();
  data.train_graph = build_graph(split.train_pos, g.num_nodes());
  EmbedConfig ecfg = cfg.embed;
  ecfg.seed = derive_seed(cfg.seed, "embed");
  data.embeddings = compute_embeddings(data.train_graph, x, ecfg);
  data.timings["embed"] = detail::seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  for (Component c : kAllComponents) data.z_hat[static_cast<int>(c)] = preprocess_hat(data.embeddings[c]);
  data.timings["preprocess"] = detail::seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  for (Component c : kAllComponents) {
    const int i = static_cast<int>(c);
    data.compat[i] = estimate_compatibility(data.z_hat[i], g, split.train_pos, cfg.compat,
                                            derive_seed(cfg.seed, "compat", static_cast<std::uint64_t>(i)));
  }
  data.timings["compat"] = detail::seconds_since(t0);
  return data;
}

inline ScoreReport probe_link_prediction(const LinkPredictionData& data, const LinkConfig& cfg) {
  if (data.split.valid_pos.empty() || data.split.valid_neg.empty())
    throw InputError("link probe needs non-empty validation positives and negatives");
  ScoreReport r;
  r.task = Task::LinkPrediction;
  r.seed = cfg.seed;
  r.params = {{"bins", cfg.bins},
              {"sample_size", static_cast<double>(cfg.compat.sample_size)},
              {"dim", static_cast<double>(data.embeddings.dim)}};
  const auto t0 = std::chrono::steady_clock::now();
  for (Component c : kAllComponents) {
    const int i = static_cast<int>(c);
    r.components[i] = probe_link_component(
        data.z_hat[i], data.compat[i].h_star.values, *data.graph, data.split.train_pos,
        data.split.valid_pos, data.split.valid_neg, cfg.compat.sample_size, cfg.bins,
        derive_seed(cfg.seed, "probe", static_cast<std::uint64_t>(i)));
  }
  r.timings = data.timings;
  r.timings["probe"] = detail::seconds_since(t0);
  return r;
}

/// Probe from scratch: embeddings on the training graph, H* per component,
/// discretized validation similarities.
inline ScoreReport probe_link_prediction(const SparseGraph& g, const FeatureMatrix& x,
                                         const EdgeSplit& split, const LinkConfig& cfg) {
  return probe_link_prediction(prepare_link_prediction(g, x, split, cfg), cfg);
}

enum class ClusterFitScope {
  TestRows,  // fit on test rows, assign train and valid
  AllRows,   // fit on every node
};

/// Probe of one embedding block for node classification: row-normalize,
/// cluster, score cluster ids against the train and valid labels.
inline ComponentScore probe_node_component(const Matrix& z, std::span<const int> labels,
                                           int num_classes, const NodeSplit& split, int clusters,
                                           std::uint64_t seed,
                                           ClusterFitScope scope = ClusterFitScope::TestRows) {
  const Matrix z_hat = l2_normalize_rows(z);
  auto take = [&](std::span<const NodeId> ids) {
    Matrix m(static_cast<Index>(ids.size()), z.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) m.row(static_cast<Index>(i)) = z_hat.row(ids[i]);
    return m;
  };
  const Matrix fit_rows = scope == ClusterFitScope::TestRows ? take(split.test) : z_hat;
  const KMeansResult km = kmeans(fit_rows, clusters, seed);
  JointCounts table(clusters, num_classes);
  for (const auto* part : {&split.train, &split.valid}) {
    const std::vector<int> assigned = assign_clusters(take(*part), km.centers);
    for (std::size_t i = 0; i < part->size(); ++i)
      table.add(assigned[i], labels[static_cast<std::size_t>((*part)[i])]);
  }
  return detail::score_table(table, clusters);
}

inline ScoreReport probe_node_classification(const EmbeddingSet& emb, std::span<const int> labels,
                                             int num_classes, const NodeSplit& split,
                                             int clusters, std::uint64_t seed,
                                             ClusterFitScope scope = ClusterFitScope::TestRows) {
  if (clusters < 1) clusters = 2 * num_classes;
  ScoreReport r;
  r.task = Task::NodeClassification;
  r.seed = seed;
  r.params = {{"clusters", clusters}, {"classes", num_classes}};
  const auto t0 = std::chrono::steady_clock::now();
  for (Component c : kAllComponents) {
    const int i = static_cast<int>(c);
    r.components[i] = probe_node_component(emb[c], labels, num_classes, split, clusters,
                                           derive_seed(seed, "probe-nc", static_cast<std::uint64_t>(i)),
                                           scope);
  }
  r.timings["probe"] = detail::seconds_since(t0);
  return r;
}

}  // namespace netinfof
