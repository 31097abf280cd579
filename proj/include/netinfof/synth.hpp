#pragma once

// Synthetic graphs with known usable information. Nodes get c equally sized
// classes; edges come from cliques inside a class (diagonal), bipartite
// cliques between paired classes (off-diagonal) or uniform pairs, plus a
// fraction of uniform noise edges.

#include "netinfof/probe.hpp"

#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

namespace netinfof {

enum class Structure { Diagonal, OffDiagonal, Uniform };
enum class LinkFeatures { Random, Global, Local };
enum class NodeFeatures { Useful, Random };

/// Partner class for off-diagonal blocks. Xor pairs 0-1, 2-3, ...; Cyclic
/// pairs k with k+1 mod c.
enum class Pairing { Xor, Cyclic };

inline std::string_view structure_name(Structure s) {
  switch (s) {
    case Structure::Diagonal: return "diagonal";
    case Structure::OffDiagonal: return "off_diagonal";
    case Structure::Uniform: return "uniform";
  }
  return "?";
}
inline std::string_view link_features_name(LinkFeatures f) {
  switch (f) {
    case LinkFeatures::Random: return "random";
    case LinkFeatures::Global: return "global";
    case LinkFeatures::Local: return "local";
  }
  return "?";
}
inline std::string_view node_features_name(NodeFeatures f) {
  return f == NodeFeatures::Useful ? "useful" : "random";
}

struct SynthSpec {
  std::string name;
  Task task = Task::LinkPrediction;
  NodeId num_nodes = 4000;
  Index num_features = 800;
  int num_classes = 4;
  Structure structure = Structure::Diagonal;
  LinkFeatures features_lp = LinkFeatures::Random;
  NodeFeatures features_nc = NodeFeatures::Useful;
  double target_density = 10.0;  // average degree
  int clique_min = 4;
  int clique_max = 8;
  double noise_rate = 0.05;      // fraction of edges placed uniformly at random
  double feature_noise = 0.5;    // link features: noise std relative to 1/sqrt(rows)
  double class_noise = 9.5;      // node features: std of the per-node Gaussian
  int walk_trials = 1000;
  Pairing pairing = Pairing::Xor;
  std::uint64_t seed = 0;

  void validate() const {
    if (num_classes < 1 || num_nodes < num_classes || num_nodes % num_classes != 0)
      throw InputError("num_nodes must be a positive multiple of num_classes");
    if (clique_min < 2 || clique_max < clique_min) throw InputError("invalid clique size range");
    if (noise_rate < 0.0 || noise_rate > 1.0) throw InputError("noise_rate must lie in [0, 1]");
    if (!(target_density > 0.0)) throw InputError("target_density must be positive");
    if (num_features < 1) throw InputError("num_features must be positive");
    if (structure == Structure::OffDiagonal && num_classes < 2)
      throw InputError("off-diagonal structure needs at least two classes");
    if (task == Task::LinkPrediction && features_lp == LinkFeatures::Local &&
        num_features < num_classes)
      throw InputError("local features need at least one column per class");
  }
};

struct SynthGraph {
  SparseGraph graph;
  std::vector<int> labels;
  std::size_t structural_edges = 0;  // before noise injection
};

struct SynthDataset {
  SynthSpec spec;
  SparseGraph graph;
  std::vector<int> labels;
  FeatureMatrix features;
};

inline int partner_class(int k, int c, Pairing p) {
  if (p == Pairing::Cyclic) return (k + 1) % c;
  const int q = k ^ 1;
  return q < c ? q : (k + 1) % c;
}

namespace detail {

inline std::vector<NodeId> pick_distinct(const std::vector<NodeId>& pool, int count, Rng& rng) {
  std::vector<NodeId> out;
  const auto n = static_cast<std::uint64_t>(pool.size());
  const auto want = std::min<std::uint64_t>(static_cast<std::uint64_t>(count), n);
  std::unordered_set<std::uint64_t> used;
  while (out.size() < want) {
    const std::uint64_t i = uniform_index(rng, n);
    if (used.insert(i).second) out.push_back(pool[i]);
  }
  return out;
}

}  // namespace detail

/// Structure plus equally assigned labels (random order).
inline SynthGraph gen_structure(const SynthSpec& spec) {
  spec.validate();
  const NodeId n = spec.num_nodes;
  const int c = spec.num_classes;
  Rng rng = make_rng(spec.seed, "synth-structure");

  SynthGraph out;
  out.labels.resize(static_cast<std::size_t>(n));
  for (NodeId i = 0; i < n; ++i)
    out.labels[static_cast<std::size_t>(i)] = static_cast<int>(static_cast<std::int64_t>(i) * c / n);
  shuffle(out.labels, rng);
  std::vector<std::vector<NodeId>> members(static_cast<std::size_t>(c));
  for (NodeId i = 0; i < n; ++i) members[static_cast<std::size_t>(out.labels[i])].push_back(i);

  const auto target = static_cast<std::size_t>(std::llround(spec.target_density * n / 2.0));
  const auto structural =
      static_cast<std::size_t>(std::llround(static_cast<double>(target) * (1.0 - spec.noise_rate)));
  std::unordered_set<std::uint64_t> seen;
  EdgeList edges;
  auto add = [&](NodeId a, NodeId b) {
    if (a == b) return;
    const Edge e = Edge::canonical(a, b);
    if (seen.insert(e.key()).second) edges.push_back(e);
  };
  auto clique_size = [&] {
    return spec.clique_min +
           static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(spec.clique_max - spec.clique_min + 1)));
  };
  const std::size_t max_pairs = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
  if (target > max_pairs) throw InputError("target density exceeds the complete graph");
  std::size_t capacity = max_pairs;
  if (spec.structure != Structure::Uniform) {
    capacity = 0;
    std::set<std::pair<int, int>> blocks;
    for (int k = 0; k < c; ++k) {
      const int q = spec.structure == Structure::Diagonal ? k : partner_class(k, c, spec.pairing);
      blocks.insert({std::min(k, q), std::max(k, q)});
    }
    for (const auto& [a, b] : blocks) {
      const std::size_t na = members[static_cast<std::size_t>(a)].size();
      const std::size_t nb = members[static_cast<std::size_t>(b)].size();
      capacity += a == b ? na * (na - 1) / 2 : na * nb;
    }
  }
  if (structural > capacity)
    throw InputError("target density exceeds the edges the structure can hold (" + std::to_string(capacity) + ")");

  while (edges.size() < structural) {
    const int k = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(c)));
    switch (spec.structure) {
      case Structure::Diagonal: {
        const auto nodes = detail::pick_distinct(members[k], clique_size(), rng);
        for (std::size_t a = 0; a < nodes.size(); ++a)
          for (std::size_t b = a + 1; b < nodes.size(); ++b) add(nodes[a], nodes[b]);
        break;
      }
      case Structure::OffDiagonal: {
        const int q = partner_class(k, c, spec.pairing);
        const auto left = detail::pick_distinct(members[k], clique_size(), rng);
        const auto right = detail::pick_distinct(members[q], clique_size(), rng);
        for (NodeId a : left)
          for (NodeId b : right) add(a, b);
        break;
      }
      case Structure::Uniform: {
        add(static_cast<NodeId>(uniform_index(rng, static_cast<std::uint64_t>(n))),
            static_cast<NodeId>(uniform_index(rng, static_cast<std::uint64_t>(n))));
        break;
      }
    }
  }
  out.structural_edges = edges.size();
  const std::size_t total = std::min(max_pairs, edges.size() + (target - structural));
  while (edges.size() < total) {
    add(static_cast<NodeId>(uniform_index(rng, static_cast<std::uint64_t>(n))),
        static_cast<NodeId>(uniform_index(rng, static_cast<std::uint64_t>(n))));
  }
  out.graph = build_graph(edges, n);
  return out;
}

namespace detail {

inline Matrix rows_of(const SparseMatrix& m, std::span<const NodeId> rows) {
  SparseMatrix out(static_cast<Index>(rows.size()), m.cols());
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (SparseMatrix::InnerIterator it(m, rows[r]); it; ++it)
      trips.emplace_back(static_cast<Index>(r), it.col(), it.value());
  out.setFromTriplets(trips.begin(), trips.end());
  return Matrix(out);
}

}  // namespace detail

/// Link-prediction features. Global: left singular vectors of the 2-step
/// walk-count matrix. Local: per class, the left singular vectors of that
/// class's rows of the same matrix in a class-owned column slice. Both get
/// Gaussian noise; random is a Bernoulli(0.5) matrix.
inline FeatureMatrix gen_features_lp(const SynthSpec& spec, const SparseGraph& g,
                                     std::span<const int> labels) {
  spec.validate();
  const NodeId n = g.num_nodes();
  const Index f = spec.num_features;
  Rng rng = make_rng(spec.seed, "synth-features-lp");
  FeatureMatrix x;
  if (spec.features_lp == LinkFeatures::Random) {
    x.data.resize(n, f);
    for (Index j = 0; j < f; ++j)
      for (Index i = 0; i < n; ++i) x.data(i, j) = static_cast<double>(rng() & 1U);
    return x;
  }
  const WalkCountMatrix walks =
      random_walk_counts(g, spec.walk_trials, 2, derive_seed(spec.seed, "synth-walks"));
  NormalSampler normal;
  if (spec.features_lp == LinkFeatures::Global) {
    x.data = truncated_svd(walks.counts, f, derive_seed(spec.seed, "synth-svd")).left;
    const double sd = spec.feature_noise / std::sqrt(static_cast<double>(n));
    for (Index j = 0; j < f; ++j)
      for (Index i = 0; i < n; ++i) x.data(i, j) += sd * normal(rng);
    return x;
  }
  const int c = spec.num_classes;
  const Index slice = f / c;
  x.data = Matrix::Zero(n, f);
  for (int k = 0; k < c; ++k) {
    std::vector<NodeId> rows;
    for (NodeId i = 0; i < n; ++i)
      if (labels[static_cast<std::size_t>(i)] == k) rows.push_back(i);
    if (rows.empty()) continue;
    const Matrix sub = detail::rows_of(walks.counts, rows);
    const Matrix u = truncated_svd(sub, slice, derive_seed(spec.seed, "synth-svd", static_cast<std::uint64_t>(k))).left;
    for (std::size_t r = 0; r < rows.size(); ++r)
      x.data.row(rows[r]).segment(k * slice, slice) = u.row(static_cast<Index>(r));
  }
  const double sd = spec.feature_noise / std::sqrt(static_cast<double>(n) / c);
  for (Index j = 0; j < f; ++j)
    for (Index i = 0; i < n; ++i) x.data(i, j) += sd * normal(rng);
  return x;
}

/// Node-classification features. Useful: a standard-normal center per class
/// plus class_noise * N(0, I) per node. Random: Bernoulli(0.5).
inline FeatureMatrix gen_features_nc(const SynthSpec& spec, std::span<const int> labels) {
  spec.validate();
  const auto n = static_cast<Index>(labels.size());
  const Index f = spec.num_features;
  Rng rng = make_rng(spec.seed, "synth-features-nc");
  FeatureMatrix x;
  x.data.resize(n, f);
  if (spec.features_nc == NodeFeatures::Random) {
    for (Index j = 0; j < f; ++j)
      for (Index i = 0; i < n; ++i) x.data(i, j) = static_cast<double>(rng() & 1U);
    return x;
  }
  const Matrix centers = gaussian_matrix(spec.num_classes, f, rng);
  NormalSampler normal;
  for (Index i = 0; i < n; ++i) {
    const int k = labels[static_cast<std::size_t>(i)];
    if (k < 0 || k >= spec.num_classes) throw InputError("label out of range");
    for (Index j = 0; j < f; ++j) x.data(i, j) = centers(k, j) + spec.class_noise * normal(rng);
  }
  return x;
}

inline SynthDataset generate(const SynthSpec& spec) {
  SynthGraph sg = gen_structure(spec);
  SynthDataset d;
  d.spec = spec;
  d.features = spec.task == Task::LinkPrediction ? gen_features_lp(spec, sg.graph, sg.labels)
                                                 : gen_features_nc(spec, sg.labels);
  d.graph = std::move(sg.graph);
  d.labels = std::move(sg.labels);
  return d;
}

/// Link prediction: {random, global, local} x {diagonal, off-diagonal}.
/// Node classification: useful features on uniform structure, and
/// {random, useful} features x {homophily, heterophily} structure, on a
/// denser and noisier graph than link prediction.
inline std::vector<SynthSpec> scenario_suite(Task task, std::uint64_t seed = 0) {
  std::vector<SynthSpec> out;
  if (task == Task::LinkPrediction) {
    for (LinkFeatures f : {LinkFeatures::Random, LinkFeatures::Global, LinkFeatures::Local}) {
      for (Structure s : {Structure::Diagonal, Structure::OffDiagonal}) {
        SynthSpec sp;
        sp.task = task;
        sp.features_lp = f;
        sp.structure = s;
        sp.name = "lp_" + std::string(link_features_name(f)) + "_" + std::string(structure_name(s));
        out.push_back(sp);
      }
    }
  } else {
    const std::pair<NodeFeatures, Structure> combos[] = {
        {NodeFeatures::Useful, Structure::Uniform},
        {NodeFeatures::Random, Structure::Diagonal},
        {NodeFeatures::Random, Structure::OffDiagonal},
        {NodeFeatures::Useful, Structure::Diagonal},
        {NodeFeatures::Useful, Structure::OffDiagonal},
    };
    for (auto [f, s] : combos) {
      SynthSpec sp;
      sp.task = task;
      sp.features_nc = f;
      sp.structure = s;
      sp.target_density = 20.0;
      sp.noise_rate = 0.32;
      sp.name = "nc_" + std::string(node_features_name(f)) + "_" + std::string(structure_name(s));
      out.push_back(sp);
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i].seed = derive_seed(seed, out[i].name);
  return out;
}

}  // namespace netinfof
