#pragma once

// The five derived node-embedding components:
//   U  structure      left singular vectors of A
//   R  neighborhood   left singular vectors of pruned random-walk visit counts
//   F  features       PCA(X)
//   P  propagation    PCA(l(A_row^k X)), no self-loops
//   S  propagation    PCA(l(Asym~^k X)), with self-loops

#include "netinfof/graph.hpp"
#include "netinfof/linalg.hpp"

#include <chrono>
#include <map>
#include <string>

namespace netinfof {

/// Dense node-feature table X (num_nodes x num_features).
struct FeatureMatrix {
  Matrix data;

  Index num_nodes() const noexcept { return data.rows(); }
  Index num_features() const noexcept { return data.cols(); }

  void validate(NodeId expected_nodes) const {
    if (data.rows() != expected_nodes) {
      throw InputError("feature rows (" + std::to_string(data.rows()) +
                       ") do not match node count (" + std::to_string(expected_nodes) + ")");
    }
    if (!data.allFinite()) throw InputError("feature matrix contains non-finite values");
  }
};

enum class CountMode {
  AllSteps,  // every node visited at steps 1..k
  Endpoint,  // only the node reached at step k
};

struct WalkCountMatrix {
  SparseMatrix counts;  // entries >= 2 after pruning
  int trials = 0;
  int steps = 0;
};

/// T walks of k uniform-neighbor steps from every node. Counts visits per
/// (start, visited) pair, then drops pairs seen exactly once.
inline WalkCountMatrix random_walk_counts(const SparseGraph& g, int trials, int steps,
                                          std::uint64_t seed,
                                          CountMode mode = CountMode::AllSteps,
                                          bool count_start = false) {
  if (trials < 1 || steps < 1) throw InputError("random walks need trials >= 1 and steps >= 1");
  const NodeId n = g.num_nodes();
  std::vector<Eigen::Triplet<double>> trips;
  std::vector<std::int64_t> visits(static_cast<std::size_t>(n), 0);
  std::vector<NodeId> touched;
  for (NodeId start = 0; start < n; ++start) {
    if (g.degree(start) == 0) continue;
    Rng rng(derive_seed(seed, "walks", static_cast<std::uint64_t>(start)));
    auto visit = [&](NodeId v) {
      if (visits[v]++ == 0) touched.push_back(v);
    };
    if (count_start) visits[start] += trials, touched.push_back(start);
    for (int t = 0; t < trials; ++t) {
      NodeId cur = start;
      for (int s = 1; s <= steps; ++s) {
        auto nb = g.neighbors(cur);
        cur = nb[uniform_index(rng, nb.size())];
        if (mode == CountMode::AllSteps || s == steps) visit(cur);
      }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (NodeId v : touched) {
      if (visits[v] >= 2) trips.emplace_back(start, v, static_cast<double>(visits[v]));
      visits[v] = 0;
    }
    touched.clear();
  }
  WalkCountMatrix out;
  out.counts.resize(n, n);
  out.counts.setFromTriplets(trips.begin(), trips.end());
  out.counts.makeCompressed();
  out.trials = trials;
  out.steps = steps;
  return out;
}

struct EmbedConfig {
  Index dim = 128;
  int walk_trials = 1000;
  int walk_steps = 2;  // k_PPR
  int row_steps = 2;   // k_row, even
  int sym_steps = 2;   // k_sym
  CountMode count_mode = CountMode::AllSteps;
  bool count_start = false;
  std::uint64_t seed = 0;
};

inline Matrix structure_embedding(const SparseGraph& g, Index d, std::uint64_t seed) {
  return truncated_svd(g.adjacency(), d, derive_seed(seed, "svd-U")).left;
}

inline Matrix neighborhood_embedding(const SparseGraph& g, Index d, int trials, int steps,
                                     std::uint64_t seed, CountMode mode = CountMode::AllSteps,
                                     bool count_start = false) {
  const WalkCountMatrix w = random_walk_counts(g, trials, steps, seed, mode, count_start);
  return truncated_svd(w.counts, d, derive_seed(seed, "svd-R")).left;
}

inline Matrix feature_embedding(const FeatureMatrix& x, Index d, std::uint64_t seed) {
  return pca(x.data, d, derive_seed(seed, "pca-F")).scores;
}

/// A_row^k X by repeated sparse-dense products, column-normalized, then PCA.
inline Matrix propagated_no_selfloop_features(const SparseGraph& g, const Matrix& x, int steps) {
  if (steps < 1 || steps % 2 != 0) throw InputError("k_row must be a positive even number");
  const SparseMatrix a_row = row_normalize(g);
  Matrix h = x;
  for (int s = 0; s < steps; ++s) h = a_row * h;
  return h;
}

inline Matrix propagate_no_selfloop(const SparseGraph& g, const FeatureMatrix& x, Index d,
                                    std::uint64_t seed, int steps = 2) {
  return pca(l2_normalize_columns(propagated_no_selfloop_features(g, x.data, steps)), d,
             derive_seed(seed, "pca-P"))
      .scores;
}

inline Matrix propagated_selfloop_features(const SparseGraph& g, const Matrix& x, int steps) {
  if (steps < 1) throw InputError("k_sym must be >= 1");
  const SparseMatrix a_sym = sym_normalize_selfloop(g);
  Matrix h = x;
  for (int s = 0; s < steps; ++s) h = a_sym * h;
  return h;
}

inline Matrix propagate_selfloop(const SparseGraph& g, const FeatureMatrix& x, Index d,
                                 int steps, std::uint64_t seed) {
  return pca(l2_normalize_columns(propagated_selfloop_features(g, x.data, steps)), d,
             derive_seed(seed, "pca-S"))
      .scores;
}

/// The five components plus the parameters that produced them.
struct EmbeddingSet {
  Index dim = 0;
  std::array<Matrix, kNumComponents> blocks;
  std::map<std::string, std::string> provenance;
  std::map<std::string, double> timings;  // seconds per component

  const Matrix& operator[](Component c) const { return blocks[static_cast<int>(c)]; }
  Matrix& operator[](Component c) { return blocks[static_cast<int>(c)]; }
  Index num_nodes() const { return blocks[0].rows(); }
};

inline EmbeddingSet compute_embeddings(const SparseGraph& g, const FeatureMatrix& x,
                                       const EmbedConfig& cfg) {
  x.validate(g.num_nodes());
  EmbeddingSet e;
  e.dim = cfg.dim;
  using clock = std::chrono::steady_clock;
  auto timed = [&](Component c, auto&& fn) {
    const auto t0 = clock::now();
    e[c] = fn();
    e.timings[std::string(component_name(c))] =
        std::chrono::duration<double>(clock::now() - t0).count();
  };
  bool u_padded = false;
  bool r_padded = false;
  timed(Component::U, [&] {
    SvdResult svd = truncated_svd(g.adjacency(), cfg.dim, derive_seed(cfg.seed, "svd-U"));
    u_padded = svd.padded;
    return std::move(svd.left);
  });
  timed(Component::R, [&] {
    const std::uint64_t walk_seed = derive_seed(cfg.seed, "walks");
    const WalkCountMatrix w = random_walk_counts(g, cfg.walk_trials, cfg.walk_steps, walk_seed,
                                                 cfg.count_mode, cfg.count_start);
    SvdResult svd = truncated_svd(w.counts, cfg.dim, derive_seed(walk_seed, "svd-R"));
    r_padded = svd.padded;
    return std::move(svd.left);
  });
  timed(Component::F, [&] { return feature_embedding(x, cfg.dim, cfg.seed); });
  timed(Component::P, [&] { return propagate_no_selfloop(g, x, cfg.dim, cfg.seed, cfg.row_steps); });
  timed(Component::S, [&] { return propagate_selfloop(g, x, cfg.dim, cfg.sym_steps, cfg.seed); });
  e.provenance = {
      {"dim", std::to_string(cfg.dim)},
      {"walk_trials", std::to_string(cfg.walk_trials)},
      {"k_ppr", std::to_string(cfg.walk_steps)},
      {"k_row", std::to_string(cfg.row_steps)},
      {"k_sym", std::to_string(cfg.sym_steps)},
      {"count_mode", cfg.count_mode == CountMode::AllSteps ? "all_steps" : "endpoint"},
      {"count_start", cfg.count_start ? "true" : "false"},
      {"seed", std::to_string(cfg.seed)},
      {"U_padded", u_padded ? "true" : "false"},
      {"R_padded", r_padded ? "true" : "false"},
  };
  return e;
}

}  // namespace netinfof
