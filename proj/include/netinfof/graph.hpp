#pragma once

// Undirected graph storage (CSR), adjacency normalizations, 2-core pruning,
// negative sampling and train/valid/test edge splits.

#include "netinfof/core.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <span>
#include <unordered_map>
#include <unordered_set>

namespace netinfof {

/// Symmetric, loop-free, unweighted graph in compressed sparse row form.
/// Column indices are sorted within each row.
class SparseGraph {
 public:
  SparseGraph() = default;

  NodeId num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_edges() const noexcept { return col_indices_.size() / 2; }

  std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const NodeId> col_indices() const noexcept { return col_indices_; }
  /// All 1.0; kept so the CSR triple is complete.
  std::span<const double> values() const noexcept { return values_; }

  std::span<const NodeId> neighbors(NodeId i) const noexcept {
    return {col_indices_.data() + row_offsets_[i],
            row_offsets_[i + 1] - row_offsets_[i]};
  }
  std::size_t degree(NodeId i) const noexcept { return row_offsets_[i + 1] - row_offsets_[i]; }

  bool has_edge(NodeId a, NodeId b) const noexcept {
    if (a < 0 || b < 0 || a >= num_nodes_ || b >= num_nodes_) return false;
    auto nb = neighbors(a);
    return std::binary_search(nb.begin(), nb.end(), b);
  }

  /// Canonical (u < v) edge list in row-major order.
  EdgeList edges() const {
    EdgeList out;
    out.reserve(num_edges());
    for (NodeId i = 0; i < num_nodes_; ++i)
      for (NodeId j : neighbors(i))
        if (i < j) out.push_back({i, j});
    return out;
  }

  /// Adjacency matrix A as an Eigen sparse matrix.
  SparseMatrix adjacency() const { return weighted([](NodeId, NodeId) { return 1.0; }); }

  template <class WeightFn>
  SparseMatrix weighted(WeightFn&& w, bool self_loops = false,
                        const std::function<double(NodeId)>& loop_weight = {}) const {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(col_indices_.size() + (self_loops ? num_nodes_ : 0));
    for (NodeId i = 0; i < num_nodes_; ++i) {
      if (self_loops) trips.emplace_back(i, i, loop_weight(i));
      for (NodeId j : neighbors(i)) trips.emplace_back(i, j, w(i, j));
    }
    SparseMatrix m(num_nodes_, num_nodes_);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
  }

  friend SparseGraph build_graph(std::span<const Edge> edges, NodeId num_nodes);

 private:
  NodeId num_nodes_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<NodeId> col_indices_;
  std::vector<double> values_;
};

/// Builds the symmetric CSR graph. Duplicates (in either orientation) and
/// self-loops are dropped. Throws InputError on out-of-range endpoints.
inline SparseGraph build_graph(std::span<const Edge> edges, NodeId num_nodes) {
  if (num_nodes < 0) throw InputError("negative node count");
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= num_nodes || e.v >= num_nodes) {
      throw InputError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                       ") out of range for " + std::to_string(num_nodes) + " nodes");
    }
    if (e.u != e.v) canon.push_back(Edge::canonical(e.u, e.v));
  }
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

  SparseGraph g;
  g.num_nodes_ = num_nodes;
  g.row_offsets_.assign(static_cast<std::size_t>(num_nodes) + 1, 0);
  for (const Edge& e : canon) {
    ++g.row_offsets_[e.u + 1];
    ++g.row_offsets_[e.v + 1];
  }
  for (NodeId i = 0; i < num_nodes; ++i) g.row_offsets_[i + 1] += g.row_offsets_[i];
  g.col_indices_.resize(canon.size() * 2);
  std::vector<std::size_t> cursor(g.row_offsets_.begin(), g.row_offsets_.end() - 1);
  for (const Edge& e : canon) {
    g.col_indices_[cursor[e.u]++] = e.v;
    g.col_indices_[cursor[e.v]++] = e.u;
  }
  for (NodeId i = 0; i < num_nodes; ++i) {
    std::sort(g.col_indices_.begin() + static_cast<std::ptrdiff_t>(g.row_offsets_[i]),
              g.col_indices_.begin() + static_cast<std::ptrdiff_t>(g.row_offsets_[i + 1]));
  }
  g.values_.assign(g.col_indices_.size(), 1.0);
  return g;
}

/// D^{-1} A. Rows of isolated nodes stay zero.
inline SparseMatrix row_normalize(const SparseGraph& g) {
  return g.weighted([&](NodeId i, NodeId) { return 1.0 / static_cast<double>(g.degree(i)); });
}

/// (D+I)^{-1/2} (A+I) (D+I)^{-1/2}.
inline SparseMatrix sym_normalize_selfloop(const SparseGraph& g) {
  auto scale = [&](NodeId i) { return 1.0 / std::sqrt(static_cast<double>(g.degree(i)) + 1.0); };
  return g.weighted([&](NodeId i, NodeId j) { return scale(i) * scale(j); }, true,
                    [&](NodeId i) { return scale(i) * scale(i); });
}

/// Edges of the 2-core: repeatedly removes nodes of degree < 2 until none are
/// left. Output keeps the input order of the surviving (canonicalized) edges.
inline EdgeList two_core(std::span<const Edge> edges) {
  std::unordered_map<NodeId, std::vector<std::size_t>> incident;
  EdgeList canon;
  canon.reserve(edges.size());
  {
    std::unordered_set<std::uint64_t> seen;
    for (const Edge& e : edges) {
      if (e.u == e.v) continue;
      Edge c = Edge::canonical(e.u, e.v);
      if (!seen.insert(c.key()).second) continue;
      incident[c.u].push_back(canon.size());
      incident[c.v].push_back(canon.size());
      canon.push_back(c);
    }
  }
  std::unordered_map<NodeId, std::size_t> degree;
  for (const auto& [node, list] : incident) degree[node] = list.size();
  std::vector<bool> removed(canon.size(), false);
  std::deque<NodeId> queue;
  for (const auto& [node, deg] : degree)
    if (deg < 2) queue.push_back(node);
  while (!queue.empty()) {
    NodeId n = queue.front();
    queue.pop_front();
    for (std::size_t ei : incident[n]) {
      if (removed[ei]) continue;
      removed[ei] = true;
      const NodeId other = canon[ei].u == n ? canon[ei].v : canon[ei].u;
      if (degree[other]-- == 2) queue.push_back(other);
    }
    degree[n] = 0;
  }
  EdgeList out;
  for (std::size_t i = 0; i < canon.size(); ++i)
    if (!removed[i]) out.push_back(canon[i]);
  return out;
}

/// Uniform sampling of node pairs u < v that are not edges of `g` and not in
/// `taken`. Accepted pairs are inserted into `taken`. With `allow_short`, a
/// request larger than the pool returns every remaining pair instead of
/// throwing ResourceError.
inline EdgeList sample_non_edges(const SparseGraph& g, std::size_t count, Rng& rng,
                                 std::unordered_set<std::uint64_t>& taken,
                                 bool allow_short = false) {
  const auto n = static_cast<std::uint64_t>(g.num_nodes());
  const std::uint64_t all_pairs = n < 2 ? 0 : n * (n - 1) / 2;
  std::uint64_t blocked = g.num_edges();
  for (std::uint64_t key : taken) {
    const Edge e{static_cast<NodeId>(key >> 32), static_cast<NodeId>(key & 0xffffffffu)};
    if (!g.has_edge(e.u, e.v)) ++blocked;
  }
  const std::uint64_t pool = all_pairs > blocked ? all_pairs - blocked : 0;
  if (count > pool) {
    if (!allow_short) {
      throw ResourceError("graph too dense: requested " + std::to_string(count) +
                          " negative pairs but only " + std::to_string(pool) + " exist");
    }
    count = pool;
  }
  EdgeList out;
  out.reserve(count);
  if (count == 0) return out;
  if (count * 4 >= pool) {
    // Dense regime: enumerate the pool and draw without replacement.
    EdgeList candidates;
    candidates.reserve(pool);
    for (NodeId a = 0; a < g.num_nodes(); ++a)
      for (NodeId b = a + 1; b < g.num_nodes(); ++b) {
        Edge e{a, b};
        if (!g.has_edge(a, b) && !taken.contains(e.key())) candidates.push_back(e);
      }
    for (std::size_t i = 0; i < count; ++i) {
      std::swap(candidates[i], candidates[i + uniform_index(rng, candidates.size() - i)]);
      out.push_back(candidates[i]);
      taken.insert(candidates[i].key());
    }
    return out;
  }
  while (out.size() < count) {
    const auto a = static_cast<NodeId>(uniform_index(rng, n));
    const auto b = static_cast<NodeId>(uniform_index(rng, n));
    if (a == b || g.has_edge(a, b)) continue;
    const Edge e = Edge::canonical(a, b);
    if (!taken.insert(e.key()).second) continue;
    out.push_back(e);
  }
  return out;
}

inline EdgeList sample_non_edges(const SparseGraph& g, std::size_t count, Rng& rng) {
  std::unordered_set<std::uint64_t> taken;
  return sample_non_edges(g, count, rng, taken);
}

struct EdgeSplitRatios {
  double train = 0.7;
  double valid = 0.1;
  double test = 0.2;
};

/// Positive edges partitioned into three sets plus sampled negatives.
struct EdgeSplit {
  EdgeList train_pos;
  EdgeList valid_pos;
  EdgeList test_pos;
  EdgeList valid_neg;
  EdgeList test_neg;
  std::uint64_t seed = 0;
};

/// Random 3-way partition of E with |neg| = |pos| for valid and test.
/// `neg_multiplier` overrides the negative-to-positive ratio.
inline EdgeSplit split_edges(const SparseGraph& g, EdgeSplitRatios ratios, std::uint64_t seed,
                             double neg_multiplier = 1.0) {
  const double total = ratios.train + ratios.valid + ratios.test;
  if (std::abs(total - 1.0) > 1e-9 || ratios.train < 0 || ratios.valid < 0 || ratios.test < 0) {
    throw InputError("split ratios must be non-negative and sum to 1");
  }
  Rng rng = make_rng(seed, "split");
  EdgeList all = g.edges();
  shuffle(all, rng);
  const std::size_t m = all.size();
  const auto n_valid = static_cast<std::size_t>(std::llround(ratios.valid * static_cast<double>(m)));
  const auto n_test = std::min(m - n_valid,
                               static_cast<std::size_t>(std::llround(ratios.test * static_cast<double>(m))));
  EdgeSplit s;
  s.seed = seed;
  s.valid_pos.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_valid));
  s.test_pos.assign(all.begin() + static_cast<std::ptrdiff_t>(n_valid),
                    all.begin() + static_cast<std::ptrdiff_t>(n_valid + n_test));
  s.train_pos.assign(all.begin() + static_cast<std::ptrdiff_t>(n_valid + n_test), all.end());

  std::unordered_set<std::uint64_t> taken;
  Rng neg_rng = make_rng(seed, "split-negatives");
  auto n_neg = [&](std::size_t pos) {
    return static_cast<std::size_t>(std::llround(neg_multiplier * static_cast<double>(pos)));
  };
  s.valid_neg = sample_non_edges(g, n_neg(n_valid), neg_rng, taken);
  s.test_neg = sample_non_edges(g, n_neg(n_test), neg_rng, taken);
  return s;
}

/// Node-level split used for node classification (default 2.5/2.5/95).
struct NodeSplit {
  std::vector<NodeId> train;
  std::vector<NodeId> valid;
  std::vector<NodeId> test;
};

inline NodeSplit split_nodes(NodeId num_nodes, double train_ratio, double valid_ratio,
                             std::uint64_t seed) {
  if (train_ratio < 0 || valid_ratio < 0 || train_ratio + valid_ratio > 1.0 + 1e-12) {
    throw InputError("invalid node split ratios");
  }
  std::vector<NodeId> ids(static_cast<std::size_t>(num_nodes));
  for (NodeId i = 0; i < num_nodes; ++i) ids[i] = i;
  Rng rng = make_rng(seed, "node-split");
  shuffle(ids, rng);
  const auto n = static_cast<double>(num_nodes);
  const auto n_train = static_cast<std::size_t>(std::llround(train_ratio * n));
  const auto n_valid = static_cast<std::size_t>(std::llround(valid_ratio * n));
  NodeSplit s;
  s.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.valid.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train),
                 ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid));
  s.test.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid), ids.end());
  return s;
}

}  // namespace netinfof
