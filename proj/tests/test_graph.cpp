#include "netinfof/graph.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace netinfof;

namespace {

SparseGraph triangle() { return build_graph(EdgeList{{0, 1}, {1, 2}, {0, 2}}, 3); }
SparseGraph path3() { return build_graph(EdgeList{{0, 1}, {1, 2}}, 3); }

std::vector<std::size_t> degrees(const SparseGraph& g) {
  std::vector<std::size_t> d;
  for (NodeId i = 0; i < g.num_nodes(); ++i) d.push_back(g.degree(i));
  return d;
}

SparseGraph random_graph(NodeId n, double p, std::uint64_t seed) {
  Rng rng(seed);
  EdgeList e;
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b)
      if (uniform_unit(rng) < p) e.push_back({a, b});
  return build_graph(e, n);
}

}  // namespace

TEST(BuildGraph, DropsDuplicatesAndSelfLoops) {
  const SparseGraph g = build_graph(EdgeList{{0, 1}, {1, 0}, {1, 1}}, 2);
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_TRUE(g.has_edge(1, 0));
  EXPECT_FALSE(g.has_edge(1, 1));
}

TEST(BuildGraph, Degrees) {
  EXPECT_EQ(degrees(triangle()), (std::vector<std::size_t>{2, 2, 2}));
  EXPECT_EQ(degrees(path3()), (std::vector<std::size_t>{1, 2, 1}));
}

TEST(BuildGraph, OutOfRangeThrows) {
  EXPECT_THROW(build_graph(EdgeList{{0, 3}}, 3), InputError);
  EXPECT_THROW(build_graph(EdgeList{{-1, 0}}, 3), InputError);
}

TEST(BuildGraph, CsrInvariants) {
  const SparseGraph g = random_graph(60, 0.1, 7);
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    auto nb = g.neighbors(i);
    EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
    EXPECT_EQ(std::adjacent_find(nb.begin(), nb.end()), nb.end());
    for (NodeId j : nb) {
      EXPECT_NE(i, j);
      EXPECT_TRUE(g.has_edge(j, i));
    }
  }
  for (double v : g.values()) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(g.row_offsets().size(), static_cast<std::size_t>(g.num_nodes()) + 1);
}

TEST(RowNormalize, Examples) {
  const Matrix p = Matrix(row_normalize(path3()));
  EXPECT_EQ(p.row(1), Eigen::RowVector3d(0.5, 0.0, 0.5));
  const Matrix e = Matrix(row_normalize(build_graph(EdgeList{{0, 1}}, 2)));
  EXPECT_EQ(e, (Matrix(2, 2) << 0, 1, 1, 0).finished());
  const Matrix t = Matrix(row_normalize(triangle()));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(t(i, j), i == j ? 0.0 : 0.5);
}

TEST(RowNormalize, RowsSumToOneIsolatedRowsZero) {
  EdgeList e = random_graph(80, 0.05, 11).edges();
  const SparseGraph g = build_graph(e, 90);  // nodes 80..89 isolated
  const Matrix a = Matrix(row_normalize(g));
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (g.degree(i) == 0) EXPECT_EQ(a.row(i).squaredNorm(), 0.0);
    else EXPECT_NEAR(a.row(i).sum(), 1.0, 1e-12);
  }
}

TEST(SymNormalize, Examples) {
  const Matrix e = Matrix(sym_normalize_selfloop(build_graph(EdgeList{{0, 1}}, 2)));
  EXPECT_TRUE(e.isApprox(Matrix::Constant(2, 2, 0.5), 1e-15));
  const Matrix iso = Matrix(sym_normalize_selfloop(build_graph(EdgeList{}, 1)));
  EXPECT_DOUBLE_EQ(iso(0, 0), 1.0);
  const Matrix t = Matrix(sym_normalize_selfloop(triangle()));
  EXPECT_TRUE(t.isApprox(Matrix::Constant(3, 3, 1.0 / 3.0), 1e-15));
}

TEST(SymNormalize, SymmetricAndMatchesFormula) {
  const SparseGraph g = random_graph(50, 0.1, 3);
  const Matrix s = Matrix(sym_normalize_selfloop(g));
  EXPECT_EQ(s, s.transpose());
  for (NodeId i = 0; i < g.num_nodes(); ++i)
    for (NodeId j = 0; j < g.num_nodes(); ++j) {
      const double a = (i == j || g.has_edge(i, j)) ? 1.0 : 0.0;
      const double want = a / std::sqrt((g.degree(i) + 1.0) * (g.degree(j) + 1.0));
      EXPECT_NEAR(s(i, j), want, 1e-15);
    }
}

TEST(TwoCore, Examples) {
  const EdgeList tri{{0, 1}, {1, 2}, {0, 2}};
  EXPECT_EQ(two_core(tri), tri);
  EXPECT_TRUE(two_core(EdgeList{{0, 1}, {0, 2}, {0, 3}, {0, 4}}).empty());
  EdgeList with_pendant = tri;
  with_pendant.push_back({2, 3});
  EXPECT_EQ(two_core(with_pendant), tri);
}

TEST(TwoCore, IdempotentAndMinDegreeTwo) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const EdgeList e = random_graph(60, 0.04, seed).edges();
    const EdgeList core = two_core(e);
    EXPECT_EQ(two_core(core), core);
    std::map<NodeId, int> deg;
    for (const Edge& x : core) ++deg[x.u], ++deg[x.v];
    for (const auto& [n, d] : deg) EXPECT_GE(d, 2);
  }
}

TEST(TwoCore, MaximalAgainstBruteForcePruning) {
  // Oracle: dense adjacency, repeatedly delete any node of degree 1.
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    const NodeId n = 40;
    const SparseGraph g = random_graph(n, 0.05, seed);
    std::vector<std::vector<int>> adj(n, std::vector<int>(n, 0));
    for (const Edge& e : g.edges()) adj[e.u][e.v] = adj[e.v][e.u] = 1;
    bool changed = true;
    while (changed) {
      changed = false;
      for (int i = 0; i < n; ++i) {
        int d = 0;
        for (int j = 0; j < n; ++j) d += adj[i][j];
        if (d == 1) {
          for (int j = 0; j < n; ++j) adj[i][j] = adj[j][i] = 0;
          changed = true;
        }
      }
    }
    std::set<Edge> want;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (adj[i][j]) want.insert({i, j});
    const EdgeList core = two_core(g.edges());
    EXPECT_EQ(std::set<Edge>(core.begin(), core.end()), want);
  }
}

TEST(SplitEdges, AllTrain) {
  const EdgeSplit s = split_edges(triangle(), {1.0, 0.0, 0.0}, 1);
  EXPECT_EQ(s.train_pos.size(), 3u);
  EXPECT_TRUE(s.valid_neg.empty());
  EXPECT_TRUE(s.test_neg.empty());
}

TEST(SplitEdges, SizesForTenEdges) {
  EdgeList e;
  for (NodeId i = 0; i < 10; ++i) e.push_back({i, static_cast<NodeId>(i + 1)});
  const SparseGraph g = build_graph(e, 11);
  const EdgeSplit s = split_edges(g, {0.7, 0.1, 0.2}, 5);
  EXPECT_EQ(s.train_pos.size(), 7u);
  EXPECT_EQ(s.valid_pos.size(), 1u);
  EXPECT_EQ(s.test_pos.size(), 2u);
  EXPECT_EQ(s.valid_neg.size(), 1u);
  EXPECT_EQ(s.test_neg.size(), 2u);
}

TEST(SplitEdges, DeterministicPartitionAndNegatives) {
  const SparseGraph g = random_graph(100, 0.08, 42);
  const EdgeSplit a = split_edges(g, {}, 9);
  const EdgeSplit b = split_edges(g, {}, 9);
  EXPECT_EQ(a.train_pos, b.train_pos);
  EXPECT_EQ(a.test_neg, b.test_neg);
  std::set<Edge> all;
  for (const auto* part : {&a.train_pos, &a.valid_pos, &a.test_pos})
    for (const Edge& e : *part) EXPECT_TRUE(all.insert(e).second);
  const EdgeList edges = g.edges();
  EXPECT_EQ(all, std::set<Edge>(edges.begin(), edges.end()));
  std::set<Edge> negs;
  for (const auto* part : {&a.valid_neg, &a.test_neg})
    for (const Edge& e : *part) {
      EXPECT_LT(e.u, e.v);
      EXPECT_FALSE(g.has_edge(e.u, e.v));
      EXPECT_TRUE(negs.insert(e).second);
    }
  EXPECT_EQ(a.valid_neg.size(), a.valid_pos.size());
  EXPECT_EQ(a.test_neg.size(), a.test_pos.size());
}

TEST(SplitEdges, TooDenseThrows) {
  EdgeList e;
  for (NodeId a = 0; a < 6; ++a)
    for (NodeId b = a + 1; b < 6; ++b)
      if (!(a == 0 && b == 1)) e.push_back({a, b});
  const SparseGraph g = build_graph(e, 6);  // one non-edge left
  EXPECT_THROW(split_edges(g, {0.4, 0.3, 0.3}, 1), ResourceError);
}

TEST(SplitEdges, RatiosMustSumToOne) {
  EXPECT_THROW(split_edges(triangle(), {0.5, 0.1, 0.1}, 1), InputError);
}

TEST(SplitNodes, PartitionsAllNodes) {
  const NodeSplit s = split_nodes(400, 0.025, 0.025, 3);
  EXPECT_EQ(s.train.size(), 10u);
  EXPECT_EQ(s.valid.size(), 10u);
  EXPECT_EQ(s.test.size(), 380u);
  std::set<NodeId> all(s.train.begin(), s.train.end());
  all.insert(s.valid.begin(), s.valid.end());
  all.insert(s.test.begin(), s.test.end());
  EXPECT_EQ(all.size(), 400u);
}

TEST(SampleNonEdges, ExhaustsWhenAllowed) {
  Rng rng(1);
  std::unordered_set<std::uint64_t> taken;
  EXPECT_TRUE(sample_non_edges(triangle(), 6, rng, taken, true).empty());
  EXPECT_THROW(sample_non_edges(triangle(), 1, rng), ResourceError);
}
