#include <algorithm>

#include <gtest/gtest.h>

#include "qamp/qamp.hpp"

using namespace qamp;

namespace {

Graph random_graph(Rng& rng, int n, int max_deg) {
  Graph g(n);
  const int attempts = rng.range(0, n * max_deg);
  for (int a = 0; a < attempts; ++a) {
    const int u = rng.range(0, n - 1), v = rng.range(0, n - 1);
    if (u == v || g.has_edge(u, v)) continue;
    if (static_cast<int>(g.adj[u].size()) >= max_deg || static_cast<int>(g.adj[v].size()) >= max_deg) continue;
    g.add_edge(u, v);
  }
  return g;
}

// Every g-colouring of a small graph, to decide equitable feasibility exactly.
bool equitable_exists(const Graph& graph, int g) {
  const int n = graph.size();
  std::vector<int> c(n, 0);
  for (;;) {
    Coloring col{g, c};
    if (is_proper(graph, col) && is_equitable(col)) return true;
    int i = 0;
    while (i < n && ++c[i] == g) c[i++] = 0;
    if (i == n) return false;
  }
}

}  // namespace

TEST(ConstraintGraph, SpecExamples) {
  EXPECT_EQ(constraint_graph(std::vector<std::vector<int>>{{0}, {1}, {2}}).edge_count(), 0u);
  const Graph path = constraint_graph(std::vector<std::vector<int>>{{0, 1}, {1, 2}, {2, 3}});
  EXPECT_EQ(path.edge_count(), 2u);
  EXPECT_TRUE(path.has_edge(0, 1));
  EXPECT_TRUE(path.has_edge(1, 2));
  EXPECT_FALSE(path.has_edge(0, 2));
}

TEST(ConstraintGraph, BoundedOverlapDegree) {
  // 5-local terms where every qubit appears in at most 7 terms.
  Rng rng(3);
  const int n = 30;
  std::vector<std::vector<int>> supports;
  std::vector<int> load(n, 0);
  for (int attempt = 0; attempt < 400; ++attempt) {
    std::vector<int> q(n);
    for (int i = 0; i < n; ++i) q[i] = i;
    rng.shuffle(q);
    q.resize(5);
    bool ok = true;
    for (int x : q) ok = ok && load[x] < 7;
    if (!ok) continue;
    for (int x : q) ++load[x];
    std::sort(q.begin(), q.end());
    supports.push_back(q);
  }
  EXPECT_LE(constraint_graph(supports).max_degree(), 34);
}

TEST(EquitableColor, SpecExamples) {
  Graph tri(3);
  tri.add_edge(0, 1);
  tri.add_edge(1, 2);
  tri.add_edge(0, 2);
  const auto c3 = equitable_color(tri, 3);
  EXPECT_EQ(c3.class_sizes(), (std::vector<int>{1, 1, 1}));

  Graph path(3);
  path.add_edge(0, 1);
  path.add_edge(1, 2);
  ASSERT_TRUE(equitable_exists(path, 2));
  auto sizes = equitable_color(path, 2).class_sizes();
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<int>{1, 2}));

  const auto c1 = equitable_color(Graph(4), 1);
  EXPECT_EQ(c1.class_sizes(), (std::vector<int>{4}));
}

TEST(EquitableColor, InfeasibleSuggestsMoreColours) {
  Graph tri(3);
  tri.add_edge(0, 1);
  tri.add_edge(1, 2);
  tri.add_edge(0, 2);
  try {
    equitable_color(tri, 2);
    FAIL() << "expected infeasibility";
  } catch (const InfeasibleColoring& e) {
    EXPECT_NE(std::string(e.what()).find("g=3"), std::string::npos) << e.what();
  }
}

TEST(EquitableColor, Deterministic) {
  Rng rng(8);
  const Graph g = random_graph(rng, 15, 5);
  EXPECT_EQ(equitable_color(g).color, equitable_color(g).color);
}

TEST(EquitableColor, RandomGraphsProperEquitableWithinDegreePlusOne) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.range(1, 20);
    const Graph g = random_graph(rng, n, rng.range(0, 10));
    const auto c = equitable_color(g);
    EXPECT_LE(c.g, g.max_degree() + 1);
    EXPECT_TRUE(is_proper(g, c)) << "trial " << trial;
    EXPECT_TRUE(is_equitable(c)) << "trial " << trial;
  }
}

TEST(EquitableColor, SmallGraphsMatchExhaustiveFeasibility) {
  Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = rng.range(2, 7);
    const Graph g = random_graph(rng, n, 3);
    for (int k = 2; k <= 3; ++k) {
      const bool exists = equitable_exists(g, k);
      if (exists) {
        const auto c = equitable_color(g, k);
        EXPECT_TRUE(is_proper(g, c) && is_equitable(c));
      } else {
        EXPECT_THROW(equitable_color(g, k), InfeasibleColoring);
      }
    }
  }
}

TEST(EquitableColor, InducedLayersCommute) {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.range(2, 5);
    std::vector<LocalProjector> terms;
    for (int i = 0, m = rng.range(2, 6); i < m; ++i) {
      const int k = rng.range(1, std::min(2, n));
      std::vector<int> q(n);
      for (int x = 0; x < n; ++x) q[x] = x;
      rng.shuffle(q);
      q.resize(k);
      std::sort(q.begin(), q.end());
      terms.emplace_back(q, random_projector(k, 1, rng));
    }
    EXPECT_NO_THROW(build_layered(n, terms));
  }
}
