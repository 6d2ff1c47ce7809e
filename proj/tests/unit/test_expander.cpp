#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qamp/qamp.hpp"

using namespace qamp;

namespace {

double dense_mu(const ExpanderGraph& g) {
  RealMatrix a = RealMatrix::Zero(g.m, g.m);
  for (int v = 0; v < g.m; ++v)
    for (int p = 0; p < g.d; ++p) a(v, g.rotation[v * g.d + p].vertex) += 1.0;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(a / g.d);
  double mu = 0.0;
  for (Eigen::Index k = 0; k + 1 < es.eigenvalues().size(); ++k) mu = std::max(mu, std::abs(es.eigenvalues()[k]));
  return mu;
}

}  // namespace

TEST(Graphs, SpecSpectra) {
  const auto loops = build_graph(4, GraphFamily::CompleteWithLoops);
  EXPECT_EQ(loops.d, 4);
  EXPECT_NEAR(loops.mu, 0.0, 1e-12);
  const auto k4 = build_graph(4, GraphFamily::Complete);
  EXPECT_EQ(k4.d, 3);
  EXPECT_NEAR(k4.mu, 1.0 / 3.0, 1e-12);
  const auto c8 = build_graph(8, GraphFamily::Cycle);
  EXPECT_EQ(c8.d, 2);
  EXPECT_NEAR(c8.lambda2, std::cos(std::numbers::pi / 4), 1e-12);
  // An even cycle is bipartite: -1 is an eigenvalue.
  EXPECT_NEAR(c8.mu, 1.0, 1e-12);
  EXPECT_FALSE(c8.is_expander());
  EXPECT_TRUE(build_graph(7, GraphFamily::Cycle).is_expander());
}

TEST(Graphs, RotationInvolutionAndCertifiedMu) {
  for (auto fam : {GraphFamily::CompleteWithLoops, GraphFamily::Complete, GraphFamily::Cycle, GraphFamily::ChordalCycle})
    for (int m = family_min_vertices(fam); m <= 40; m += 3) {
      const auto g = build_graph(m, fam);
      EXPECT_NO_THROW(validate_rotation(g.m, g.d, g.rotation));
      const auto a = g.adjacency_counts();
      for (int u = 0; u < m; ++u) {
        std::uint64_t deg = 0;
        for (int v = 0; v < m; ++v) {
          EXPECT_EQ(a[u][v], a[v][u]);
          deg += a[u][v];
        }
        EXPECT_EQ(deg, static_cast<std::uint64_t>(g.d));
      }
      EXPECT_NEAR(g.mu, dense_mu(g), 1e-10) << family_name(fam) << " m=" << m;
    }
}

TEST(Graphs, CustomRotationValidated) {
  EXPECT_THROW(make_custom_graph(2, 1, {{1, 0}, {1, 0}}), StructuralError);
  const auto g = make_custom_graph(2, 2, {{1, 0}, {0, 1}, {0, 0}, {1, 1}});
  EXPECT_EQ(g.m, 2);
}

TEST(Walks, Counts) {
  EXPECT_EQ(enumerate_walks(build_graph(4, GraphFamily::Complete), 2).size(), 12u);
  const auto single = build_graph(1, GraphFamily::CompleteWithLoops);
  const auto w = enumerate_walks(single, 4);
  EXPECT_EQ(w.size(), std::uint64_t(std::pow(single.d, 3)));
  w.for_each([](std::uint64_t, const std::vector<int>& f) {
    for (int v : f) EXPECT_EQ(v, 0);
  });
  // Single edge plus a self-loop at each end.
  const auto edge = make_custom_graph(2, 2, {{1, 0}, {0, 1}, {0, 0}, {1, 1}});
  const auto we = enumerate_walks(edge, 3);
  EXPECT_EQ(we.size(), 8u);
  we.for_each([&](std::uint64_t, const std::vector<int>& f) {
    for (std::size_t i = 1; i < f.size(); ++i) EXPECT_GT(edge.adjacency_counts()[f[i - 1]][f[i]], 0u);
  });
}

TEST(Walks, IndexingIsBijectiveAndMatchesNestedEnumeration) {
  for (auto fam : {GraphFamily::Complete, GraphFamily::Cycle, GraphFamily::ChordalCycle}) {
    const auto g = build_graph(6, fam);
    const auto fam_walks = enumerate_walks(g, 4);
    const auto ref = oracle::walks(g, 4);
    ASSERT_EQ(fam_walks.size(), ref.size());
    for (std::uint64_t i = 0; i < fam_walks.size(); ++i) EXPECT_EQ(fam_walks.walk(i), ref[i]);
  }
}

TEST(Walks, OverflowIsAnError) { EXPECT_THROW(enumerate_walks(build_graph(16, GraphFamily::CompleteWithLoops), 17), EnumerationError); }

TEST(QuadraticForm, SpecExamples) {
  const auto k4 = build_graph(4, GraphFamily::Complete);
  const auto ones = check_quadratic_form(k4, RealVector::Ones(4), RealVector::Ones(4), 3);
  EXPECT_NEAR(ones.lhs, 4.0, 1e-12);
  EXPECT_NEAR(ones.rhs, 4.0 + 8.0 * std::pow(1.0 / 3.0, 3), 1e-12);
  EXPECT_TRUE(ones.ok);
  const auto zeros = check_quadratic_form(k4, RealVector::Zero(4), RealVector::Zero(4), 2);
  EXPECT_EQ(zeros.lhs, 0.0);
  EXPECT_EQ(zeros.rhs, 0.0);
  RealVector e1 = RealVector::Zero(4), e2 = RealVector::Zero(4);
  e1[0] = 1.0;
  e2[1] = 1.0;
  const auto c = check_quadratic_form(k4, e1, e2, 1);
  EXPECT_NEAR(c.lhs, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(c.rhs, 0.25 + 2.0 / 3.0, 1e-12);
  EXPECT_TRUE(c.ok);
  EXPECT_THROW(check_quadratic_form(k4, 2.0 * e1, e2, 1), DomainError);
}

TEST(QuadraticForm, HoldsOnRandomTriples) {
  Rng rng(1);
  for (auto fam : {GraphFamily::CompleteWithLoops, GraphFamily::Complete, GraphFamily::Cycle, GraphFamily::ChordalCycle})
    for (int m : {5, 9, 16}) {
      const auto g = build_graph(m, fam);
      const RealMatrix p = g.transition();
      for (int trial = 0; trial < 1000; ++trial) {
        RealVector a(m), b(m);
        for (int i = 0; i < m; ++i) {
          a[i] = rng.coin(0.3) ? static_cast<double>(rng.below(2)) : rng.uniform();
          b[i] = rng.coin(0.3) ? static_cast<double>(rng.below(2)) : rng.uniform();
        }
        const int steps = rng.range(1, 6);
        const auto c = check_quadratic_form(g, a, b, steps);
        RealMatrix pk = RealMatrix::Identity(m, m);
        for (int s = 0; s < steps; ++s) pk = pk * p;
        EXPECT_NEAR(c.lhs, a.dot(pk * b), 1e-12);
        EXPECT_TRUE(c.ok) << family_name(fam) << " m=" << m << " slack " << c.rhs - c.lhs;
      }
    }
}

TEST(Marginals, MatchEnumerationAndStationarity) {
  for (auto fam : {GraphFamily::CompleteWithLoops, GraphFamily::Complete, GraphFamily::Cycle}) {
    const auto g = build_graph(5, fam);
    const auto w = enumerate_walks(g, 4);
    const auto ref = oracle::walks(g, 4);
    for (int i = 1; i <= 4; ++i)
      for (int j = i + 1; j <= 4; ++j) {
        const RealMatrix jm = stationary_walk_marginals(w, i, j);
        RealMatrix counts = RealMatrix::Zero(5, 5);
        for (const auto& f : ref) counts(f[i - 1], f[j - 1]) += 1.0 / ref.size();
        EXPECT_LT((jm - counts).norm(), 1e-14);
        for (int u = 0; u < 5; ++u) EXPECT_NEAR(jm.row(u).sum(), 0.2, 1e-14);
        if (fam == GraphFamily::CompleteWithLoops) {
          EXPECT_LT((jm - RealMatrix::Constant(5, 5, 0.04)).norm(), 1e-14);
        }
        if (fam == GraphFamily::Complete && j == i + 1) {
          for (int u = 0; u < 5; ++u)
            for (int v = 0; v < 5; ++v) EXPECT_NEAR(jm(u, v), u == v ? 0.0 : 1.0 / 20.0, 1e-15);
        }
      }
  }
  EXPECT_THROW(stationary_walk_marginals(enumerate_walks(build_graph(3, GraphFamily::Complete), 3), 2, 2), DomainError);
}
