#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "heterolab/error.hpp"
#include "heterolab/metrics.hpp"
#include "heterolab/rng.hpp"

using namespace heterolab;

namespace {

LabeledGraph random_graph(std::size_t n, std::size_t classes, double p, std::uint64_t seed,
                          bool allow_isolated) {
  Rng rng(RngSeed{seed, 4});
  std::vector<Edge> e;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) e.push_back({i, j});
  if (!allow_isolated)
    for (NodeId i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  std::vector<ClassId> y(n);
  for (NodeId i = 0; i < n; ++i) y[i] = static_cast<ClassId>(i % classes);
  return build_graph(e, y, std::nullopt, classes);
}

// Direct double sum over node pairs.
Matrix brute_ccns(const LabeledGraph& g) {
  const std::size_t c = g.num_classes();
  Matrix sum(c, c);
  std::vector<double> size(c, 0.0);
  std::vector<std::vector<double>> hist(g.num_nodes());
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    hist[i].assign(c, 0.0);
    for (NodeId j : g.neighbors(i)) hist[i][g.label(j)] += 1.0;
    if (g.degree(i) > 0) size[g.label(i)] += 1.0;
  }
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (g.degree(i) == 0) continue;
    for (NodeId j = 0; j < g.num_nodes(); ++j) {
      if (g.degree(j) == 0) continue;
      double dot = 0, ni = 0, nj = 0;
      for (std::size_t k = 0; k < c; ++k) {
        dot += hist[i][k] * hist[j][k];
        ni += hist[i][k] * hist[i][k];
        nj += hist[j][k] * hist[j][k];
      }
      sum(g.label(i), g.label(j)) += dot / std::sqrt(ni * nj);
    }
  }
  for (std::size_t a = 0; a < c; ++a)
    for (std::size_t b = 0; b < c; ++b) sum(a, b) /= size[a] * size[b];
  return sum;
}

}  // namespace

TEST(Homophily, TwoSameLabelNodes) {
  std::vector<Edge> e{{0, 1}};
  EXPECT_DOUBLE_EQ(homophily_ratio(build_graph(e, {0, 0})), 1.0);
}

TEST(Homophily, LabeledPath) {
  std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}};
  EXPECT_DOUBLE_EQ(homophily_ratio(build_graph(e, {0, 0, 1, 1})), 2.0 / 3.0);
}

TEST(Homophily, EdgelessThrows) {
  EXPECT_THROW(homophily_ratio(build_graph({}, {0, 1})), ValidationError);
}

TEST(Homophily, RelabelInvariantAndComplement) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = random_graph(40, 3, 0.15, seed, true);
    std::vector<ClassId> y(g.labels().begin(), g.labels().end());
    for (auto& c : y) c = (c + 1) % 3;
    auto e = g.edge_list();
    auto relabeled = build_graph(e, y, std::nullopt, 3);
    EXPECT_EQ(homophily_ratio(g), homophily_ratio(relabeled));
    std::size_t cross = 0;
    for (const Edge& ed : e) cross += g.label(ed.u) != g.label(ed.v);
    EXPECT_EQ(homophily_ratio(g) + static_cast<double>(cross) / e.size(), 1.0);
  }
}

TEST(NeighborHistogram, Counts) {
  std::vector<Edge> e{{0, 1}, {0, 2}, {0, 3}};
  auto g = build_graph(e, {0, 1, 1, 2});
  auto h = neighbor_histogram(g, 0);
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{0, 2, 1}));
  ASSERT_EQ(h.normalized.size(), 3u);
  EXPECT_DOUBLE_EQ(h.normalized[1], 2.0 / 3.0);
  EXPECT_THROW(neighbor_histogram(g, 4), ValidationError);
}

TEST(NeighborHistogram, IsolatedAndBipartite) {
  std::vector<Edge> e{{0, 1}, {0, 3}, {2, 1}};
  auto g = build_graph(e, {0, 1, 0, 1, 0});
  auto iso = neighbor_histogram(g, 4);
  EXPECT_EQ(iso.counts, (std::vector<std::uint64_t>{0, 0}));
  EXPECT_TRUE(iso.normalized.empty());
  auto h = neighbor_histogram(g, 0);
  EXPECT_EQ(h.normalized, (std::vector<double>{0.0, 1.0}));
}

TEST(Ccns, SingleClass) {
  std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}};
  auto c = ccns(build_graph(e, {0, 0, 0, 0}));
  EXPECT_DOUBLE_EQ(c.values(0, 0), 1.0);
}

TEST(Ccns, PerfectBipartite) {
  std::vector<Edge> e{{0, 2}, {0, 3}, {1, 3}, {1, 4}};
  auto c = ccns(build_graph(e, {0, 0, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(c.values(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(c.values(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(c.values(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(c.values(1, 0), 0.0);
}

TEST(Ccns, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    auto g = random_graph(20 + seed * 3, 2 + seed % 4, 0.12, seed, true);
    CcnsMatrix c;
    try {
      c = ccns(g);
    } catch (const ValidationError&) {
      continue;
    }
    auto ref = brute_ccns(g);
    for (std::size_t a = 0; a < g.num_classes(); ++a)
      for (std::size_t b = 0; b < g.num_classes(); ++b) {
        EXPECT_NEAR(c.values(a, b), ref(a, b), 1e-12);
        EXPECT_EQ(c.values(a, b), c.values(b, a));
        EXPECT_GE(c.values(a, b), 0.0);
        EXPECT_LE(c.values(a, b), 1.0);
      }
  }
}

TEST(Ccns, ExcludesIsolatedNodes) {
  std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}};
  auto g = build_graph(e, {0, 1, 0, 1, 0, 1});
  auto c = ccns(g);
  EXPECT_EQ(c.excluded_isolated, 2u);
  EXPECT_EQ(c.class_sizes, (std::vector<std::size_t>{2, 2}));
}

TEST(Ccns, EmptyClassAfterExclusionThrows) {
  std::vector<Edge> e{{0, 1}};
  EXPECT_THROW(ccns(build_graph(e, {0, 0, 1})), ValidationError);
  std::vector<Edge> fixed{{0, 1}, {2, 3}};
  EXPECT_NO_THROW(ccns(build_graph(fixed, {0, 0, 1, 1})));
}

TEST(Ccns, SharedHistogramsGiveExactCosine) {
  // Nodes 0-1 class 0, 2-5 class 1, 6-7 class 2.
  std::vector<Edge> e{{0, 2}, {0, 3}, {0, 6}, {1, 4}, {1, 5}, {1, 7},
                      {2, 6}, {3, 7}, {4, 6}, {5, 7}};
  auto g = build_graph(e, {0, 0, 1, 1, 1, 1, 2, 2});
  // class 0 histogram: [0, 2, 1]; class 1: [1, 0, 1]; class 2: [1, 2, 0].
  auto c = ccns(g);
  auto cosine = [](std::vector<double> a, std::vector<double> b) {
    double d = 0, na = 0, nb = 0;
    for (int k = 0; k < 3; ++k) d += a[k] * b[k], na += a[k] * a[k], nb += b[k] * b[k];
    return d / std::sqrt(na * nb);
  };
  EXPECT_NEAR(c.values(0, 1), cosine({0, 2, 1}, {1, 0, 1}), 1e-15);
  EXPECT_NEAR(c.values(0, 2), cosine({0, 2, 1}, {1, 2, 0}), 1e-15);
  EXPECT_NEAR(c.values(1, 2), cosine({1, 0, 1}, {1, 2, 0}), 1e-15);
  EXPECT_NEAR(c.values(2, 2), 1.0, 1e-15);
}
