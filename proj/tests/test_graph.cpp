#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "heterolab/error.hpp"
#include "heterolab/graph.hpp"
#include "heterolab/rng.hpp"

using namespace heterolab;

namespace {

LabeledGraph path(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return build_graph(e, std::vector<ClassId>(n, 0));
}

LabeledGraph random_graph(std::size_t n, double p, std::uint64_t seed) {
  Rng rng(RngSeed{seed, 9});
  std::vector<Edge> e;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) e.push_back({i, j});
  std::vector<ClassId> y(n);
  for (auto& c : y) c = static_cast<ClassId>(rng.below(3));
  return build_graph(e, y, std::nullopt, 3);
}

}  // namespace

TEST(Graph, PathNeighbors) {
  auto g = path(3);
  auto nb = g.neighbors(1);
  EXPECT_EQ(std::vector<NodeId>(nb.begin(), nb.end()), (std::vector<NodeId>{0, 2}));
}

TEST(Graph, IsolatedNodeHasNoNeighbors) {
  std::vector<Edge> e{{0, 1}};
  auto g = build_graph(e, {0, 0, 0});
  EXPECT_TRUE(g.neighbors(2).empty());
  EXPECT_EQ(g.degree(2), 0u);
}

TEST(Graph, StarCenter) {
  std::vector<Edge> e{{0, 4}, {0, 2}, {3, 0}, {0, 1}};
  auto g = build_graph(e, {0, 0, 0, 0, 0});
  auto nb = g.neighbors(0);
  EXPECT_EQ(std::vector<NodeId>(nb.begin(), nb.end()), (std::vector<NodeId>{1, 2, 3, 4}));
}

TEST(Graph, OutOfRangeNeighborQuery) {
  auto g = path(3);
  EXPECT_THROW(g.neighbors(3), ValidationError);
  EXPECT_THROW(g.label(7), ValidationError);
}

TEST(Graph, RejectsSelfLoopAndBadIds) {
  std::vector<Edge> loop{{1, 1}};
  EXPECT_THROW(build_graph(loop, {0, 0}), ValidationError);
  std::vector<Edge> bad{{0, 5}};
  EXPECT_THROW(build_graph(bad, {0, 0}), ValidationError);
}

TEST(Graph, MergesDuplicatesInEitherOrientation) {
  std::vector<Edge> e{{0, 1}, {1, 0}, {0, 1}, {1, 2}};
  auto g = build_graph(e, {0, 1, 0});
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.edge_list(), (std::vector<Edge>{{0, 1}, {1, 2}}));
}

TEST(Graph, NumClassesMayExceedLabels) {
  std::vector<Edge> e{{0, 1}};
  auto g = build_graph(e, {0, 1}, std::nullopt, 4);
  EXPECT_EQ(g.num_classes(), 4u);
  EXPECT_TRUE(g.class_members(3).empty());
  EXPECT_THROW(build_graph(e, {0, 3}, std::nullopt, 2), ValidationError);
}

TEST(Graph, FeatureValidation) {
  std::vector<Edge> e{{0, 1}};
  EXPECT_THROW(build_graph(e, {0, 1}, Matrix(3, 2)), ValidationError);
  Matrix x(2, 1);
  x(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(build_graph(e, {0, 1}, x), ValidationError);
  auto g = build_graph(e, {0, 1});
  EXPECT_THROW(g.features(), ValidationError);
}

TEST(DegreeSummary, SingleEdge) {
  std::vector<Edge> e{{0, 1}};
  auto d = degree_summary(build_graph(e, {0, 0}));
  EXPECT_EQ(d.min, 1u);
  EXPECT_EQ(d.max, 1u);
  EXPECT_DOUBLE_EQ(d.mean, 1.0);
  EXPECT_EQ(d.isolated, 0u);
}

TEST(DegreeSummary, IsolatedAndCycle) {
  std::vector<Edge> e{{0, 1}};
  EXPECT_GE(degree_summary(build_graph(e, {0, 0, 0})).isolated, 1u);
  std::vector<Edge> c4{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  EXPECT_DOUBLE_EQ(degree_summary(build_graph(c4, {0, 0, 0, 0})).mean, 2.0);
}

TEST(GraphProperty, HandshakeAndSymmetry) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 5 + seed * 2;
    auto g = random_graph(n, 0.3, seed);
    std::size_t total = 0;
    for (NodeId i = 0; i < n; ++i) {
      auto nb = g.neighbors(i);
      total += nb.size();
      EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
      EXPECT_EQ(std::adjacent_find(nb.begin(), nb.end()), nb.end());
      for (NodeId j = 0; j < n; ++j) EXPECT_EQ(g.has_edge(i, j), g.has_edge(j, i));
    }
    EXPECT_EQ(total % 2, 0u);
    EXPECT_EQ(total, 2 * g.num_edges());
  }
}

TEST(GraphProperty, RebuildFromEdgeListIsIdempotent) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = random_graph(30, 0.2, seed);
    auto e = g.edge_list();
    std::vector<ClassId> y(g.labels().begin(), g.labels().end());
    EXPECT_EQ(build_graph(e, y, std::nullopt, g.num_classes()), g);
  }
}
