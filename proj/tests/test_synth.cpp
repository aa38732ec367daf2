#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "heterolab/error.hpp"
#include "heterolab/metrics.hpp"
#include "heterolab/synth.hpp"

using namespace heterolab;

namespace {

LabeledGraph small_sbm(std::uint64_t seed, std::size_t classes = 3) {
  SbmParams p;
  p.class_sizes.assign(classes, 40);
  p.p = 0.15;
  p.q = 0.02;
  p.means = Matrix(classes, 4);
  for (std::size_t c = 0; c < classes; ++c) p.means(c, c % 4) = 1.0;
  return sample_sbm(p, RngSeed{seed, 0});
}

std::vector<NeighborDistribution> own_class(std::size_t c) {
  std::vector<NeighborDistribution> out;
  for (std::size_t i = 0; i < c; ++i) {
    std::vector<double> w(c, 0.0);
    w[i] = 1.0;
    out.emplace_back(w);
  }
  return out;
}

bool contains_all_edges(const LabeledGraph& big, const LabeledGraph& small) {
  for (const Edge& e : small.edge_list())
    if (!big.has_edge(e.u, e.v)) return false;
  return true;
}

}  // namespace

TEST(NeighborDistribution, Validation) {
  EXPECT_THROW(NeighborDistribution({0.5, 0.4}), ValidationError);
  EXPECT_THROW(NeighborDistribution({1.5, -0.5}), ValidationError);
  EXPECT_THROW(NeighborDistribution({}), ValidationError);
  EXPECT_NO_THROW(NeighborDistribution({0.25, 0.25, 0.5}));
}

TEST(NeighborDistribution, SamplingFrequencies) {
  NeighborDistribution d({0.1, 0.0, 0.6, 0.3});
  Rng rng(RngSeed{5, 0});
  std::vector<double> count(4, 0.0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) count[d.sample(rng)] += 1.0;
  EXPECT_EQ(count[1], 0.0);
  for (int c : {0, 2, 3}) {
    const double w = d.weights()[c];
    EXPECT_NEAR(count[c] / n, w, 4 * std::sqrt(w * (1 - w) / n));
  }
}

TEST(Circulant, SevenClassRowZero) {
  auto d = circulant_two_hop(7);
  ASSERT_EQ(d.size(), 7u);
  auto w = d[0].weights();
  EXPECT_EQ(std::vector<double>(w.begin(), w.end()),
            (std::vector<double>{0, 0.5, 0, 0, 0, 0, 0.5}));
  EXPECT_TRUE(is_cross_label_only(d));
  EXPECT_FALSE(is_cross_label_only(own_class(3)));
  EXPECT_THROW(circulant_two_hop(2), ValidationError);
}

TEST(AddEdges, ZeroIsIdentity) {
  auto g = small_sbm(1);
  auto d = circulant_two_hop(3);
  EXPECT_EQ(add_heterophilous_edges(g, 0, d, RngSeed{1, 2}), g);
}

TEST(AddEdges, ExactHomophilyLaw) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = small_sbm(seed, 3 + seed % 3);
    const double h = homophily_ratio(g);
    const double e = static_cast<double>(g.num_edges());
    auto d = circulant_two_hop(g.num_classes());
    for (std::size_t k : {1u, 17u, 250u}) {
      auto g2 = add_heterophilous_edges(g, k, d, RngSeed{seed, 7});
      EXPECT_EQ(g2.num_edges(), g.num_edges() + k);
      EXPECT_NEAR(homophily_ratio(g2), h * e / (e + k), 1e-12);
      EXPECT_TRUE(contains_all_edges(g2, g));
      EXPECT_TRUE(std::equal(g.labels().begin(), g.labels().end(), g2.labels().begin()));
      EXPECT_EQ(g2.features(), g.features());

      auto g3 = add_heterophilous_edges_noisy(g, k, own_class(g.num_classes()), 1.0,
                                              RngSeed{seed, 8});
      EXPECT_NEAR(homophily_ratio(g3), h * e / (e + k), 1e-12);
    }
  }
}

TEST(AddEdges, NoisyAtGammaZeroIsBitIdentical) {
  auto g = small_sbm(3);
  auto d = circulant_two_hop(3);
  EXPECT_EQ(add_heterophilous_edges_noisy(g, 300, d, 0.0, RngSeed{4, 4}),
            add_heterophilous_edges(g, 300, d, RngSeed{4, 4}));
}

TEST(AddEdges, Deterministic) {
  auto g = small_sbm(3);
  auto d = circulant_two_hop(3);
  EXPECT_EQ(add_heterophilous_edges_noisy(g, 100, d, 0.5, RngSeed{9, 1}),
            add_heterophilous_edges_noisy(g, 100, d, 0.5, RngSeed{9, 1}));
  EXPECT_NE(add_heterophilous_edges(g, 100, d, RngSeed{9, 1}),
            add_heterophilous_edges(g, 100, d, RngSeed{10, 1}));
}

TEST(AddEdges, OwnClassHomophilyRises) {
  auto g = small_sbm(2);
  double prev = homophily_ratio(g);
  for (std::size_t k : {100u, 300u, 600u, 1200u}) {
    std::vector<double> hs;
    for (std::uint64_t s = 0; s < 5; ++s)
      hs.push_back(homophily_ratio(add_heterophilous_edges(g, k, own_class(3), RngSeed{s, 1})));
    const double h = std::accumulate(hs.begin(), hs.end(), 0.0) / hs.size();
    EXPECT_GE(h, prev);
    prev = h;
  }
  EXPECT_GT(prev, 0.9);
}

TEST(AddEdges, Errors) {
  auto g = small_sbm(1);
  EXPECT_THROW(add_heterophilous_edges(g, 5, circulant_two_hop(4), RngSeed{}), ValidationError);
  EXPECT_THROW(add_heterophilous_edges_noisy(g, 5, circulant_two_hop(3), 1.5, RngSeed{}),
               ValidationError);
  // Complete bipartite graph between two classes: no cross edge left to add.
  std::vector<Edge> e;
  for (NodeId i = 0; i < 3; ++i)
    for (NodeId j = 3; j < 6; ++j) e.push_back({i, j});
  auto full = build_graph(e, {0, 0, 0, 1, 1, 1});
  std::vector<NeighborDistribution> swap{NeighborDistribution({0, 1}), NeighborDistribution({1, 0})};
  EXPECT_THROW(add_heterophilous_edges(full, 1, swap, RngSeed{}), ValidationError);
  // Sampling an empty class.
  auto empty_class = build_graph(std::vector<Edge>{{0, 1}}, {0, 0}, std::nullopt, 2);
  std::vector<NeighborDistribution> to1{NeighborDistribution({0, 1}), NeighborDistribution({1, 0})};
  EXPECT_THROW(add_heterophilous_edges(empty_class, 1, to1, RngSeed{}), ValidationError);
}

TEST(Csbm, DegenerateLimits) {
  CsbmParams p{3, 3, 0.0, 0.0, {1.0}, {-1.0}};
  auto g = sample_csbm(p, RngSeed{1, 0});
  EXPECT_EQ(g.num_edges(), 0u);
  EXPECT_THROW(homophily_ratio(g), ValidationError);
  p.p = 1.0;
  g = sample_csbm(p, RngSeed{1, 0});
  EXPECT_EQ(g.num_edges(), 6u);
  EXPECT_DOUBLE_EQ(homophily_ratio(g), 1.0);
}

TEST(Csbm, MeanDegree) {
  CsbmParams p{500, 500, 0.02, 0.002, {1.0, 0.0}, {-1.0, 0.0}};
  double total = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) total += degree_summary(sample_csbm(p, RngSeed{s, 0})).mean;
  EXPECT_NEAR(total / 10, 0.02 * 499 + 0.002 * 500, 0.5);
}

TEST(Csbm, FeatureMeansAndValidation) {
  CsbmParams p{2000, 1000, 0.0, 0.0, {2.0, 0.0}, {0.0, -1.0}};
  auto g = sample_csbm(p, RngSeed{3, 0});
  ASSERT_EQ(g.feature_dim(), 2u);
  double m0 = 0, m1 = 0;
  for (NodeId i : g.class_members(0)) m0 += g.features()(i, 0);
  for (NodeId i : g.class_members(1)) m1 += g.features()(i, 1);
  EXPECT_NEAR(m0 / 2000, 2.0, 4 / std::sqrt(2000.0));
  EXPECT_NEAR(m1 / 1000, -1.0, 4 / std::sqrt(1000.0));
  EXPECT_THROW(sample_csbm(CsbmParams{0, 3, 0.1, 0.1, {0.0}, {1.0}}, RngSeed{}), ValidationError);
  EXPECT_THROW(sample_csbm(CsbmParams{3, 3, 1.1, 0.1, {0.0}, {1.0}}, RngSeed{}), ValidationError);
  EXPECT_THROW(sample_csbm(CsbmParams{3, 3, 0.1, 0.1, {0.0}, {1.0, 2.0}}, RngSeed{}),
               ValidationError);
}

TEST(Csbm, LabelSymmetry) {
  // Swapping the two classes keeps the edge-count distribution.
  CsbmParams a{60, 30, 0.1, 0.02, {1.0}, {-1.0}};
  CsbmParams b{30, 60, 0.1, 0.02, {-1.0}, {1.0}};
  double ea = 0, eb = 0;
  const int runs = 40;
  for (int s = 0; s < runs; ++s) {
    ea += sample_csbm(a, RngSeed{static_cast<std::uint64_t>(s), 0}).num_edges();
    eb += sample_csbm(b, RngSeed{static_cast<std::uint64_t>(s), 1}).num_edges();
  }
  // Expected edges: 0.1 * (C(60,2) + C(30,2)) + 0.02 * 1800 = 255.
  EXPECT_NEAR(ea / runs, 255.0, 4 * std::sqrt(255.0 / runs));
  EXPECT_NEAR(eb / runs, 255.0, 4 * std::sqrt(255.0 / runs));
}

TEST(AssumptionSampler, ConstantPointMass) {
  NeighborDistribution d({1.0, 0.0});
  std::vector<FeatureDistribution> f{FeatureDistribution::constant({0.25, -2.0}),
                                     FeatureDistribution::constant({9.0, 9.0})};
  auto h = sample_assumption_neighborhood(d, f, 17, identity_matrix(2), RngSeed{1, 1});
  EXPECT_EQ(h, (std::vector<double>{0.25, -2.0}));
  EXPECT_THROW(sample_assumption_neighborhood(d, f, 0, identity_matrix(2), RngSeed{}),
               ValidationError);
}

TEST(AssumptionSampler, DegreeOneIsSingleDraw) {
  NeighborDistribution d({0.5, 0.5});
  std::vector<FeatureDistribution> f{FeatureDistribution::uniform_bounded({0.5}, 1.0),
                                     FeatureDistribution::uniform_bounded({-0.5}, 1.0)};
  Matrix w(1, 1, std::vector<double>{3.0});
  for (std::uint64_t s = 0; s < 200; ++s) {
    const double v = sample_assumption_neighborhood(d, f, 1, w, RngSeed{s, 0})[0];
    EXPECT_LE(std::abs(v), 3.0);
    EXPECT_TRUE((v >= 0.0 && v <= 3.0) || (v <= 0.0 && v >= -3.0));
  }
}

TEST(AssumptionSampler, LawOfLargeNumbers) {
  NeighborDistribution d({0.5, 0.5});
  std::vector<FeatureDistribution> f{FeatureDistribution::constant({1.0, 0.0}),
                                     FeatureDistribution::constant({0.0, 3.0})};
  Matrix w(2, 2, std::vector<double>{1.0, 2.0, 0.0, -1.0});
  const std::size_t deg = 10000;
  auto h = sample_assumption_neighborhood(d, f, deg, w, RngSeed{2, 0});
  // W (v0 + v1) / 2 = W (0.5, 1.5) = (3.5, -1.5); per-draw spread of the
  // class indicator is 1/2 so 3 sigma of the mean is 1.5 / sqrt(deg) per unit.
  const double sigma = 0.5 / std::sqrt(static_cast<double>(deg));
  EXPECT_NEAR(h[0], 3.5, 3 * sigma * std::abs(1.0 - 6.0));
  EXPECT_NEAR(h[1], -1.5, 3 * sigma * 3.0);
}

TEST(FeatureDistribution, BoundedShape) {
  auto f = FeatureDistribution::uniform_bounded({0.3, -0.6}, 1.0);
  EXPECT_DOUBLE_EQ(f.half_width(), 0.4);
  Rng rng(RngSeed{1, 0});
  std::vector<double> x(2);
  for (int i = 0; i < 10000; ++i) {
    f.sample(rng, x);
    EXPECT_LE(std::abs(x[0]), 1.0);
    EXPECT_LE(std::abs(x[1]), 1.0);
    EXPECT_GE(x[0], -0.1);
    EXPECT_LE(x[1], -0.2);
  }
  EXPECT_THROW(FeatureDistribution::uniform_bounded({2.0}, 1.0), ValidationError);
}
