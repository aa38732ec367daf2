#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "heterolab/error.hpp"
#include "heterolab/theory.hpp"

using namespace heterolab;
using namespace heterolab::theory;

namespace {

CsbmParams params(double p, double q, double sep, std::size_t l = 2) {
  CsbmParams c;
  c.n0 = c.n1 = 1;
  c.p = p;
  c.q = q;
  c.mu0.assign(l, 0.0);
  c.mu1.assign(l, 0.0);
  c.mu0[0] = sep / 2;
  c.mu1[0] = -sep / 2;
  return c;
}

}  // namespace

TEST(SpectralNorm, Examples) {
  EXPECT_NEAR(spectral_norm(identity_matrix(3)), 1.0, 1e-12);
  EXPECT_NEAR(spectral_norm(Matrix(2, 2, std::vector<double>{3, 0, 0, -5})), 5.0, 1e-9);
  EXPECT_NEAR(spectral_norm(Matrix(2, 2, std::vector<double>{1, 1, 0, 1})), 1.6180339887498948,
              1e-9);
  Matrix bad(1, 1, std::vector<double>{std::nan("")});
  EXPECT_THROW(spectral_norm(bad), ValidationError);
}

TEST(SpectralNorm, MatchesRandomUnitVectorOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(RngSeed{seed, 1});
    const std::size_t r = 2 + seed % 3, c = 2;
    Matrix w(r, c);
    for (double& v : w.values()) v = rng.normal();
    double best = 0.0;
    std::vector<double> v(c);
    for (int t = 0; t < 10000; ++t) {
      double n = 0;
      for (double& x : v) x = rng.normal(), n += x * x;
      n = std::sqrt(n);
      double out = 0;
      for (std::size_t i = 0; i < r; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < c; ++j) s += w(i, j) * v[j] / n;
        out += s * s;
      }
      best = std::max(best, std::sqrt(out));
    }
    const double rho = spectral_norm(w);
    EXPECT_GE(rho + 1e-12, best);
    EXPECT_NEAR(rho, best, 1e-6);
  }
}

TEST(Hoeffding, Examples) {
  EXPECT_DOUBLE_EQ(hoeffding_bound(10, 0.0, 1.0, 1.0, 3), 6.0);
  EXPECT_NEAR(hoeffding_bound(100, 1.0, 1.0, 1.0, 4), 2.98132253766293679e-5, 1e-18);
  double prev = 1e9;
  for (std::size_t d = 1; d < 4096; d *= 2) {
    const double b = hoeffding_bound(d, 0.5, 1.2, 1.0, 2);
    EXPECT_LT(b, prev);
    prev = b;
  }
  EXPECT_THROW(hoeffding_bound(0, 1.0, 1.0, 1.0, 1), ValidationError);
  EXPECT_THROW(hoeffding_bound(1, -1.0, 1.0, 1.0, 1), ValidationError);
  EXPECT_THROW(hoeffding_bound(1, 1.0, 0.0, 1.0, 1), ValidationError);
  EXPECT_THROW(hoeffding_bound(1, 1.0, 1.0, 0.0, 1), ValidationError);
  EXPECT_THROW(hoeffding_bound(1, 1.0, 1.0, 1.0, 0), ValidationError);
}

TEST(NormalCdf, OracleValuesAndSymmetry) {
  EXPECT_EQ(std_normal_cdf(0.0), 0.5);
  for (double x : {0.5, 1.0, 2.0, 5.0}) EXPECT_EQ(std_normal_cdf(x) + std_normal_cdf(-x), 1.0);
  EXPECT_NEAR(std_normal_cdf(1.96), 0.975002104851779563787, 1e-12);
  EXPECT_NEAR(std_normal_cdf(-1.6), 0.054799291699557984, 1e-12);
  EXPECT_NEAR(std_normal_cdf(-1.0), 0.158655253931457051, 1e-12);
  EXPECT_NEAR(std_normal_cdf(-3.0), 0.0013498980316300945, 1e-12);
  EXPECT_NEAR(std_normal_cdf(-0.5), 0.30853753872598690, 1e-12);
  EXPECT_NEAR(std_normal_cdf(0.3), 0.61791142218895263, 1e-12);
  EXPECT_NEAR(std_normal_cdf(2.5), 0.99379033467422386, 1e-12);
  EXPECT_THROW(std_normal_cdf(std::nan("")), ValidationError);
}

TEST(Boundary, Examples) {
  std::vector<double> a{1, 0}, b{-1, 0};
  auto p = boundary_from_params(a, b);
  EXPECT_EQ(p.w, (std::vector<double>{1, 0}));
  EXPECT_EQ(p.m, (std::vector<double>{0, 0}));
  std::vector<double> c{3, 4}, z{0, 0};
  auto q = boundary_from_params(c, z);
  EXPECT_NEAR(q.w[0], 0.6, 1e-15);
  EXPECT_NEAR(q.w[1], 0.8, 1e-15);
  EXPECT_EQ(q.m, (std::vector<double>{1.5, 2}));
  std::vector<double> c2{6, 8};
  auto s = boundary_from_params(c2, z);
  EXPECT_NEAR(s.w[0], q.w[0], 1e-15);
  EXPECT_EQ(s.m, (std::vector<double>{3, 4}));
  EXPECT_THROW(boundary_from_params(a, a), ValidationError);
}

TEST(Boundary, ScaleInvariantSign) {
  std::vector<double> mu0{1.0, 2.0, -1.0}, mu1{0.0, -1.0, 0.5};
  auto p = boundary_from_params(mu0, mu1);
  Rng rng(RngSeed{3, 3});
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> z(3);
    for (double& v : z) v = 2 * rng.normal();
    const double s = std::exp(3 * rng.normal());
    double lhs = p.b, rhs = s * p.b;
    for (int k = 0; k < 3; ++k) lhs += p.w[k] * z[k], rhs += p.w[k] * s * z[k];
    EXPECT_EQ(lhs > 0, rhs > 0);
    EXPECT_EQ(lhs <= 0, rhs <= 0);
  }
}

TEST(Threshold, Examples) {
  auto a = degree_threshold(0.5, 0.1);
  EXPECT_EQ(a.kind, ThresholdKind::kFinite);
  EXPECT_NEAR(a.value, 2.25, 1e-15);
  EXPECT_EQ(degree_threshold(0.1, 0.5).value, a.value);
  EXPECT_NEAR(degree_threshold(0.9, 0.1).value, 1.5625, 1e-15);
  EXPECT_NEAR(degree_threshold(0.45, 0.05).value, 1.5625, 1e-15);
  EXPECT_EQ(degree_threshold(0.3, 0.3).kind, ThresholdKind::kNeverHelps);
  EXPECT_THROW(degree_threshold(0.0, 0.3), ValidationError);
  EXPECT_THROW(degree_threshold(0.3, 1.2), ValidationError);
}

TEST(Analytic, Examples) {
  auto m = analytic_misclassification(params(0.9, 0.1, 2.0), 4.0);
  EXPECT_NEAR(m.p_h, 0.054799291699557984, 1e-12);
  EXPECT_NEAR(m.p_x, 0.158655253931457051, 1e-12);
  EXPECT_EQ(analytic_misclassification(params(0.9, 0.1, 0.0), 4.0).p_x, 0.5);
  for (auto [p, q] : {std::pair{0.9, 0.1}, {0.5, 0.1}, {0.2, 0.6}, {0.05, 0.04}}) {
    const auto c = params(p, q, 2.0);
    const double t = degree_threshold(p, q).value;
    const auto at = analytic_misclassification(c, t);
    EXPECT_NEAR(at.p_h, at.p_x, 1e-12);
    double prev = 1.0;
    for (double d = 1; d < 64; d *= 1.5) {
      const double ph = analytic_misclassification(c, d).p_h;
      EXPECT_LT(ph, prev);
      prev = ph;
    }
  }
}

TEST(MonteCarlo, AgreesWithAnalyticOnGrid) {
  std::size_t points = 0;
  for (auto [p, q] : {std::pair{0.9, 0.1}, {0.5, 0.2}, {0.1, 0.4}, {0.3, 0.3}}) {
    for (std::size_t deg : {1u, 3u, 9u}) {
      const auto c = params(p, q, 2.0);
      const std::size_t trials = 40000;
      auto e = monte_carlo_misclassification(c, deg, trials, RngSeed{points, 5});
      for (auto [emp, ana] : {std::pair{e.empirical_x, e.analytic_x}, {e.empirical_h, e.analytic_h}}) {
        EXPECT_LE(std::abs(emp - ana), 3 * std::sqrt(ana * (1 - ana) / trials))
            << "p " << p << " q " << q << " deg " << deg;
      }
      ++points;
    }
  }
  EXPECT_GE(points, 12u);
}

TEST(MonteCarlo, Extremes) {
  auto far = monte_carlo_misclassification(params(0.9, 0.1, 20.0), 4, 10000, RngSeed{1, 1});
  EXPECT_EQ(far.empirical_x, 0.0);
  EXPECT_EQ(far.empirical_h, 0.0);
  auto same = monte_carlo_misclassification(params(0.4, 0.4, 2.0), 4, 100000, RngSeed{1, 2});
  EXPECT_NEAR(same.empirical_h, 0.5, 3 * std::sqrt(0.25 / 100000));
  EXPECT_THROW(monte_carlo_misclassification(params(0.9, 0.1, 2.0), 4, 100, RngSeed{}),
               ValidationError);
}

TEST(Concentration, PointMassHasNoTail) {
  NeighborDistribution d({1.0, 0.0});
  std::vector<FeatureDistribution> f{FeatureDistribution::uniform_bounded({0.5, 0.5}, 0.5),
                                     FeatureDistribution::uniform_bounded({0.0, 0.0}, 1.0)};
  Matrix w = identity_matrix(2);
  std::vector<double> t{0.01, 0.1, 1.0};
  auto r = verify_concentration(d, f, w, 10, t, 10000, RngSeed{1, 1});
  for (double e : r.empirical) EXPECT_EQ(e, 0.0);
  EXPECT_EQ(r.violations, 0u);
}

TEST(Concentration, NoViolationsAndShrinkingTails) {
  auto setup = default_concentration_setup(2, 1.0, RngSeed{4, 1});
  const double rho = spectral_norm(setup.w);
  std::vector<double> t;
  for (int k = 1; k <= 10; ++k) t.push_back(0.1 * k);
  auto lo = verify_concentration(setup.dists[0], setup.feats, setup.w, 50, t, 100000, RngSeed{4, 2});
  EXPECT_EQ(lo.violations, 0u);
  EXPECT_EQ(lo.rho, rho);
  auto hi = verify_concentration(setup.dists[0], setup.feats, setup.w, 100, t, 100000, RngSeed{4, 3});
  EXPECT_EQ(hi.violations, 0u);
  for (std::size_t k = 0; k < t.size(); ++k) {
    EXPECT_LE(hi.bound[k], lo.bound[k]);
    EXPECT_LE(hi.empirical[k], lo.empirical[k] + 3 * std::sqrt(0.25 / 100000));
  }
}

TEST(Concentration, RejectsUnboundedOrFewTrials) {
  NeighborDistribution d({0.5, 0.5});
  std::vector<FeatureDistribution> g{FeatureDistribution::gaussian({0.0}),
                                     FeatureDistribution::gaussian({1.0})};
  std::vector<double> t{0.5};
  EXPECT_THROW(verify_concentration(d, g, identity_matrix(1), 5, t, 10000, RngSeed{}),
               ValidationError);
  auto s = default_concentration_setup(1, 1.0, RngSeed{});
  EXPECT_THROW(verify_concentration(s.dists[0], s.feats, s.w, 5, t, 100, RngSeed{}),
               ValidationError);
}
