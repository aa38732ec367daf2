#pragma once

// Numerical checks of the two results about mean aggregation: the
// concentration bound for a single aggregation step, and the CSBM
// misclassification comparison between raw and aggregated features.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "heterolab/matrix.hpp"
#include "heterolab/rng.hpp"
#include "heterolab/synth.hpp"

namespace heterolab::theory {

// Largest singular value by power iteration on W^T W.
double spectral_norm(const Matrix& w, double tol = 1e-10, std::size_t max_iter = 10000);

// 2 l exp(-deg t^2 / (2 rho^2 B^2 l))
double hoeffding_bound(std::size_t degree, double t, double rho, double bound_b,
                       std::size_t l);

// Standard normal CDF with absolute error below 1e-9; Phi(x) + Phi(-x) == 1.
double std_normal_cdf(double x);

struct ConcentrationReport {
  std::vector<double> t_grid;
  std::vector<double> empirical;  // fraction of trials with ||h - E[h]|| >= t
  std::vector<double> bound;
  std::vector<double> slack;      // 3 * MC standard error
  std::size_t violations = 0;     // grid points with empirical > bound + slack
  std::size_t trials = 0;
  std::size_t degree = 0;
  double rho = 0.0;
  double bound_b = 0.0;
  std::size_t l = 0;
  std::vector<double> expectation;  // W * E[x]
};

// E[h] = W * sum_c dist(c) * mean(F_c). Every feature distribution must be
// bounded (uniform shape); B is the largest of their bounds.
std::vector<double> expected_aggregate(const NeighborDistribution& dist,
                                       std::span<const FeatureDistribution> feats,
                                       const Matrix& w);

// Trials are split into a fixed number of partitions, each with its own
// derived stream, so the tallies do not depend on the worker count.
ConcentrationReport verify_concentration(const NeighborDistribution& dist,
                                         std::span<const FeatureDistribution> feats,
                                         const Matrix& w, std::size_t degree,
                                         std::span<const double> t_grid, std::size_t trials,
                                         RngSeed seed);

// Two classes with uniform bounded features (means +B/2 and -B/2 on every
// coordinate, half width B/2), a uniform neighbor distribution and a seeded
// standard Gaussian W of shape l x l.
struct ConcentrationSetup {
  std::vector<NeighborDistribution> dists;  // one entry, the distribution used
  std::vector<FeatureDistribution> feats;
  Matrix w;
};

ConcentrationSetup default_concentration_setup(std::size_t l, double bound_b, RngSeed seed);

// t_k = s_k * rho * B * sqrt(2 l / degree) with s_k evenly spaced on
// [0.25, 2.5], so the bound runs from 2l e^{-1/16} down to 2l e^{-6.25}.
std::vector<double> concentration_t_grid(std::size_t degree, double rho, double bound_b,
                                         std::size_t l, std::size_t points = 10);

struct DecisionBoundary {
  std::vector<double> w;  // unit normal pointing towards mu0
  std::vector<double> m;  // midpoint
  double b = 0.0;         // -w^T m

  // w^T z + b
  double score(std::span<const double> z) const;
};

DecisionBoundary boundary_from_params(std::span<const double> mu0, std::span<const double> mu1);

enum class ThresholdKind { kFinite, kNeverHelps };

struct DegreeThreshold {
  ThresholdKind kind = ThresholdKind::kFinite;
  double value = 0.0;  // ((p+q)/(p-q))^2 when finite
};

// p == q is the "aggregation never helps" outcome, not an error.
DegreeThreshold degree_threshold(double p, double q);

struct Misclassification {
  double p_x = 0.0;
  double p_h = 0.0;
};

// p_x = Phi(-||mu0-mu1||/2), p_h = Phi(-sqrt(deg) |p-q|/(p+q) ||mu0-mu1||/2).
Misclassification analytic_misclassification(const CsbmParams& params, double degree);

struct MisclassificationEntry {
  std::size_t degree = 0;
  double analytic_x = 0.0;
  double analytic_h = 0.0;
  double empirical_x = 0.0;
  double empirical_h = 0.0;
  std::size_t trials = 0;
};

// Samples x ~ N(mu_c, I) and h ~ N((p mu_c + q mu_c')/(p+q), I/deg), with
// class c drawn in proportion n0 : n1, and classifies both with the fixed
// boundary from boundary_from_params. For p < q the aggregated means swap
// sides, so the h classifier uses the same hyperplane with flipped
// orientation.
MisclassificationEntry monte_carlo_misclassification(const CsbmParams& params,
                                                     std::size_t degree, std::size_t trials,
                                                     RngSeed seed);

struct MisclassificationCurve {
  std::vector<MisclassificationEntry> entries;
  DegreeThreshold threshold;
  double p = 0.0;
  double q = 0.0;
  double separation = 0.0;  // ||mu0 - mu1||
  RngSeed seed;
};

MisclassificationCurve misclassification_curve(const CsbmParams& params,
                                               std::span<const std::size_t> degrees,
                                               std::size_t trials, RngSeed seed);

}  // namespace heterolab::theory
