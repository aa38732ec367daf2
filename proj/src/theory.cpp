#include "heterolab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "heterolab/error.hpp"
#include "heterolab/kernels.hpp"

namespace heterolab::theory {
namespace {

constexpr std::size_t kPartitions = 16;
constexpr std::size_t kMinTrials = 10000;

double norm2(std::span<const double> v) {
  return std::sqrt(kernels::active().dot(v.data(), v.data(), v.size()));
}

}  // namespace

double spectral_norm(const Matrix& w, double tol, std::size_t max_iter) {
  for (double v : w.values()) {
    if (!std::isfinite(v)) throw ValidationError("spectral norm of a non-finite matrix");
  }
  const std::size_t rows = w.rows();
  const std::size_t cols = w.cols();
  if (rows == 0 || cols == 0) return 0.0;
  const auto& k = kernels::active();

  // Deterministic start with every component nonzero so it is not orthogonal
  // to the top right-singular vector for generic W.
  std::vector<double> v(cols);
  for (std::size_t j = 0; j < cols; ++j) v[j] = 1.0 + 0.1 * static_cast<double>(j);
  double nv = norm2(v);
  for (double& e : v) e /= nv;

  std::vector<double> wv(rows), next(cols);
  double sigma = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    for (std::size_t r = 0; r < rows; ++r) wv[r] = k.dot(w.row(r).data(), v.data(), cols);
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t r = 0; r < rows; ++r) k.axpy(wv[r], w.row(r).data(), next.data(), cols);
    const double lambda = norm2(next);  // ||W^T W v|| -> sigma^2
    if (lambda == 0.0) return 0.0;
    for (std::size_t j = 0; j < cols; ++j) v[j] = next[j] / lambda;
    const double estimate = std::sqrt(lambda);
    if (std::abs(estimate - sigma) <= tol * estimate) {
      sigma = estimate;
      break;
    }
    sigma = estimate;
  }
  // Report ||W v|| for the converged unit v.
  for (std::size_t r = 0; r < rows; ++r) wv[r] = k.dot(w.row(r).data(), v.data(), cols);
  return std::max(sigma, norm2(wv));
}

double hoeffding_bound(std::size_t degree, double t, double rho, double bound_b,
                       std::size_t l) {
  if (degree < 1) throw ValidationError("degree must be at least 1");
  if (!(t >= 0.0)) throw ValidationError("t must be nonnegative");
  if (!(rho > 0.0)) throw ValidationError("rho(W) must be positive");
  if (!(bound_b > 0.0)) throw ValidationError("feature bound B must be positive");
  if (l < 1) throw ValidationError("feature dimension must be at least 1");
  const double d = static_cast<double>(degree);
  const double ld = static_cast<double>(l);
  return 2.0 * ld * std::exp(-(d * t * t) / (2.0 * rho * rho * bound_b * bound_b * ld));
}

double std_normal_cdf(double x) {
  if (!std::isfinite(x)) throw ValidationError("normal CDF of a non-finite value");
  // Lower tail from erfc is accurate for x <= 0; the upper tail is its
  // complement, which makes the symmetry identity exact.
  if (x <= 0.0) return 0.5 * std::erfc(-x / std::numbers::sqrt2);
  return 1.0 - 0.5 * std::erfc(x / std::numbers::sqrt2);
}

std::vector<double> expected_aggregate(const NeighborDistribution& dist,
                                       std::span<const FeatureDistribution> feats,
                                       const Matrix& w) {
  if (feats.size() != dist.num_classes()) {
    throw ValidationError("need one feature distribution per class");
  }
  const std::size_t l = w.cols();
  std::vector<double> mean(l, 0.0);
  for (std::size_t c = 0; c < feats.size(); ++c) {
    if (feats[c].dim() != l) throw ValidationError("W columns must match feature dimension");
    kernels::active().axpy(dist.weights()[c], feats[c].mean.data(), mean.data(), l);
  }
  std::vector<double> out(w.rows());
  for (std::size_t r = 0; r < w.rows(); ++r) {
    out[r] = kernels::active().dot(w.row(r).data(), mean.data(), l);
  }
  return out;
}

ConcentrationReport verify_concentration(const NeighborDistribution& dist,
                                         std::span<const FeatureDistribution> feats,
                                         const Matrix& w, std::size_t degree,
                                         std::span<const double> t_grid, std::size_t trials,
                                         RngSeed seed) {
  if (trials < kMinTrials) {
    throw ValidationError("concentration check needs at least " + std::to_string(kMinTrials) +
                          " trials");
  }
  double bound_b = 0.0;
  for (const auto& f : feats) {
    if (f.shape != FeatureShape::kUniformBounded) {
      throw ValidationError("concentration bound requires bounded features");
    }
    bound_b = std::max(bound_b, f.bound);
  }
  ConcentrationReport rep;
  rep.t_grid.assign(t_grid.begin(), t_grid.end());
  rep.trials = trials;
  rep.degree = degree;
  rep.l = w.cols();
  rep.rho = spectral_norm(w);
  rep.bound_b = bound_b;
  rep.expectation = expected_aggregate(dist, feats, w);

  std::vector<std::uint64_t> exceed(t_grid.size(), 0);
  for (std::size_t part = 0; part < kPartitions; ++part) {
    const std::size_t lo = trials * part / kPartitions;
    const std::size_t hi = trials * (part + 1) / kPartitions;
    Rng rng(seed.derive(part));
    std::vector<double> diff(rep.expectation.size());
    for (std::size_t trial = lo; trial < hi; ++trial) {
      const auto h = sample_assumption_neighborhood(dist, feats, degree, w, rng);
      for (std::size_t r = 0; r < h.size(); ++r) diff[r] = h[r] - rep.expectation[r];
      const double dist_to_mean = norm2(diff);
      for (std::size_t g = 0; g < t_grid.size(); ++g) {
        if (dist_to_mean >= t_grid[g]) ++exceed[g];
      }
    }
  }

  for (std::size_t g = 0; g < t_grid.size(); ++g) {
    const double freq = static_cast<double>(exceed[g]) / static_cast<double>(trials);
    const double slack = 3.0 * std::sqrt(freq * (1.0 - freq) / static_cast<double>(trials));
    // rho or B can be zero for degenerate inputs; the bound is then vacuous
    // at t = 0 and zero elsewhere.
    double bound;
    if (rep.rho > 0.0 && bound_b > 0.0) {
      bound = hoeffding_bound(degree, t_grid[g], rep.rho, bound_b, rep.l);
    } else {
      bound = t_grid[g] > 0.0 ? 0.0 : 2.0 * static_cast<double>(rep.l);
    }
    rep.empirical.push_back(freq);
    rep.bound.push_back(bound);
    rep.slack.push_back(slack);
    if (freq > bound + slack) ++rep.violations;
  }
  return rep;
}

double DecisionBoundary::score(std::span<const double> z) const {
  return kernels::active().dot(w.data(), z.data(), w.size()) + b;
}

DecisionBoundary boundary_from_params(std::span<const double> mu0,
                                      std::span<const double> mu1) {
  if (mu0.size() != mu1.size() || mu0.empty()) {
    throw ValidationError("means must be nonempty and of equal dimension");
  }
  DecisionBoundary p;
  p.w.resize(mu0.size());
  p.m.resize(mu0.size());
  for (std::size_t k = 0; k < mu0.size(); ++k) {
    p.w[k] = mu0[k] - mu1[k];
    p.m[k] = (mu0[k] + mu1[k]) / 2.0;
  }
  const double len = norm2(p.w);
  if (len == 0.0) throw ValidationError("coincident class means have no decision boundary");
  for (double& v : p.w) v /= len;
  p.b = -kernels::active().dot(p.w.data(), p.m.data(), p.w.size());
  return p;
}

DegreeThreshold degree_threshold(double p, double q) {
  if (!(p > 0.0 && p <= 1.0) || !(q > 0.0 && q <= 1.0)) {
    throw ValidationError("p and q must lie in (0, 1]");
  }
  if (p == q) return {ThresholdKind::kNeverHelps, 0.0};
  const double r = (p + q) / (p - q);
  return {ThresholdKind::kFinite, r * r};
}

Misclassification analytic_misclassification(const CsbmParams& params, double degree) {
  params.validate();
  if (!(degree >= 1.0)) throw ValidationError("degree must be at least 1");
  if (!(params.p + params.q > 0.0)) throw ValidationError("p + q must be positive");
  double sep2 = 0.0;
  for (std::size_t k = 0; k < params.dim(); ++k) {
    const double d = params.mu0[k] - params.mu1[k];
    sep2 += d * d;
  }
  const double half_sep = std::sqrt(sep2) / 2.0;
  const double dis_x = half_sep;
  const double dis_h =
      std::sqrt(degree) * std::abs(params.p - params.q) / (params.p + params.q) * half_sep;
  return {std_normal_cdf(-dis_x), std_normal_cdf(-dis_h)};
}

MisclassificationEntry monte_carlo_misclassification(const CsbmParams& params,
                                                     std::size_t degree, std::size_t trials,
                                                     RngSeed seed) {
  if (trials < kMinTrials) {
    throw ValidationError("misclassification estimate needs at least " +
                          std::to_string(kMinTrials) + " trials");
  }
  if (degree < 1) throw ValidationError("degree must be at least 1");
  const Misclassification exact = analytic_misclassification(params, static_cast<double>(degree));
  const DecisionBoundary boundary = boundary_from_params(params.mu0, params.mu1);
  const std::size_t l = params.dim();
  const double pq = params.p + params.q;
  const double h_orientation = params.p >= params.q ? 1.0 : -1.0;
  const double h_sd = 1.0 / std::sqrt(static_cast<double>(degree));

  std::vector<double> h_mean0(l), h_mean1(l);
  for (std::size_t k = 0; k < l; ++k) {
    h_mean0[k] = (params.p * params.mu0[k] + params.q * params.mu1[k]) / pq;
    h_mean1[k] = (params.q * params.mu0[k] + params.p * params.mu1[k]) / pq;
  }
  const std::size_t class0_trials =
      trials * params.n0 / (params.n0 + params.n1);

  std::uint64_t wrong_x = 0;
  std::uint64_t wrong_h = 0;
  std::vector<double> z(l);
  for (std::size_t part = 0; part < kPartitions; ++part) {
    const std::size_t lo = trials * part / kPartitions;
    const std::size_t hi = trials * (part + 1) / kPartitions;
    Rng rng(seed.derive(part));
    for (std::size_t trial = lo; trial < hi; ++trial) {
      const bool class0 = trial < class0_trials;
      // Class 0 sits on the positive side of the boundary.
      const double side = class0 ? 1.0 : -1.0;
      const auto& mu = class0 ? params.mu0 : params.mu1;
      for (std::size_t k = 0; k < l; ++k) z[k] = mu[k] + rng.normal();
      if (side * boundary.score(z) <= 0.0) ++wrong_x;
      const auto& hm = class0 ? h_mean0 : h_mean1;
      for (std::size_t k = 0; k < l; ++k) z[k] = hm[k] + h_sd * rng.normal();
      if (h_orientation * side * boundary.score(z) <= 0.0) ++wrong_h;
    }
  }
  MisclassificationEntry e;
  e.degree = degree;
  e.analytic_x = exact.p_x;
  e.analytic_h = exact.p_h;
  e.empirical_x = static_cast<double>(wrong_x) / static_cast<double>(trials);
  e.empirical_h = static_cast<double>(wrong_h) / static_cast<double>(trials);
  e.trials = trials;
  return e;
}

MisclassificationCurve misclassification_curve(const CsbmParams& params,
                                               std::span<const std::size_t> degrees,
                                               std::size_t trials, RngSeed seed) {
  MisclassificationCurve curve;
  curve.threshold = degree_threshold(params.p, params.q);
  curve.p = params.p;
  curve.q = params.q;
  double sep2 = 0.0;
  for (std::size_t k = 0; k < params.dim(); ++k) {
    sep2 += (params.mu0[k] - params.mu1[k]) * (params.mu0[k] - params.mu1[k]);
  }
  curve.separation = std::sqrt(sep2);
  curve.seed = seed;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    curve.entries.push_back(
        monte_carlo_misclassification(params, degrees[i], trials, seed.derive(i)));
  }
  return curve;
}

ConcentrationSetup default_concentration_setup(std::size_t l, double bound_b, RngSeed seed) {
  if (l == 0) throw ValidationError("feature dimension must be positive");
  if (!(bound_b > 0.0)) throw ValidationError("feature bound must be positive");
  ConcentrationSetup s;
  s.dists.emplace_back(std::vector<double>{0.5, 0.5});
  s.feats.push_back(FeatureDistribution::uniform_bounded(std::vector<double>(l, bound_b / 2), bound_b));
  s.feats.push_back(FeatureDistribution::uniform_bounded(std::vector<double>(l, -bound_b / 2), bound_b));
  s.w = Matrix(l, l);
  Rng rng(seed);
  for (double& v : s.w.values()) v = rng.normal();
  return s;
}

std::vector<double> concentration_t_grid(std::size_t degree, double rho, double bound_b,
                                         std::size_t l, std::size_t points) {
  if (degree == 0 || points < 2) throw ValidationError("need degree >= 1 and >= 2 grid points");
  const double scale = rho * bound_b * std::sqrt(2.0 * static_cast<double>(l) / degree);
  std::vector<double> t(points);
  for (std::size_t k = 0; k < points; ++k) {
    t[k] = scale * (0.25 + 2.25 * static_cast<double>(k) / (points - 1));
  }
  return t;
}

}  // namespace heterolab::theory
