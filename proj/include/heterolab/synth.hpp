#pragma once

// Graph generators: SBM/CSBM sampling, heterophilous edge addition (with and
// without noise), and the per-node neighborhood simulator used to check the
// concentration bound.

#include <cstddef>
#include <span>
#include <vector>

#include "heterolab/graph.hpp"
#include "heterolab/matrix.hpp"
#include "heterolab/rng.hpp"

namespace heterolab {

// Categorical distribution over class ids.
class NeighborDistribution {
 public:
  // Throws ValidationError unless weights are nonnegative and sum to 1
  // within 1e-12.
  explicit NeighborDistribution(std::vector<double> weights);

  std::size_t num_classes() const noexcept { return weights_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> cumulative() const noexcept { return cumulative_; }

  // Inverse-CDF draw.
  ClassId sample(Rng& rng) const;

  friend bool operator==(const NeighborDistribution&, const NeighborDistribution&) = default;

 private:
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

// Class c puts mass 1/2 on each of its two circulant neighbors c-1 and c+1
// (mod C). Requires C >= 3.
std::vector<NeighborDistribution> circulant_two_hop(std::size_t num_classes);

// True when no class puts mass on itself, i.e. every added edge is cross-label.
bool is_cross_label_only(std::span<const NeighborDistribution> dists);

// Adds exactly k new distinct undirected edges. Each edge: source i uniform
// over V, target class c ~ dists[y_i], target j uniform over V_c. Candidates
// that are self-loops or already present are rejected and the whole triple is
// redrawn; more than 1000 * k draws is an error.
LabeledGraph add_heterophilous_edges(const LabeledGraph& g, std::size_t k,
                                     std::span<const NeighborDistribution> dists,
                                     RngSeed seed);

// As above, except that with probability gamma the target class is drawn
// uniformly from the classes other than y_i. gamma = 0 consumes the random
// stream exactly like add_heterophilous_edges.
LabeledGraph add_heterophilous_edges_noisy(const LabeledGraph& g, std::size_t k,
                                           std::span<const NeighborDistribution> dists,
                                           double gamma, RngSeed seed);

// Multi-class stochastic block model with unit-variance Gaussian features.
// Nodes are numbered class by class.
struct SbmParams {
  std::vector<std::size_t> class_sizes;
  double p = 0.0;  // intra-class edge probability
  double q = 0.0;  // inter-class edge probability
  Matrix means;    // one row per class; zero columns means no features
};

LabeledGraph sample_sbm(const SbmParams& params, RngSeed seed);

// Two-class contextual SBM.
struct CsbmParams {
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  double p = 0.0;
  double q = 0.0;
  std::vector<double> mu0;
  std::vector<double> mu1;

  std::size_t dim() const noexcept { return mu0.size(); }
  void validate() const;
};

LabeledGraph sample_csbm(const CsbmParams& params, RngSeed seed);

enum class FeatureShape { kGaussianUnitVariance, kUniformBounded };

// Per-class feature distribution. For the bounded shape each coordinate is
// uniform on [mean_k - s, mean_k + s] with s = bound - max_k |mean_k|, so
// every sampled coordinate has magnitude at most `bound`.
struct FeatureDistribution {
  std::vector<double> mean;
  FeatureShape shape = FeatureShape::kUniformBounded;
  double bound = 0.0;

  static FeatureDistribution uniform_bounded(std::vector<double> mean, double bound);
  // Zero-variance: every draw equals `value`.
  static FeatureDistribution constant(std::vector<double> value);
  static FeatureDistribution gaussian(std::vector<double> mean);

  std::size_t dim() const noexcept { return mean.size(); }
  double half_width() const;
  void sample(Rng& rng, std::span<double> out) const;
};

// Draws `degree` neighbor labels i.i.d. from dist, one feature vector per
// draw from the matching class distribution, and returns W * mean(features).
// W has shape (out x l).
std::vector<double> sample_assumption_neighborhood(
    const NeighborDistribution& dist, std::span<const FeatureDistribution> feats,
    std::size_t degree, const Matrix& w, Rng& rng);

std::vector<double> sample_assumption_neighborhood(
    const NeighborDistribution& dist, std::span<const FeatureDistribution> feats,
    std::size_t degree, const Matrix& w, RngSeed seed);

}  // namespace heterolab
