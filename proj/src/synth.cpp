#include "heterolab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "heterolab/error.hpp"
#include "heterolab/kernels.hpp"

namespace heterolab {
namespace {

std::uint64_t edge_key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t{a} << 32) | b;
}

void check_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(std::string(name) + " must lie in [0, 1], got " +
                          std::to_string(v));
  }
}

LabeledGraph add_edges_impl(const LabeledGraph& g, std::size_t k,
                            std::span<const NeighborDistribution> dists, double gamma,
                            RngSeed seed) {
  const std::size_t classes = g.num_classes();
  if (dists.size() != classes) {
    throw ValidationError("expected " + std::to_string(classes) +
                          " neighbor distributions, got " + std::to_string(dists.size()));
  }
  for (const auto& d : dists) {
    if (d.num_classes() != classes) {
      throw ValidationError("neighbor distribution has " +
                            std::to_string(d.num_classes()) + " entries, expected " +
                            std::to_string(classes));
    }
  }
  check_probability(gamma, "gamma");
  if (gamma > 0.0 && classes < 2) {
    throw ValidationError("noisy edge addition needs at least two classes");
  }
  if (k == 0) return g;
  const std::size_t n = g.num_nodes();
  if (n < 2) throw ValidationError("cannot add edges to a graph with fewer than 2 nodes");

  std::unordered_set<std::uint64_t> present;
  present.reserve((g.num_edges() + k) * 2);
  std::vector<Edge> edges = g.edge_list();
  for (const Edge& e : edges) present.insert(edge_key(e.u, e.v));

  Rng rng(seed);
  const std::size_t max_draws = 1000 * k;
  std::size_t added = 0;
  std::size_t draws = 0;
  while (added < k) {
    if (draws++ >= max_draws) {
      throw ValidationError("could not place " + std::to_string(k) + " new edges within " +
                            std::to_string(max_draws) + " draws (placed " +
                            std::to_string(added) + ")");
    }
    const auto i = static_cast<NodeId>(rng.below(n));
    const ClassId yi = g.label(i);
    ClassId c;
    if (gamma > 0.0 && rng.uniform01() < gamma) {
      c = static_cast<ClassId>(rng.below(classes - 1));
      if (c >= yi) ++c;
    } else {
      c = dists[yi].sample(rng);
    }
    const auto members = g.class_members(c);
    if (members.empty()) {
      throw ValidationError("sampled class " + std::to_string(c) + " has no nodes");
    }
    const NodeId j = members[rng.below(members.size())];
    if (i == j) continue;
    if (!present.insert(edge_key(i, j)).second) continue;
    edges.push_back({i, j});
    ++added;
  }

  std::optional<Matrix> features;
  if (g.has_features()) features = g.features();
  return build_graph(edges, std::vector<ClassId>(g.labels().begin(), g.labels().end()),
                     std::move(features), classes);
}

}  // namespace

NeighborDistribution::NeighborDistribution(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw ValidationError("neighbor distribution is empty");
  double total = 0.0;
  cumulative_.reserve(weights_.size());
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("neighbor distribution weights must be finite and nonnegative");
    }
    total += w;
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("neighbor distribution weights sum to " + std::to_string(total) +
                          ", expected 1");
  }
}

ClassId NeighborDistribution::sample(Rng& rng) const {
  const double u = rng.uniform01();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) {
    // Rounding left the final prefix sum just under u: take the last class
    // with positive mass.
    std::size_t c = weights_.size() - 1;
    while (weights_[c] == 0.0) --c;
    return static_cast<ClassId>(c);
  }
  return static_cast<ClassId>(it - cumulative_.begin());
}

std::vector<NeighborDistribution> circulant_two_hop(std::size_t num_classes) {
  if (num_classes < 3) {
    throw ValidationError("circulant preset needs at least 3 classes");
  }
  std::vector<NeighborDistribution> out;
  out.reserve(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    std::vector<double> w(num_classes, 0.0);
    w[(c + 1) % num_classes] = 0.5;
    w[(c + num_classes - 1) % num_classes] = 0.5;
    out.emplace_back(std::move(w));
  }
  return out;
}

bool is_cross_label_only(std::span<const NeighborDistribution> dists) {
  for (std::size_t c = 0; c < dists.size(); ++c) {
    if (c < dists[c].num_classes() && dists[c].weights()[c] != 0.0) return false;
  }
  return true;
}

LabeledGraph add_heterophilous_edges(const LabeledGraph& g, std::size_t k,
                                     std::span<const NeighborDistribution> dists,
                                     RngSeed seed) {
  return add_edges_impl(g, k, dists, 0.0, seed);
}

LabeledGraph add_heterophilous_edges_noisy(const LabeledGraph& g, std::size_t k,
                                           std::span<const NeighborDistribution> dists,
                                           double gamma, RngSeed seed) {
  return add_edges_impl(g, k, dists, gamma, seed);
}

LabeledGraph sample_sbm(const SbmParams& params, RngSeed seed) {
  check_probability(params.p, "p");
  check_probability(params.q, "q");
  const std::size_t classes = params.class_sizes.size();
  if (classes == 0) throw ValidationError("SBM needs at least one class");
  for (std::size_t s : params.class_sizes) {
    if (s == 0) throw ValidationError("SBM class sizes must be at least 1");
  }
  const bool with_features = params.means.cols() > 0;
  if (with_features && params.means.rows() != classes) {
    throw ValidationError("SBM means need one row per class");
  }

  std::vector<ClassId> labels;
  for (std::size_t c = 0; c < classes; ++c) {
    labels.insert(labels.end(), params.class_sizes[c], static_cast<ClassId>(c));
  }
  const std::size_t n = labels.size();

  Rng edge_rng(seed.derive(0));
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const double prob = labels[i] == labels[j] ? params.p : params.q;
      if (edge_rng.bernoulli(prob)) edges.push_back({i, j});
    }
  }

  std::optional<Matrix> features;
  if (with_features) {
    Rng feat_rng(seed.derive(1));
    const std::size_t l = params.means.cols();
    Matrix x(n, l);
    for (std::size_t i = 0; i < n; ++i) {
      const auto mu = params.means.row(labels[i]);
      for (std::size_t k = 0; k < l; ++k) x(i, k) = mu[k] + feat_rng.normal();
    }
    features = std::move(x);
  }
  return build_graph(edges, std::move(labels), std::move(features), classes);
}

void CsbmParams::validate() const {
  check_probability(p, "p");
  check_probability(q, "q");
  if (n0 == 0 || n1 == 0) throw ValidationError("CSBM class sizes must be at least 1");
  if (mu0.size() != mu1.size()) {
    throw ValidationError("CSBM means must have the same dimension");
  }
}

LabeledGraph sample_csbm(const CsbmParams& params, RngSeed seed) {
  params.validate();
  SbmParams sbm;
  sbm.class_sizes = {params.n0, params.n1};
  sbm.p = params.p;
  sbm.q = params.q;
  const std::size_t l = params.dim();
  sbm.means = Matrix(2, l);
  for (std::size_t k = 0; k < l; ++k) {
    sbm.means(0, k) = params.mu0[k];
    sbm.means(1, k) = params.mu1[k];
  }
  return sample_sbm(sbm, seed);
}

FeatureDistribution FeatureDistribution::uniform_bounded(std::vector<double> mean,
                                                         double bound) {
  FeatureDistribution f{std::move(mean), FeatureShape::kUniformBounded, bound};
  if (!(bound > 0.0)) throw ValidationError("feature bound B must be positive");
  if (f.half_width() < 0.0) {
    throw ValidationError("feature mean exceeds the bound B");
  }
  return f;
}

FeatureDistribution FeatureDistribution::constant(std::vector<double> value) {
  double b = 0.0;
  for (double v : value) b = std::max(b, std::abs(v));
  return {std::move(value), FeatureShape::kUniformBounded, b};
}

FeatureDistribution FeatureDistribution::gaussian(std::vector<double> mean) {
  return {std::move(mean), FeatureShape::kGaussianUnitVariance, 0.0};
}

double FeatureDistribution::half_width() const {
  double m = 0.0;
  for (double v : mean) m = std::max(m, std::abs(v));
  return bound - m;
}

void FeatureDistribution::sample(Rng& rng, std::span<double> out) const {
  if (shape == FeatureShape::kGaussianUnitVariance) {
    for (std::size_t k = 0; k < mean.size(); ++k) out[k] = mean[k] + rng.normal();
    return;
  }
  const double s = half_width();
  if (s == 0.0) {
    std::copy(mean.begin(), mean.end(), out.begin());
    return;
  }
  for (std::size_t k = 0; k < mean.size(); ++k) {
    out[k] = mean[k] + s * (2.0 * rng.uniform01() - 1.0);
  }
}

std::vector<double> sample_assumption_neighborhood(
    const NeighborDistribution& dist, std::span<const FeatureDistribution> feats,
    std::size_t degree, const Matrix& w, Rng& rng) {
  if (degree == 0) throw ValidationError("degree must be at least 1");
  if (feats.size() != dist.num_classes()) {
    throw ValidationError("need one feature distribution per class");
  }
  const std::size_t l = w.cols();
  for (const auto& f : feats) {
    if (f.dim() != l) throw ValidationError("W columns must match feature dimension");
  }
  const auto& k = kernels::active();
  std::vector<double> sum(l, 0.0);
  std::vector<double> x(l);
  for (std::size_t d = 0; d < degree; ++d) {
    const ClassId c = dist.sample(rng);
    feats[c].sample(rng, x);
    for (std::size_t j = 0; j < l; ++j) sum[j] += x[j];
  }
  const double inv = 1.0 / static_cast<double>(degree);
  for (double& v : sum) v *= inv;
  std::vector<double> out(w.rows());
  for (std::size_t r = 0; r < w.rows(); ++r) out[r] = k.dot(w.row(r).data(), sum.data(), l);
  return out;
}

std::vector<double> sample_assumption_neighborhood(
    const NeighborDistribution& dist, std::span<const FeatureDistribution> feats,
    std::size_t degree, const Matrix& w, RngSeed seed) {
  Rng rng(seed);
  return sample_assumption_neighborhood(dist, feats, degree, w, rng);
}

}  // namespace heterolab
