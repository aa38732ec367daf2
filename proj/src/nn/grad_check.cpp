#include <algorithm>
#include <cmath>

#include "heterolab/error.hpp"
#include "heterolab/nn.hpp"
#include "network.hpp"

namespace heterolab::nn {
namespace {

constexpr double kRelativeFloor = 1e-3;
constexpr std::size_t kMaxNudges = 100;

// True when some rectifier input of a branch sits close enough to zero that
// a +-step change of one W0 entry could flip its sign. Columns of W0 that
// are entirely zero are skipped: their pre-activations are pinned at zero.
bool near_kink(const Matrix& input, const Matrix& w0, double step) {
  const Matrix pre = detail::matmul(input, w0);
  for (std::size_t j = 0; j < w0.cols(); ++j) {
    bool zero_col = true;
    for (std::size_t a = 0; a < w0.rows(); ++a) zero_col = zero_col && w0(a, j) == 0.0;
    if (zero_col) continue;
    for (std::size_t i = 0; i < input.rows(); ++i) {
      double reach = 0.0;
      for (double v : input.row(i)) reach = std::max(reach, std::abs(v));
      if (reach > 0.0 && std::abs(pre(i, j)) <= 2.0 * step * reach) return true;
    }
  }
  return false;
}

}  // namespace

GradCheckInstance make_grad_check_instance(std::size_t n, std::size_t l,
                                           std::size_t hidden, std::size_t classes,
                                           std::uint64_t seed) {
  Rng rng({seed, 0x67c});
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (rng.bernoulli(0.3)) edges.push_back({i, j});
    }
  }
  std::vector<ClassId> labels(n);
  for (auto& y : labels) y = static_cast<ClassId>(rng.below(classes));
  Matrix x(n, l);
  for (double& v : x.values()) v = rng.normal();

  GradCheckInstance inst;
  inst.graph = build_graph(edges, std::move(labels), std::move(x), classes);
  for (NodeId i = 0; i < n; ++i) inst.mask.push_back(i);
  inst.gcn.w0 = detail::glorot_uniform(l, hidden, rng);
  inst.gcn.w1 = detail::glorot_uniform(hidden, classes, rng);
  inst.mlp.w0 = detail::glorot_uniform(l, hidden, rng);
  inst.mlp.w1 = detail::glorot_uniform(hidden, classes, rng);
  inst.weight_decay = 5e-4;
  return inst;
}

GradCheckResult gradient_check(ModelKind kind, GradCheckInstance inst, double step) {
  if (!(step > 0.0)) throw ValidationError("finite-difference step must be positive");
  const AggregationOperator agg(inst.graph, inst.self_loops);
  GradCheckResult result;

  Rng nudge_rng({0x6e75646765, inst.graph.num_nodes()});
  Matrix x = inst.graph.features();
  for (;;) {
    bool kink = false;
    if (kind != ModelKind::kMlp) kink = kink || near_kink(agg.apply(x), inst.gcn.w0, step);
    if (kind != ModelKind::kGcn) kink = kink || near_kink(x, inst.mlp.w0, step);
    if (!kink || result.kink_nudges >= kMaxNudges) break;
    for (double& v : x.values()) v += 0.05 * nudge_rng.normal();
    ++result.kink_nudges;
  }

  detail::Params params;
  if (kind != ModelKind::kMlp) params.gcn = inst.gcn;
  if (kind != ModelKind::kGcn) params.mlp = inst.mlp;
  detail::ObjectiveInputs in;
  in.features = &x;
  in.agg = &agg;
  in.labels = inst.graph.labels();
  in.mask = inst.mask;
  in.alpha = inst.alpha;
  in.weight_decay = inst.weight_decay;

  const detail::Objective analytic = detail::evaluate(kind, params, in, {}, {}, true);

  std::vector<std::pair<Matrix*, const Matrix*>> pairs;
  if (params.gcn) {
    pairs.emplace_back(&params.gcn->w0, &analytic.gcn_grad->w0);
    pairs.emplace_back(&params.gcn->w1, &analytic.gcn_grad->w1);
  }
  if (params.mlp) {
    pairs.emplace_back(&params.mlp->w0, &analytic.mlp_grad->w0);
    pairs.emplace_back(&params.mlp->w1, &analytic.mlp_grad->w1);
  }
  for (auto [w, grad] : pairs) {
    auto ws = w->values();
    auto gs = grad->values();
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const double saved = ws[i];
      ws[i] = saved + step;
      const double up = detail::evaluate(kind, params, in, {}, {}, false).total;
      ws[i] = saved - step;
      const double down = detail::evaluate(kind, params, in, {}, {}, false).total;
      ws[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double denom = std::max({std::abs(gs[i]), std::abs(numeric), kRelativeFloor});
      result.max_relative_error =
          std::max(result.max_relative_error, std::abs(gs[i] - numeric) / denom);
      ++result.parameters;
    }
  }
  return result;
}

}  // namespace heterolab::nn
