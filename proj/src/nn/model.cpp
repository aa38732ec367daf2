#include <algorithm>
#include <cmath>
#include <string>

#include "heterolab/error.hpp"
#include "heterolab/nn.hpp"
#include "network.hpp"

namespace heterolab::nn {
namespace detail {

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ValidationError("shape mismatch: (" + std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()) + ") * (" + std::to_string(b.rows()) +
                          "x" + std::to_string(b.cols()) + ")");
  }
  Matrix c(a.rows(), b.cols());
  kernels::active().gemm_nn(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ValidationError("shape mismatch in A^T * B");
  Matrix c(a.cols(), b.cols());
  kernels::active().gemm_tn(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ValidationError("shape mismatch in A * B^T");
  Matrix c(a.rows(), b.rows());
  kernels::active().gemm_nt(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.rows());
  return c;
}

Matrix dropout_mask(std::size_t rows, std::size_t cols, DropoutState dropout) {
  if (!dropout.active()) return {};
  Matrix mask(rows, cols);
  const double keep_scale = 1.0 / (1.0 - dropout.rate);
  for (double& m : mask.values()) {
    m = dropout.rng->uniform01() < dropout.rate ? 0.0 : keep_scale;
  }
  return mask;
}

void apply_mask(Matrix& x, const Matrix& mask) {
  if (mask.empty()) return;
  auto xs = x.values();
  auto ms = mask.values();
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] *= ms[i];
}

namespace {

void relu_in_place(Matrix& m) {
  for (double& v : m.values()) v = v > 0.0 ? v : 0.0;
}

void check_weights(const Matrix& w0, const Matrix& w1, const Matrix& x) {
  if (w0.rows() != x.cols()) {
    throw ValidationError("shape mismatch: W0 has " + std::to_string(w0.rows()) +
                          " rows, features have " + std::to_string(x.cols()) + " columns");
  }
  if (w1.rows() != w0.cols()) {
    throw ValidationError("shape mismatch: W1 rows must equal W0 columns");
  }
}

Matrix hidden_grad(const Matrix& w1, const BranchCache& cache, const Matrix& grad_out) {
  Matrix g = matmul_nt(grad_out, w1);
  apply_mask(g, cache.mask1);
  auto gs = g.values();
  auto ps = cache.pre.values();
  for (std::size_t i = 0; i < gs.size(); ++i) {
    if (!(ps[i] > 0.0)) gs[i] = 0.0;
  }
  return g;
}

double half_sq_norm(const Matrix& w) {
  double s = 0.0;
  for (double v : w.values()) s += v * v;
  return 0.5 * s;
}

void add_decay(Matrix& grad, const Matrix& w, double wd) {
  if (wd == 0.0) return;
  auto gs = grad.values();
  auto ws = w.values();
  for (std::size_t i = 0; i < gs.size(); ++i) gs[i] += wd * ws[i];
}

Matrix scaled(const Matrix& m, double s) {
  Matrix out = m;
  for (double& v : out.values()) v *= s;
  return out;
}

}  // namespace

BranchCache gcn_forward_cached(const Matrix& w0, const Matrix& w1, const Matrix& x,
                               const AggregationOperator& agg, DropoutState dropout) {
  check_weights(w0, w1, x);
  BranchCache c;
  Matrix dropped = x;
  apply_mask(dropped, dropout_mask(x.rows(), x.cols(), dropout));
  // Aggregate before the first transform (l is usually small) and after the
  // second (C is small).
  c.input = agg.apply(dropped);
  c.pre = matmul(c.input, w0);
  c.hidden = c.pre;
  relu_in_place(c.hidden);
  c.mask1 = dropout_mask(c.hidden.rows(), c.hidden.cols(), dropout);
  apply_mask(c.hidden, c.mask1);
  c.logits = agg.apply(matmul(c.hidden, w1));
  return c;
}

BranchCache mlp_forward_cached(const Matrix& w0, const Matrix& w1, const Matrix& x,
                               DropoutState dropout) {
  check_weights(w0, w1, x);
  BranchCache c;
  c.input = x;
  apply_mask(c.input, dropout_mask(x.rows(), x.cols(), dropout));
  c.pre = matmul(c.input, w0);
  c.hidden = c.pre;
  relu_in_place(c.hidden);
  c.mask1 = dropout_mask(c.hidden.rows(), c.hidden.cols(), dropout);
  apply_mask(c.hidden, c.mask1);
  c.logits = matmul(c.hidden, w1);
  return c;
}

BranchGrad gcn_backward(const Matrix& w1, const BranchCache& cache,
                        const Matrix& grad_logits, const AggregationOperator& agg) {
  const Matrix grad_s1 = agg.apply_transposed(grad_logits);
  BranchGrad g;
  g.w1 = matmul_tn(cache.hidden, grad_s1);
  g.w0 = matmul_tn(cache.input, hidden_grad(w1, cache, grad_s1));
  return g;
}

BranchGrad mlp_backward(const Matrix& w1, const BranchCache& cache,
                        const Matrix& grad_logits) {
  BranchGrad g;
  g.w1 = matmul_tn(cache.hidden, grad_logits);
  g.w0 = matmul_tn(cache.input, hidden_grad(w1, cache, grad_logits));
  return g;
}

Objective evaluate(ModelKind kind, const Params& params, const ObjectiveInputs& in,
                   DropoutState gcn_dropout, DropoutState mlp_dropout, bool with_grad) {
  Objective obj;
  std::optional<BranchCache> gcn_cache, mlp_cache;
  if (kind != ModelKind::kMlp) {
    gcn_cache = gcn_forward_cached(params.gcn->w0, params.gcn->w1, *in.features, *in.agg,
                                   gcn_dropout);
  }
  if (kind != ModelKind::kGcn) {
    mlp_cache = mlp_forward_cached(params.mlp->w0, params.mlp->w1, *in.features, mlp_dropout);
  }
  switch (kind) {
    case ModelKind::kGcn: obj.logits = gcn_cache->logits; break;
    case ModelKind::kMlp: obj.logits = mlp_cache->logits; break;
    case ModelKind::kBlend:
      obj.logits = blend(gcn_cache->logits, mlp_cache->logits, in.alpha);
      break;
  }

  LossAndGrad ce = softmax_cross_entropy(obj.logits, in.labels, in.mask);
  obj.cross_entropy = ce.loss;
  double decay = 0.0;
  if (params.gcn && kind != ModelKind::kMlp) {
    decay += half_sq_norm(params.gcn->w0) + half_sq_norm(params.gcn->w1);
  }
  if (params.mlp && kind != ModelKind::kGcn) {
    decay += half_sq_norm(params.mlp->w0) + half_sq_norm(params.mlp->w1);
  }
  obj.total = ce.loss + in.weight_decay * decay;
  if (!with_grad) return obj;

  if (gcn_cache) {
    const Matrix g = kind == ModelKind::kBlend ? scaled(ce.grad, in.alpha) : ce.grad;
    obj.gcn_grad = gcn_backward(params.gcn->w1, *gcn_cache, g, *in.agg);
    add_decay(obj.gcn_grad->w0, params.gcn->w0, in.weight_decay);
    add_decay(obj.gcn_grad->w1, params.gcn->w1, in.weight_decay);
  }
  if (mlp_cache) {
    const Matrix g = kind == ModelKind::kBlend ? scaled(ce.grad, 1.0 - in.alpha) : ce.grad;
    obj.mlp_grad = mlp_backward(params.mlp->w1, *mlp_cache, g);
    add_decay(obj.mlp_grad->w0, params.mlp->w0, in.weight_decay);
    add_decay(obj.mlp_grad->w1, params.mlp->w1, in.weight_decay);
  }
  return obj;
}

Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  Matrix w(fan_in, fan_out);
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : w.values()) v = limit * (2.0 * rng.uniform01() - 1.0);
  return w;
}

}  // namespace detail

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kGcn: return "gcn";
    case ModelKind::kMlp: return "mlp";
    case ModelKind::kBlend: return "blend";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "gcn") return ModelKind::kGcn;
  if (name == "mlp") return ModelKind::kMlp;
  if (name == "blend") return ModelKind::kBlend;
  throw ValidationError("unknown model kind '" + std::string(name) + "'");
}

Matrix gcn_forward(const GcnModel& model, const Matrix& x, const AggregationOperator& agg,
                   DropoutState dropout) {
  return detail::gcn_forward_cached(model.w0, model.w1, x, agg, dropout).logits;
}

Matrix mlp_forward(const MlpModel& model, const Matrix& x, DropoutState dropout) {
  return detail::mlp_forward_cached(model.w0, model.w1, x, dropout).logits;
}

Matrix blend(const Matrix& h_gcn, const Matrix& h_mlp, double alpha) {
  if (h_gcn.rows() != h_mlp.rows() || h_gcn.cols() != h_mlp.cols()) {
    throw ValidationError("blend inputs must have the same shape");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("alpha must lie in [0, 1]");
  }
  Matrix out(h_gcn.rows(), h_gcn.cols());
  auto o = out.values();
  auto a = h_gcn.values();
  auto b = h_mlp.values();
  const double beta = 1.0 - alpha;
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = alpha * a[i] + beta * b[i];
  return out;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto z = logits.row(r);
    auto out = p.row(r);
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < z.size(); ++c) {
      out[c] = std::exp(z[c] - mx);
      sum += out[c];
    }
    for (double& v : out) v /= sum;
  }
  return p;
}

LossAndGrad softmax_cross_entropy(const Matrix& logits, std::span<const ClassId> labels,
                                  std::span<const NodeId> mask) {
  if (mask.empty()) throw ValidationError("loss mask is empty");
  if (labels.size() != logits.rows()) {
    throw ValidationError("label count does not match logits rows");
  }
  LossAndGrad out;
  out.grad = Matrix(logits.rows(), logits.cols());
  const double inv = 1.0 / static_cast<double>(mask.size());
  double total = 0.0;
  for (NodeId i : mask) {
    if (i >= logits.rows()) throw ValidationError("mask node out of range");
    const ClassId y = labels[i];
    if (y >= logits.cols()) throw ValidationError("label out of range for logits");
    const auto z = logits.row(i);
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - mx);
    const double log_sum = std::log(sum);
    total += log_sum - (z[y] - mx);
    auto g = out.grad.row(i);
    for (std::size_t c = 0; c < z.size(); ++c) {
      g[c] = std::exp(z[c] - mx - log_sum) * inv;
    }
    g[y] -= inv;
  }
  out.loss = total * inv;
  return out;
}

double accuracy(const Matrix& logits, std::span<const ClassId> labels,
                std::span<const NodeId> mask) {
  if (mask.empty()) return 0.0;
  std::size_t correct = 0;
  for (NodeId i : mask) {
    const auto z = logits.row(i);
    const auto pred = static_cast<ClassId>(std::max_element(z.begin(), z.end()) - z.begin());
    if (pred == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(mask.size());
}

}  // namespace heterolab::nn
