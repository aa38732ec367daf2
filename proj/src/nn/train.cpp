#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "heterolab/error.hpp"
#include "heterolab/nn.hpp"
#include "network.hpp"

namespace heterolab::nn {
namespace {

// Stream ids under TrainConfig::seed. The two branches never share a stream,
// so a blend at alpha = 1 replays the pure GCN run exactly.
constexpr std::uint64_t kGcnInitStream = 1;
constexpr std::uint64_t kMlpInitStream = 2;
constexpr std::uint64_t kGcnDropoutStream = 3;
constexpr std::uint64_t kMlpDropoutStream = 4;
constexpr std::uint64_t kSplitStream = 0x5eed5;

class Adam {
 public:
  explicit Adam(double lr) : lr_(lr) {}

  void track(Matrix& w) { slots_.push_back({&w, Matrix(w.rows(), w.cols()), Matrix(w.rows(), w.cols())}); }

  // grads must be given in the order the weights were tracked.
  void step(std::span<const Matrix* const> grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      auto w = slots_[s].w->values();
      auto m = slots_[s].m.values();
      auto v = slots_[s].v.values();
      auto g = grads[s]->values();
      for (std::size_t i = 0; i < w.size(); ++i) {
        m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
        v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
        const double m_hat = m[i] / c1;
        const double v_hat = v[i] / c2;
        w[i] -= lr_ * m_hat / (std::sqrt(v_hat) + kEps);
      }
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  struct Slot {
    Matrix* w;
    Matrix m;
    Matrix v;
  };
  double lr_;
  std::size_t t_ = 0;
  std::vector<Slot> slots_;
};

void check_split(const Split& split, std::size_t n) {
  std::vector<char> seen(n, 0);
  for (const auto* part : {&split.train, &split.val, &split.test}) {
    for (NodeId i : *part) {
      if (i >= n) throw ValidationError("split references node outside the graph");
      if (seen[i]++) throw ValidationError("split sets overlap");
    }
  }
  if (split.train.empty() || split.val.empty() || split.test.empty()) {
    throw ValidationError("split has an empty part");
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !(weight_decay >= 0.0)) {
    throw ValidationError("learning rate and weight decay must be nonnegative");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ValidationError("dropout must lie in [0, 1)");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
  if (hidden == 0) throw ValidationError("hidden width must be positive");
  if (epochs == 0) throw ValidationError("epochs must be positive");
}

Split random_split(std::size_t n, std::uint64_t seed) {
  if (n < 5) throw ValidationError("random split needs at least 5 nodes, got " + std::to_string(n));
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  Rng rng({seed, kSplitStream});
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng.below(i + 1)]);
  }
  const std::size_t n_val = (32 * n + 50) / 100;
  const std::size_t n_test = (20 * n + 50) / 100;
  const std::size_t n_train = n - n_val - n_test;
  Split s;
  s.train.assign(perm.begin(), perm.begin() + n_train);
  s.val.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
  s.test.assign(perm.begin() + n_train + n_val, perm.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

TrainReport train(const LabeledGraph& g, const TrainConfig& config, ModelKind kind,
                  const Split& split, std::size_t split_id) {
  config.validate();
  if (!g.has_features()) throw ValidationError("training requires node features");
  check_split(split, g.num_nodes());
  const Matrix& x = g.features();
  const std::size_t l = x.cols();
  const std::size_t classes = g.num_classes();

  detail::Params params;
  if (kind != ModelKind::kMlp) {
    Rng init({config.seed, kGcnInitStream});
    GcnModel m;
    m.w0 = detail::glorot_uniform(l, config.hidden, init);
    m.w1 = detail::glorot_uniform(config.hidden, classes, init);
    params.gcn = std::move(m);
  }
  if (kind != ModelKind::kGcn) {
    Rng init({config.seed, kMlpInitStream});
    MlpModel m;
    m.w0 = detail::glorot_uniform(l, config.hidden, init);
    m.w1 = detail::glorot_uniform(config.hidden, classes, init);
    params.mlp = std::move(m);
  }

  Adam adam(config.learning_rate);
  if (params.gcn) {
    adam.track(params.gcn->w0);
    adam.track(params.gcn->w1);
  }
  if (params.mlp) {
    adam.track(params.mlp->w0);
    adam.track(params.mlp->w1);
  }

  const AggregationOperator agg(g, config.self_loops);
  detail::ObjectiveInputs in;
  in.features = &x;
  in.agg = &agg;
  in.labels = g.labels();
  in.mask = split.train;
  in.alpha = kind == ModelKind::kGcn ? 1.0 : kind == ModelKind::kMlp ? 0.0 : config.alpha;
  in.weight_decay = config.weight_decay;

  Rng gcn_drop_rng({config.seed, kGcnDropoutStream});
  Rng mlp_drop_rng({config.seed, kMlpDropoutStream});
  const DropoutState gcn_drop{config.dropout, &gcn_drop_rng};
  const DropoutState mlp_drop{config.dropout, &mlp_drop_rng};

  TrainReport report;
  report.model = kind;
  report.seed = config.seed;
  report.split_id = split_id;
  report.alpha = in.alpha;
  double best_val = -1.0;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const detail::Objective obj = detail::evaluate(kind, params, in, gcn_drop, mlp_drop, true);
    if (!std::isfinite(obj.total)) {
      throw NumericalError("non-finite training loss at epoch " + std::to_string(epoch));
    }
    std::vector<const Matrix*> grads;
    if (obj.gcn_grad) {
      grads.push_back(&obj.gcn_grad->w0);
      grads.push_back(&obj.gcn_grad->w1);
    }
    if (obj.mlp_grad) {
      grads.push_back(&obj.mlp_grad->w0);
      grads.push_back(&obj.mlp_grad->w1);
    }
    adam.step(grads);

    const detail::Objective eval = detail::evaluate(kind, params, in, {}, {}, false);
    const double val_acc = accuracy(eval.logits, g.labels(), split.val);
    report.history.push_back({epoch, obj.cross_entropy, val_acc});
    if (val_acc > best_val) {
      best_val = val_acc;
      report.best_epoch = epoch;
      report.best_val_accuracy = val_acc;
      report.test_accuracy = accuracy(eval.logits, g.labels(), split.test);
      since_best = 0;
    } else if (++since_best >= config.patience && config.patience > 0) {
      break;
    }
  }
  return report;
}

GridResult grid_search(const LabeledGraph& g, const TrainConfig& base, ModelKind kind,
                       const Split& split, const GridSpec& grid) {
  GridResult result;
  bool have = false;
  for (double lr : grid.learning_rates) {
    for (double wd : grid.weight_decays) {
      for (double dropout : grid.dropouts) {
        TrainConfig cfg = base;
        cfg.learning_rate = lr;
        cfg.weight_decay = wd;
        cfg.dropout = dropout;
        TrainReport r = train(g, cfg, kind, split);
        ++result.evaluated;
        if (!have || r.best_val_accuracy > result.best_report.best_val_accuracy) {
          result.best_config = cfg;
          result.best_report = std::move(r);
          have = true;
        }
      }
    }
  }
  if (!have) throw ValidationError("hyperparameter grid is empty");
  return result;
}

}  // namespace heterolab::nn
