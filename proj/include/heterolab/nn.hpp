#pragma once

// Dense two-layer GCN / MLP / blended models trained full-batch with Adam.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heterolab/graph.hpp"
#include "heterolab/kernels.hpp"
#include "heterolab/matrix.hpp"
#include "heterolab/rng.hpp"

namespace heterolab::nn {

// Row-normalized adjacency D^-1 A, optionally with self-loops added before
// normalization. Rows of isolated nodes (no self-loop) are all zero. Stored
// as CSR together with its transpose for the backward pass.
class AggregationOperator {
 public:
  AggregationOperator() = default;
  AggregationOperator(const LabeledGraph& g, bool self_loops);

  std::size_t size() const noexcept { return rows_; }
  bool self_loops() const noexcept { return self_loops_; }

  // A_hat * x
  Matrix apply(const Matrix& x) const;
  // A_hat^T * x
  Matrix apply_transposed(const Matrix& x) const;

  kernels::CsrView view() const;
  kernels::CsrView transposed_view() const;
  // Dense copy, for tests and small graphs.
  Matrix dense() const;

 private:
  std::size_t rows_ = 0;
  bool self_loops_ = false;
  std::vector<std::uint64_t> offsets_, t_offsets_;
  std::vector<std::uint32_t> cols_, t_cols_;
  std::vector<double> vals_, t_vals_;
};

AggregationOperator build_aggregator(const LabeledGraph& g, bool self_loops);

// Weights of a two-layer network: w0 is (l x h), w1 is (h x C).
struct GcnModel {
  Matrix w0;
  Matrix w1;
  friend bool operator==(const GcnModel&, const GcnModel&) = default;
};

struct MlpModel {
  Matrix w0;
  Matrix w1;
  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

enum class ModelKind { kGcn, kMlp, kBlend };

std::string_view model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

// Training-mode inverted dropout. A null rng or rate 0 disables it.
struct DropoutState {
  double rate = 0.0;
  Rng* rng = nullptr;
  bool active() const noexcept { return rng != nullptr && rate > 0.0; }
};

// logits = A_hat * relu(A_hat * drop(X) * W0) dropped * W1
Matrix gcn_forward(const GcnModel& model, const Matrix& x,
                   const AggregationOperator& agg, DropoutState dropout = {});
// logits = relu(drop(X) * W0) dropped * W1
Matrix mlp_forward(const MlpModel& model, const Matrix& x, DropoutState dropout = {});

// alpha * h_gcn + (1 - alpha) * h_mlp
Matrix blend(const Matrix& h_gcn, const Matrix& h_mlp, double alpha);

struct LossAndGrad {
  double loss = 0.0;
  Matrix grad;  // same shape as logits, zero outside the mask
};

// Mean negative log-likelihood of the softmax over the masked rows.
LossAndGrad softmax_cross_entropy(const Matrix& logits, std::span<const ClassId> labels,
                                  std::span<const NodeId> mask);

Matrix softmax_rows(const Matrix& logits);

struct Split {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
};

// Seeded permutation cut into 48/32/20%. Validation and test sizes are
// 32% and 20% of n rounded to nearest; training takes the remainder.
Split random_split(std::size_t n, std::uint64_t seed);

struct TrainConfig {
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  double dropout = 0.5;
  std::size_t epochs = 200;
  std::size_t patience = 50;
  std::size_t hidden = 64;
  std::uint64_t seed = 0;
  double alpha = 1.0;  // blend weight on the GCN branch
  bool self_loops = true;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;  // training cross-entropy, without the decay term
  double val_acc = 0.0;
  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainReport {
  ModelKind model = ModelKind::kGcn;
  std::uint64_t seed = 0;
  std::size_t split_id = 0;
  double alpha = 1.0;
  std::size_t best_epoch = 0;
  double best_val_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::vector<EpochRecord> history;
};

// Full-batch Adam (beta1 0.9, beta2 0.999, eps 1e-8) on cross-entropy plus
// weight_decay * 1/2 ||W||^2 over every weight matrix of the model. Returns
// the test accuracy at the epoch with the best validation accuracy (first
// one on ties), stopping after `patience` epochs without improvement.
// Deterministic given config.seed. Throws NumericalError on a NaN loss.
TrainReport train(const LabeledGraph& g, const TrainConfig& config, ModelKind kind,
                  const Split& split, std::size_t split_id = 0);

double accuracy(const Matrix& logits, std::span<const ClassId> labels,
                std::span<const NodeId> mask);

// Default tuning grid: 4 x 7 x 4 = 112 configurations.
struct GridSpec {
  std::vector<double> learning_rates{0.002, 0.005, 0.01, 0.05};
  std::vector<double> weight_decays{5e-4, 5e-5, 5e-6, 5e-7, 5e-8, 1e-5, 0.0};
  std::vector<double> dropouts{0.0, 0.2, 0.5, 0.8};
};

struct GridResult {
  TrainConfig best_config;
  TrainReport best_report;
  std::size_t evaluated = 0;
};

// Picks the grid point with the highest best-epoch validation accuracy.
GridResult grid_search(const LabeledGraph& g, const TrainConfig& base, ModelKind kind,
                       const Split& split, const GridSpec& grid = {});

// Everything needed to evaluate the training objective on a small graph.
struct GradCheckInstance {
  LabeledGraph graph;
  std::vector<NodeId> mask;
  GcnModel gcn;
  MlpModel mlp;
  double alpha = 0.5;
  double weight_decay = 0.0;
  bool self_loops = true;
};

// Random graph, features, mask and Glorot-initialized weights.
GradCheckInstance make_grad_check_instance(std::size_t n, std::size_t l,
                                           std::size_t hidden, std::size_t classes,
                                           std::uint64_t seed);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t parameters = 0;
  std::size_t kink_nudges = 0;
};

// Compares the analytic gradient of the training objective against central
// differences with the given step, for every weight of the chosen model.
// Relative error is |a - n| / max(|a|, |n|, 1e-3). Features are nudged
// until no rectifier input can cross zero under a +-step perturbation.
GradCheckResult gradient_check(ModelKind kind, GradCheckInstance instance, double step);

}  // namespace heterolab::nn
