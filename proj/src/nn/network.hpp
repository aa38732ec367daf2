#pragma once

// Forward/backward passes shared by training and gradient checking.

#include <optional>
#include <vector>

#include "heterolab/nn.hpp"

namespace heterolab::nn::detail {

Matrix matmul(const Matrix& a, const Matrix& b);     // a * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // a^T * b
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // a * b^T

// Inverted-dropout scale factors (0 or 1/(1-rate)); empty when inactive.
Matrix dropout_mask(std::size_t rows, std::size_t cols, DropoutState dropout);
void apply_mask(Matrix& x, const Matrix& mask);

struct BranchCache {
  Matrix input;      // dropped input (MLP) or aggregated dropped input (GCN)
  Matrix pre;        // first-layer pre-activation
  Matrix mask1;      // hidden dropout scale, may be empty
  Matrix hidden;     // dropped rectified hidden layer
  Matrix logits;
};

BranchCache gcn_forward_cached(const Matrix& w0, const Matrix& w1, const Matrix& x,
                               const AggregationOperator& agg, DropoutState dropout);
BranchCache mlp_forward_cached(const Matrix& w0, const Matrix& w1, const Matrix& x,
                               DropoutState dropout);

struct BranchGrad {
  Matrix w0;
  Matrix w1;
};

// grad_logits is dLoss/dlogits for this branch.
BranchGrad gcn_backward(const Matrix& w1, const BranchCache& cache,
                        const Matrix& grad_logits, const AggregationOperator& agg);
BranchGrad mlp_backward(const Matrix& w1, const BranchCache& cache,
                        const Matrix& grad_logits);

struct Params {
  std::optional<GcnModel> gcn;
  std::optional<MlpModel> mlp;
};

struct Objective {
  double cross_entropy = 0.0;
  double total = 0.0;  // cross_entropy + decay
  Matrix logits;
  std::optional<BranchGrad> gcn_grad;
  std::optional<BranchGrad> mlp_grad;
};

struct ObjectiveInputs {
  const Matrix* features = nullptr;
  const AggregationOperator* agg = nullptr;
  std::span<const ClassId> labels;
  std::span<const NodeId> mask;
  double alpha = 1.0;
  double weight_decay = 0.0;
};

Objective evaluate(ModelKind kind, const Params& params, const ObjectiveInputs& in,
                   DropoutState gcn_dropout, DropoutState mlp_dropout, bool with_grad);

Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace heterolab::nn::detail
