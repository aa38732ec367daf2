#include <string>

#include "heterolab/error.hpp"
#include "heterolab/nn.hpp"

namespace heterolab::nn {

AggregationOperator::AggregationOperator(const LabeledGraph& g, bool self_loops)
    : rows_(g.num_nodes()), self_loops_(self_loops) {
  offsets_.assign(rows_ + 1, 0);
  for (NodeId i = 0; i < rows_; ++i) {
    const auto nb = g.neighbors(i);
    const std::size_t deg = nb.size() + (self_loops ? 1 : 0);
    offsets_[i + 1] = offsets_[i] + deg;
    if (deg == 0) continue;
    const double w = 1.0 / static_cast<double>(deg);
    bool placed_self = !self_loops;
    // Keep column indices increasing with the self entry in order.
    for (NodeId j : nb) {
      if (!placed_self && i < j) {
        cols_.push_back(i);
        vals_.push_back(w);
        placed_self = true;
      }
      cols_.push_back(j);
      vals_.push_back(w);
    }
    if (!placed_self) {
      cols_.push_back(i);
      vals_.push_back(w);
    }
  }

  t_offsets_.assign(rows_ + 1, 0);
  for (std::uint32_t c : cols_) ++t_offsets_[c + 1];
  for (std::size_t i = 0; i < rows_; ++i) t_offsets_[i + 1] += t_offsets_[i];
  t_cols_.resize(cols_.size());
  t_vals_.resize(vals_.size());
  std::vector<std::uint64_t> cursor(t_offsets_.begin(), t_offsets_.end() - 1);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (auto e = offsets_[r]; e < offsets_[r + 1]; ++e) {
      const auto slot = cursor[cols_[e]]++;
      t_cols_[slot] = static_cast<std::uint32_t>(r);
      t_vals_[slot] = vals_[e];
    }
  }
}

kernels::CsrView AggregationOperator::view() const {
  return {rows_, offsets_, cols_, vals_};
}

kernels::CsrView AggregationOperator::transposed_view() const {
  return {rows_, t_offsets_, t_cols_, t_vals_};
}

Matrix AggregationOperator::apply(const Matrix& x) const {
  if (x.rows() != rows_) {
    throw ValidationError("aggregation expects " + std::to_string(rows_) + " rows, got " +
                          std::to_string(x.rows()));
  }
  Matrix y(rows_, x.cols());
  kernels::active().spmm(view(), x.data(), y.data(), x.cols());
  return y;
}

Matrix AggregationOperator::apply_transposed(const Matrix& x) const {
  if (x.rows() != rows_) {
    throw ValidationError("aggregation expects " + std::to_string(rows_) + " rows, got " +
                          std::to_string(x.rows()));
  }
  Matrix y(rows_, x.cols());
  kernels::active().spmm(transposed_view(), x.data(), y.data(), x.cols());
  return y;
}

Matrix AggregationOperator::dense() const {
  Matrix d(rows_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (auto e = offsets_[r]; e < offsets_[r + 1]; ++e) d(r, cols_[e]) = vals_[e];
  }
  return d;
}

AggregationOperator build_aggregator(const LabeledGraph& g, bool self_loops) {
  return AggregationOperator(g, self_loops);
}

}  // namespace heterolab::nn
