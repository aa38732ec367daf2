#pragma once

// Labeled undirected simple graph in CSR form.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "heterolab/matrix.hpp"

namespace heterolab {

using NodeId = std::uint32_t;
using ClassId = std::uint32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct DegreeSummary {
  std::size_t min = 0;
  std::size_t max = 0;
  double mean = 0.0;
  std::size_t isolated = 0;
};

// Immutable after construction; obtain one through build_graph().
//
// Invariants: adjacency is symmetric, loop-free, and every neighbor list is
// strictly increasing; labels are dense in [0, num_classes); feature entries
// are finite.
class LabeledGraph {
 public:
  LabeledGraph() = default;

  std::size_t num_nodes() const noexcept { return labels_.size(); }
  std::size_t num_classes() const noexcept { return class_offsets_.empty() ? 0 : class_offsets_.size() - 1; }
  // Undirected edges, each counted once.
  std::size_t num_edges() const noexcept { return targets_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId i) const;
  std::size_t degree(NodeId i) const { return neighbors(i).size(); }
  bool has_edge(NodeId u, NodeId v) const;

  ClassId label(NodeId i) const;
  std::span<const ClassId> labels() const noexcept { return labels_; }
  // Sorted members of class c.
  std::span<const NodeId> class_members(ClassId c) const;

  bool has_features() const noexcept { return features_.has_value(); }
  const Matrix& features() const;
  std::size_t feature_dim() const noexcept { return features_ ? features_->cols() : 0; }

  // Each undirected edge once, as (u, v) with u < v, lexicographically sorted.
  std::vector<Edge> edge_list() const;

  // Raw CSR arrays; offsets has num_nodes() + 1 entries.
  std::span<const std::uint64_t> offsets() const noexcept { return offsets_; }
  std::span<const NodeId> targets() const noexcept { return targets_; }

  // Copy with a replacement feature matrix (validated like build_graph).
  LabeledGraph with_features(std::optional<Matrix> features) const;

  friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;

 private:
  friend LabeledGraph build_graph(std::span<const Edge>, std::vector<ClassId>,
                                  std::optional<Matrix>, std::optional<std::size_t>);

  std::vector<std::uint64_t> offsets_;
  std::vector<NodeId> targets_;
  std::vector<ClassId> labels_;
  std::vector<std::uint64_t> class_offsets_;
  std::vector<NodeId> class_nodes_;
  std::optional<Matrix> features_;
};

// Validates and symmetrizes an undirected edge list. Duplicate edges (in
// either orientation) are merged; self-loops are rejected. num_classes
// defaults to max(label) + 1 and may be larger, leaving trailing classes
// empty.
LabeledGraph build_graph(std::span<const Edge> edges, std::vector<ClassId> labels,
                         std::optional<Matrix> features = std::nullopt,
                         std::optional<std::size_t> num_classes = std::nullopt);

DegreeSummary degree_summary(const LabeledGraph& g);

}  // namespace heterolab
