#include "heterolab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "heterolab/error.hpp"

namespace heterolab {
namespace {

void check_features(const Matrix& x, std::size_t n) {
  if (x.rows() != n) {
    throw ValidationError("feature shape mismatch: " + std::to_string(x.rows()) +
                          " rows for " + std::to_string(n) + " nodes");
  }
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 0; k < x.cols(); ++k) {
      if (!std::isfinite(x(i, k))) {
        throw ValidationError("non-finite feature at node " + std::to_string(i) +
                              ", column " + std::to_string(k));
      }
    }
  }
}

}  // namespace

std::span<const NodeId> LabeledGraph::neighbors(NodeId i) const {
  if (i >= num_nodes()) {
    throw ValidationError("node id " + std::to_string(i) + " out of range (n=" +
                          std::to_string(num_nodes()) + ")");
  }
  return {targets_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

bool LabeledGraph::has_edge(NodeId u, NodeId v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

ClassId LabeledGraph::label(NodeId i) const {
  if (i >= num_nodes()) {
    throw ValidationError("node id " + std::to_string(i) + " out of range");
  }
  return labels_[i];
}

std::span<const NodeId> LabeledGraph::class_members(ClassId c) const {
  if (c >= num_classes()) {
    throw ValidationError("class id " + std::to_string(c) + " out of range");
  }
  return {class_nodes_.data() + class_offsets_[c],
          class_offsets_[c + 1] - class_offsets_[c]};
}

const Matrix& LabeledGraph::features() const {
  if (!features_) throw ValidationError("graph has no features");
  return *features_;
}

std::vector<Edge> LabeledGraph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.push_back({u, v});
    }
  }
  return out;
}

LabeledGraph LabeledGraph::with_features(std::optional<Matrix> features) const {
  if (features) check_features(*features, num_nodes());
  LabeledGraph g = *this;
  g.features_ = std::move(features);
  return g;
}

LabeledGraph build_graph(std::span<const Edge> edges, std::vector<ClassId> labels,
                         std::optional<Matrix> features,
                         std::optional<std::size_t> num_classes) {
  const std::size_t n = labels.size();
  std::size_t classes = 0;
  for (ClassId y : labels) classes = std::max<std::size_t>(classes, std::size_t{y} + 1);
  if (num_classes) {
    if (*num_classes < classes) {
      throw ValidationError("label " + std::to_string(classes - 1) +
                            " out of range for " + std::to_string(*num_classes) +
                            " classes");
    }
    classes = *num_classes;
  }
  if (features) check_features(*features, n);

  std::vector<Edge> directed;
  directed.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) {
      throw ValidationError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                            ") has node id out of range (n=" + std::to_string(n) + ")");
    }
    if (e.u == e.v) {
      throw ValidationError("self-loop on node " + std::to_string(e.u));
    }
    directed.push_back({e.u, e.v});
    directed.push_back({e.v, e.u});
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  LabeledGraph g;
  g.offsets_.assign(n + 1, 0);
  for (const Edge& e : directed) ++g.offsets_[e.u + 1];
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.targets_.reserve(directed.size());
  for (const Edge& e : directed) g.targets_.push_back(e.v);

  g.class_offsets_.assign(classes + 1, 0);
  for (ClassId y : labels) ++g.class_offsets_[y + 1];
  for (std::size_t c = 0; c < classes; ++c) g.class_offsets_[c + 1] += g.class_offsets_[c];
  g.class_nodes_.resize(n);
  std::vector<std::uint64_t> cursor(g.class_offsets_.begin(), g.class_offsets_.end() - 1);
  for (NodeId i = 0; i < n; ++i) g.class_nodes_[cursor[labels[i]]++] = i;

  g.labels_ = std::move(labels);
  g.features_ = std::move(features);
  return g;
}

DegreeSummary degree_summary(const LabeledGraph& g) {
  DegreeSummary s;
  const std::size_t n = g.num_nodes();
  if (n == 0) return s;
  s.min = g.degree(0);
  for (NodeId i = 0; i < n; ++i) {
    const std::size_t d = g.degree(i);
    s.min = std::min(s.min, d);
    s.max = std::max(s.max, d);
    if (d == 0) ++s.isolated;
  }
  s.mean = 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(n);
  return s;
}

}  // namespace heterolab
