#include "heterolab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "heterolab/error.hpp"
#include "heterolab/kernels.hpp"

namespace heterolab {

double homophily_ratio(const LabeledGraph& g) {
  if (g.num_edges() == 0) {
    throw ValidationError("homophily ratio is undefined for a graph with no edges");
  }
  std::uint64_t same = 0;
  const auto labels = g.labels();
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (u < v && labels[u] == labels[v]) ++same;
    }
  }
  return static_cast<double>(same) / static_cast<double>(g.num_edges());
}

NeighborHistogram neighbor_histogram(const LabeledGraph& g, NodeId i) {
  NeighborHistogram h;
  h.counts.assign(g.num_classes(), 0);
  const auto labels = g.labels();
  for (NodeId j : g.neighbors(i)) ++h.counts[labels[j]];
  const std::size_t deg = g.degree(i);
  if (deg > 0) {
    h.normalized.resize(h.counts.size());
    for (std::size_t c = 0; c < h.counts.size(); ++c) {
      h.normalized[c] = static_cast<double>(h.counts[c]) / static_cast<double>(deg);
    }
  }
  return h;
}

CcnsMatrix ccns(const LabeledGraph& g) {
  const std::size_t classes = g.num_classes();
  const auto& k = kernels::active();
  CcnsMatrix out;
  out.values = Matrix(classes, classes);
  out.class_sizes.assign(classes, 0);

  // Cosine of unit vectors is their dot product, so the double sum over
  // V_c x V_c' factors into a dot product of per-class sums of unit
  // histograms. Accumulation runs in ascending node id.
  Matrix unit_sums(classes, classes);
  std::vector<double> unit(classes);
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (g.degree(i) == 0) {
      ++out.excluded_isolated;
      continue;
    }
    const NeighborHistogram h = neighbor_histogram(g, i);
    double norm = std::sqrt(k.dot(h.normalized.data(), h.normalized.data(), classes));
    for (std::size_t c = 0; c < classes; ++c) unit[c] = h.normalized[c] / norm;
    const ClassId y = g.label(i);
    k.axpy(1.0, unit.data(), unit_sums.row(y).data(), classes);
    ++out.class_sizes[y];
  }
  for (std::size_t c = 0; c < classes; ++c) {
    if (out.class_sizes[c] == 0) {
      throw ValidationError("class " + std::to_string(c) +
                            " has no non-isolated nodes; CCNS is undefined");
    }
  }
  for (std::size_t a = 0; a < classes; ++a) {
    for (std::size_t b = a; b < classes; ++b) {
      const double s = k.dot(unit_sums.row(a).data(), unit_sums.row(b).data(), classes) /
                       (static_cast<double>(out.class_sizes[a]) *
                        static_cast<double>(out.class_sizes[b]));
      out.values(a, b) = out.values(b, a) = std::clamp(s, 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace heterolab
