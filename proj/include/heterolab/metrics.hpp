#pragma once

// Edge homophily and cross-class neighborhood similarity (CCNS).

#include <cstddef>
#include <cstdint>
#include <vector>

#include "heterolab/graph.hpp"
#include "heterolab/matrix.hpp"

namespace heterolab {

// Fraction of undirected edges whose endpoints share a label.
// Throws ValidationError on an edgeless graph.
double homophily_ratio(const LabeledGraph& g);

struct NeighborHistogram {
  std::vector<std::uint64_t> counts;
  // L1-normalized counts; empty when the node is isolated.
  std::vector<double> normalized;
};

NeighborHistogram neighbor_histogram(const LabeledGraph& g, NodeId i);

struct CcnsMatrix {
  Matrix values;                        // C x C, symmetric, entries in [0, 1]
  std::vector<std::size_t> class_sizes;  // non-isolated members per class
  std::size_t excluded_isolated = 0;
};

// s(c, c') = mean cosine similarity between the neighbor-label histograms of
// class-c and class-c' nodes over all ordered pairs, i == j included.
// Degree-0 nodes are dropped from both the sums and the class sizes; a class
// left empty by that is an error.
CcnsMatrix ccns(const LabeledGraph& g);

}  // namespace heterolab
