#pragma once

// Dataset bundle directories and other on-disk inputs.
//
// A bundle is a directory holding
//   graph.json    {format_version, n, num_classes, has_features, l, label_names[]}
//   edges.tsv     "u<TAB>v" per undirected edge, 0-indexed, each edge once
//   labels.tsv    one class id per line, in node order
//   features.f32  optional, row-major little-endian float32, n x l, no header

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "heterolab/graph.hpp"
#include "heterolab/matrix.hpp"
#include "heterolab/synth.hpp"

namespace heterolab::io {

inline constexpr int kBundleFormatVersion = 1;

struct Manifest {
  int format_version = kBundleFormatVersion;
  std::size_t n = 0;
  std::size_t num_classes = 0;
  bool has_features = false;
  std::size_t l = 0;
  std::vector<std::string> label_names;
};

struct Bundle {
  LabeledGraph graph;
  std::vector<std::string> label_names;
};

Manifest read_manifest(const std::filesystem::path& dir);

// Features are widened from float32 to double.
LabeledGraph load_bundle(const std::filesystem::path& dir);
Bundle load_bundle_with_names(const std::filesystem::path& dir);

// Features are narrowed to float32. label_names defaults to "0".."C-1".
void save_bundle(const LabeledGraph& g, const std::filesystem::path& dir,
                 const std::vector<std::string>& label_names = {});

// Generic delimited-text importer. Node ids and labels are arbitrary
// strings; nodes are numbered in labels-file order and label strings are
// mapped to dense ids (numeric order when all labels are integers,
// lexicographic otherwise). Fields may be separated by commas, tabs or
// spaces.
struct CsvImportOptions {
  std::filesystem::path edges;
  std::filesystem::path labels;
  std::optional<std::filesystem::path> features;  // "node,f1,...,fl" per line
  bool header = false;                            // skip the first line of each file
  bool drop_self_loops = false;
};

struct CsvImportResult {
  Bundle bundle;
  std::size_t dropped_self_loops = 0;
  std::size_t duplicate_edges = 0;
};

CsvImportResult import_csv(const CsvImportOptions& options);

// Neighbor distribution spec: a preset name ("circulant-2hop") or a JSON
// file / inline JSON of the form {"classes": C, "dists": [[w...], ...]}.
std::vector<NeighborDistribution> load_distributions(const std::string& spec,
                                                     std::size_t num_classes);

// Plain numeric CSV (no header).
Matrix read_matrix_csv(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace heterolab::io
