#pragma once

// Accuracy-vs-homophily experiments and JSON persistence of results.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "heterolab/graph.hpp"
#include "heterolab/nn.hpp"
#include "heterolab/synth.hpp"
#include "heterolab/theory.hpp"

namespace heterolab {

inline constexpr std::string_view kResultSchema = "heterolab-result-v1";
inline constexpr std::uint64_t kAddEdgesStream = 0xadde;

std::string_view toolkit_version();

struct CurvePoint {
  std::size_t k = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> h;         // one per seed
  std::vector<double> accuracy;  // test accuracy, one per seed
  double h_mean = 0.0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;  // sample standard deviation, 0 for a single seed
};

struct CurveParams {
  std::string dists;  // preset name or "custom"
  std::vector<std::vector<double>> dist_weights;
  double gamma = 0.0;
  std::vector<std::size_t> k_grid;
  std::vector<std::uint64_t> seeds;
  nn::TrainConfig config;
  std::size_t base_nodes = 0;
  std::size_t base_edges = 0;
  double base_h = 0.0;
};

struct ExperimentResult {
  std::string kind = "curve";
  std::string version;
  CurveParams params;
  std::vector<CurvePoint> points;

  friend bool operator==(const ExperimentResult&, const ExperimentResult&);
};

struct CurveExperiment {
  std::string dists_name = "custom";
  std::vector<NeighborDistribution> dists;
  std::vector<std::size_t> k_grid;
  double gamma = 0.0;
  std::vector<std::uint64_t> seeds;
  nn::TrainConfig config;
  std::size_t threads = 1;  // 0 = hardware concurrency
};

// For every (K, seed): add K edges with stream {seed, kAddEdgesStream}
// derived by K, record h, train a GCN on random_split(n, seed) with
// config.seed = seed, record test accuracy. Points follow k_grid order and
// seeds follow the given order regardless of thread count.
ExperimentResult run_curve_experiment(const LabeledGraph& base, const CurveExperiment& exp);

std::string to_json(const ExperimentResult& result);
ExperimentResult experiment_result_from_json(const std::string& text);

std::string to_json(const nn::TrainReport& report);
std::string to_json(const std::vector<nn::TrainReport>& reports);
std::string to_json(const theory::ConcentrationReport& report, std::uint64_t seed);
std::string to_json(const theory::MisclassificationCurve& curve);

}  // namespace heterolab
