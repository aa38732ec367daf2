#include "heterolab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "json.hpp"

#include "heterolab/error.hpp"
#include "heterolab/metrics.hpp"

namespace heterolab {
using nlohmann::json;

std::string_view toolkit_version() { return "0.1.0"; }

bool operator==(const ExperimentResult& a, const ExperimentResult& b) {
  return to_json(a) == to_json(b);
}

namespace {

struct Cell {
  double h = 0.0;
  double accuracy = 0.0;
};

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

json config_json(const nn::TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"weight_decay", c.weight_decay},
          {"dropout", c.dropout},             {"epochs", c.epochs},
          {"patience", c.patience},           {"hidden", c.hidden},
          {"seed", c.seed},                   {"alpha", c.alpha},
          {"self_loops", c.self_loops}};
}

nn::TrainConfig config_from(const json& j) {
  nn::TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.weight_decay = j.at("weight_decay").get<double>();
  c.dropout = j.at("dropout").get<double>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.patience = j.at("patience").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.alpha = j.at("alpha").get<double>();
  c.self_loops = j.at("self_loops").get<bool>();
  return c;
}

json report_json(const nn::TrainReport& r) {
  json history = json::array();
  for (const auto& e : r.history) {
    history.push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"val_acc", e.val_acc}});
  }
  return {{"model", std::string(nn::model_kind_name(r.model))},
          {"seed", r.seed},
          {"split_id", r.split_id},
          {"alpha", r.alpha},
          {"best_epoch", r.best_epoch},
          {"best_val_accuracy", r.best_val_accuracy},
          {"test_accuracy", r.test_accuracy},
          {"history", history}};
}

}  // namespace

ExperimentResult run_curve_experiment(const LabeledGraph& base, const CurveExperiment& exp) {
  if (exp.k_grid.empty()) throw ValidationError("K grid is empty");
  if (exp.seeds.empty()) throw ValidationError("seed list is empty");
  if (exp.dists.size() != base.num_classes()) {
    throw ValidationError("need one neighbor distribution per class");
  }
  if (!(exp.gamma >= 0.0 && exp.gamma <= 1.0)) throw ValidationError("gamma must lie in [0, 1]");
  if (!base.has_features()) throw ValidationError("curve experiment needs node features");
  exp.config.validate();

  const std::size_t nk = exp.k_grid.size();
  const std::size_t ns = exp.seeds.size();
  std::vector<Cell> cells(nk * ns);

  auto run_cell = [&](std::size_t idx) {
    const std::size_t ki = idx / ns;
    const std::size_t si = idx % ns;
    const std::size_t k = exp.k_grid[ki];
    const std::uint64_t seed = exp.seeds[si];
    LabeledGraph g = k == 0 ? base
                            : add_heterophilous_edges_noisy(base, k, exp.dists, exp.gamma,
                                                            RngSeed{seed, kAddEdgesStream}.derive(k));
    nn::TrainConfig cfg = exp.config;
    cfg.seed = seed;
    const nn::Split split = nn::random_split(g.num_nodes(), seed);
    const nn::TrainReport rep = nn::train(g, cfg, nn::ModelKind::kGcn, split, si);
    cells[idx] = {homophily_ratio(g), rep.test_accuracy};
  };

  std::size_t threads = exp.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : exp.threads;
  threads = std::min(threads, cells.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= cells.size()) return;
          try {
            run_cell(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(cells.size());
            return;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  ExperimentResult result;
  result.version = std::string(toolkit_version());
  result.params.dists = exp.dists_name;
  for (const auto& d : exp.dists) {
    result.params.dist_weights.emplace_back(d.weights().begin(), d.weights().end());
  }
  result.params.gamma = exp.gamma;
  result.params.k_grid = exp.k_grid;
  result.params.seeds = exp.seeds;
  result.params.config = exp.config;
  result.params.base_nodes = base.num_nodes();
  result.params.base_edges = base.num_edges();
  result.params.base_h = base.num_edges() > 0 ? homophily_ratio(base) : 0.0;
  for (std::size_t ki = 0; ki < nk; ++ki) {
    CurvePoint p;
    p.k = exp.k_grid[ki];
    p.seeds = exp.seeds;
    for (std::size_t si = 0; si < ns; ++si) {
      p.h.push_back(cells[ki * ns + si].h);
      p.accuracy.push_back(cells[ki * ns + si].accuracy);
    }
    p.h_mean = mean(p.h);
    p.accuracy_mean = mean(p.accuracy);
    p.accuracy_std = sample_std(p.accuracy);
    result.points.push_back(std::move(p));
  }
  return result;
}

std::string to_json(const ExperimentResult& r) {
  json points = json::array();
  for (const auto& p : r.points) {
    points.push_back({{"k", p.k},
                      {"seeds", p.seeds},
                      {"h", p.h},
                      {"accuracy", p.accuracy},
                      {"h_mean", p.h_mean},
                      {"accuracy_mean", p.accuracy_mean},
                      {"accuracy_std", p.accuracy_std}});
  }
  json j = {{"schema", std::string(kResultSchema)},
            {"kind", r.kind},
            {"toolkit_version", r.version},
            {"params",
             {{"dists", r.params.dists},
              {"dist_weights", r.params.dist_weights},
              {"gamma", r.params.gamma},
              {"k_grid", r.params.k_grid},
              {"seeds", r.params.seeds},
              {"model", "gcn"},
              {"config", config_json(r.params.config)},
              {"base_nodes", r.params.base_nodes},
              {"base_edges", r.params.base_edges},
              {"base_h", r.params.base_h}}},
            {"points", points}};
  return j.dump(2) + "\n";
}

ExperimentResult experiment_result_from_json(const std::string& text) {
  ExperimentResult r;
  try {
    const json j = json::parse(text);
    if (j.at("schema").get<std::string>() != kResultSchema) {
      throw ValidationError("unknown result schema '" + j.at("schema").get<std::string>() + "'");
    }
    r.kind = j.at("kind").get<std::string>();
    r.version = j.at("toolkit_version").get<std::string>();
    const json& p = j.at("params");
    r.params.dists = p.at("dists").get<std::string>();
    r.params.dist_weights = p.at("dist_weights").get<std::vector<std::vector<double>>>();
    r.params.gamma = p.at("gamma").get<double>();
    r.params.k_grid = p.at("k_grid").get<std::vector<std::size_t>>();
    r.params.seeds = p.at("seeds").get<std::vector<std::uint64_t>>();
    r.params.config = config_from(p.at("config"));
    r.params.base_nodes = p.at("base_nodes").get<std::size_t>();
    r.params.base_edges = p.at("base_edges").get<std::size_t>();
    r.params.base_h = p.at("base_h").get<double>();
    for (const json& q : j.at("points")) {
      CurvePoint c;
      c.k = q.at("k").get<std::size_t>();
      c.seeds = q.at("seeds").get<std::vector<std::uint64_t>>();
      c.h = q.at("h").get<std::vector<double>>();
      c.accuracy = q.at("accuracy").get<std::vector<double>>();
      c.h_mean = q.at("h_mean").get<double>();
      c.accuracy_mean = q.at("accuracy_mean").get<double>();
      c.accuracy_std = q.at("accuracy_std").get<double>();
      if (c.seeds.size() != c.h.size() || c.seeds.size() != c.accuracy.size()) {
        throw ValidationError("point at K=" + std::to_string(c.k) + " has mismatched seed list");
      }
      for (double h : c.h) {
        if (!(h >= 0.0 && h <= 1.0)) throw ValidationError("homophily value outside [0, 1]");
      }
      r.points.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("result JSON: ") + e.what());
  }
  return r;
}

std::string to_json(const nn::TrainReport& report) { return report_json(report).dump(2) + "\n"; }

std::string to_json(const std::vector<nn::TrainReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  return arr.dump(2) + "\n";
}

std::string to_json(const theory::ConcentrationReport& r, std::uint64_t seed) {
  json j = {{"kind", "concentration"},
            {"seed", seed},
            {"trials", r.trials},
            {"degree", r.degree},
            {"rho", r.rho},
            {"bound_b", r.bound_b},
            {"l", r.l},
            {"expectation", r.expectation},
            {"t", r.t_grid},
            {"empirical", r.empirical},
            {"bound", r.bound},
            {"slack", r.slack},
            {"violations", r.violations}};
  return j.dump(2) + "\n";
}

std::string to_json(const theory::MisclassificationCurve& c) {
  json entries = json::array();
  for (const auto& e : c.entries) {
    entries.push_back({{"degree", e.degree},
                       {"analytic_x", e.analytic_x},
                       {"analytic_h", e.analytic_h},
                       {"empirical_x", e.empirical_x},
                       {"empirical_h", e.empirical_h},
                       {"trials", e.trials}});
  }
  json threshold = c.threshold.kind == theory::ThresholdKind::kFinite
                       ? json{{"kind", "finite"}, {"value", c.threshold.value}}
                       : json{{"kind", "never_helps"}};
  json j = {{"kind", "csbm_misclassification"},
            {"p", c.p},
            {"q", c.q},
            {"separation", c.separation},
            {"seed", c.seed.master},
            {"threshold", threshold},
            {"entries", entries}};
  return j.dump(2) + "\n";
}

}  // namespace heterolab
