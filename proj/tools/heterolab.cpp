#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "heterolab/error.hpp"
#include "heterolab/experiment.hpp"
#include "heterolab/graph.hpp"
#include "heterolab/io.hpp"
#include "heterolab/kernels.hpp"
#include "heterolab/metrics.hpp"
#include "heterolab/nn.hpp"
#include "heterolab/render.hpp"
#include "heterolab/synth.hpp"
#include "heterolab/theory.hpp"

namespace fs = std::filesystem;
using namespace heterolab;

namespace {

std::string f4(double v) { return format_fixed(v, 4); }

void print_seed(std::uint64_t seed) { std::cout << "seed: " << seed << "\n"; }

void write_output(const std::string& path, const std::string& text, const char* what) {
  io::write_text(path, text);
  std::cout << what << ": " << path << "\n";
}

struct TrainFlags {
  std::string model = "gcn";
  nn::TrainConfig config;
  bool no_self_loops = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--lr", config.learning_rate, "Adam learning rate")->capture_default_str();
    cmd->add_option("--wd", config.weight_decay, "L2 weight decay")->capture_default_str();
    cmd->add_option("--dropout", config.dropout, "Dropout rate")->capture_default_str();
    cmd->add_option("--epochs", config.epochs, "Maximum epochs")->capture_default_str();
    cmd->add_option("--patience", config.patience, "Early-stopping patience")
        ->capture_default_str();
    cmd->add_option("--hidden", config.hidden, "Hidden width")->capture_default_str();
    cmd->add_flag("--no-self-loops", no_self_loops, "Aggregate over neighbors only");
  }
  nn::TrainConfig resolved(std::uint64_t seed) const {
    nn::TrainConfig c = config;
    c.seed = seed;
    c.self_loops = !no_self_loops;
    return c;
  }
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heterolab: homophily and heterophily analysis for graph neural networks"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;

  // analyze
  std::string analyze_bundle;
  std::string analyze_out = ".";
  auto* analyze = app.add_subcommand("analyze", "Homophily, degrees and CCNS of a bundle");
  analyze->add_option("bundle", analyze_bundle, "Bundle directory")->required();
  analyze->add_option("--out", analyze_out, "Directory for ccns.csv and ccns.svg")
      ->capture_default_str();
  analyze->add_option("--seed", seed, "Seed (unused, echoed)");

  // synth
  auto* synth = app.add_subcommand("synth", "Synthetic graphs");
  synth->require_subcommand(1);

  CsbmParams csbm;
  std::size_t csbm_dim = 8;
  double csbm_sep = 2.0;
  std::string csbm_out;
  csbm.n0 = 300;
  csbm.n1 = 300;
  csbm.p = 0.05;
  csbm.q = 0.005;
  auto* synth_csbm = synth->add_subcommand("csbm", "Two-class contextual SBM");
  synth_csbm->add_option("--n0", csbm.n0, "Class-0 size")->capture_default_str();
  synth_csbm->add_option("--n1", csbm.n1, "Class-1 size")->capture_default_str();
  synth_csbm->add_option("--p", csbm.p, "Intra-class edge probability")->capture_default_str();
  synth_csbm->add_option("--q", csbm.q, "Inter-class edge probability")->capture_default_str();
  synth_csbm->add_option("--sep", csbm_sep, "||mu0 - mu1||")->capture_default_str();
  synth_csbm->add_option("--dim", csbm_dim, "Feature dimension")->capture_default_str();
  synth_csbm->add_option("--out", csbm_out, "Output bundle directory")->required();
  synth_csbm->add_option("--seed", seed, "Seed")->capture_default_str();

  std::vector<std::size_t> sbm_sizes{500, 500, 500};
  double sbm_p = 0.016, sbm_q = 0.002, sbm_signal = 1.0;
  std::size_t sbm_dim = 8;
  std::string sbm_out;
  auto* synth_sbm = synth->add_subcommand("sbm", "Multi-class SBM, class means signal * e_c");
  synth_sbm->add_option("--sizes", sbm_sizes, "Class sizes")->delimiter(',')->capture_default_str();
  synth_sbm->add_option("--p", sbm_p, "Intra-class edge probability")->capture_default_str();
  synth_sbm->add_option("--q", sbm_q, "Inter-class edge probability")->capture_default_str();
  synth_sbm->add_option("--signal", sbm_signal, "Class mean scale")->capture_default_str();
  synth_sbm->add_option("--dim", sbm_dim, "Feature dimension (>= classes)")->capture_default_str();
  synth_sbm->add_option("--out", sbm_out, "Output bundle directory")->required();
  synth_sbm->add_option("--seed", seed, "Seed")->capture_default_str();

  std::string add_in, add_out, add_dists = "circulant-2hop";
  std::size_t add_k = 0;
  double add_gamma = 0.0;
  auto* synth_add = synth->add_subcommand("add-edges", "Add targeted heterophilous edges");
  synth_add->add_option("bundle", add_in, "Input bundle")->required();
  synth_add->add_option("--k", add_k, "Number of edges to add")->required();
  synth_add->add_option("--gamma", add_gamma, "Noise level in [0, 1]")->capture_default_str();
  synth_add->add_option("--dists", add_dists, "Preset name, JSON file or inline JSON")
      ->capture_default_str();
  synth_add->add_option("--out", add_out, "Output bundle directory")->required();
  synth_add->add_option("--seed", seed, "Seed")->capture_default_str();

  // train
  std::string train_bundle, train_out;
  std::size_t train_splits = 1;
  bool train_grid = false;
  TrainFlags tf;
  auto* train = app.add_subcommand("train", "Train gcn, mlp or blend on random splits");
  train->add_option("bundle", train_bundle, "Bundle directory")->required();
  train->add_option("--model", tf.model, "gcn | mlp | blend")->capture_default_str();
  train->add_option("--alpha", tf.config.alpha, "Blend weight on the GCN branch")
      ->capture_default_str();
  train->add_option("--splits", train_splits, "Number of random 48/32/20 splits")
      ->capture_default_str();
  train->add_flag("--grid", train_grid, "Tune lr, weight decay and dropout on validation accuracy");
  train->add_option("--out", train_out, "Write reports as JSON");
  train->add_option("--seed", seed, "Seed")->capture_default_str();
  tf.add(train);

  // theory
  auto* theory = app.add_subcommand("theory", "Numerical checks of the aggregation theorems");
  theory->require_subcommand(1);

  std::vector<std::size_t> conc_degrees{5, 20, 100};
  std::size_t conc_l = 2, conc_trials = 100000, conc_points = 10;
  double conc_b = 1.0;
  bool conc_check = false;
  std::string conc_out;
  auto* conc = theory->add_subcommand("concentration", "Empirical tails vs the Hoeffding bound");
  conc->add_option("--degrees", conc_degrees, "Degrees")->delimiter(',')->capture_default_str();
  conc->add_option("--l", conc_l, "Feature dimension")->capture_default_str();
  conc->add_option("--B", conc_b, "Feature bound")->capture_default_str();
  conc->add_option("--trials", conc_trials, "Trials per degree")->capture_default_str();
  conc->add_option("--points", conc_points, "t grid size")->capture_default_str();
  conc->add_flag("--self-check", conc_check, "Exit 4 on any violation beyond 3 sigma");
  conc->add_option("--out", conc_out, "Write reports as JSON");
  conc->add_option("--seed", seed, "Seed")->capture_default_str();

  double th_p = 0.9, th_q = 0.1, th_sep = 2.0;
  std::vector<std::size_t> th_degrees{1, 2, 4, 8, 16};
  std::size_t th_trials = 100000, th_dim = 2;
  std::string th_out;
  auto* th_csbm = theory->add_subcommand("csbm", "Misclassification with and without aggregation");
  th_csbm->add_option("--p", th_p, "Intra-class probability")->capture_default_str();
  th_csbm->add_option("--q", th_q, "Inter-class probability")->capture_default_str();
  th_csbm->add_option("--sep", th_sep, "||mu0 - mu1||")->capture_default_str();
  th_csbm->add_option("--degrees", th_degrees, "Degrees")->delimiter(',')->capture_default_str();
  th_csbm->add_option("--trials", th_trials, "Monte Carlo trials per degree")
      ->capture_default_str();
  th_csbm->add_option("--dim", th_dim, "Feature dimension")->capture_default_str();
  th_csbm->add_option("--out", th_out, "Write the curve as JSON");
  th_csbm->add_option("--seed", seed, "Seed")->capture_default_str();

  // render
  auto* render = app.add_subcommand("render", "SVG output");
  render->require_subcommand(1);
  std::string hm_in, hm_out = "heatmap.svg", hm_title;
  std::vector<std::string> hm_labels;
  int hm_precision = 2;
  auto* hm = render->add_subcommand("heatmap", "Heatmap of a square CSV matrix");
  hm->add_option("matrix", hm_in, "CSV matrix")->required();
  hm->add_option("--labels", hm_labels, "Row/column labels")->delimiter(',');
  hm->add_option("--title", hm_title, "Title");
  hm->add_option("--precision", hm_precision, "Annotation decimals")->capture_default_str();
  hm->add_option("--out", hm_out, "Output SVG")->capture_default_str();
  hm->add_option("--seed", seed, "Seed (unused, echoed)");
  std::string cv_in, cv_out = "curve.svg";
  auto* cv = render->add_subcommand("curve", "Accuracy vs homophily from a result JSON");
  cv->add_option("result", cv_in, "ExperimentResult JSON")->required();
  cv->add_option("--out", cv_out, "Output SVG")->capture_default_str();
  cv->add_option("--seed", seed, "Seed (unused, echoed)");

  // bundle
  auto* bundle = app.add_subcommand("bundle", "Bundle utilities");
  bundle->require_subcommand(1);
  io::CsvImportOptions conv;
  std::string conv_edges, conv_labels, conv_features, conv_out;
  auto* convert = bundle->add_subcommand("convert", "Import delimited edge/label/feature files");
  convert->add_option("--edges", conv_edges, "Edge list: u,v per line")->required();
  convert->add_option("--labels", conv_labels, "Labels: node,label per line")->required();
  convert->add_option("--features", conv_features, "Features: node,f1,...,fl per line");
  convert->add_flag("--header", conv.header, "Skip the first line of every file");
  convert->add_flag("--drop-self-loops", conv.drop_self_loops, "Drop u,u lines");
  convert->add_option("--out", conv_out, "Output bundle directory")->required();
  convert->add_option("--seed", seed, "Seed (unused, echoed)");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Experiment drivers");
  experiment->require_subcommand(1);
  std::string ex_bundle, ex_dists = "circulant-2hop", ex_out = "result.json", ex_svg;
  std::vector<std::size_t> ex_k{0};
  std::vector<std::uint64_t> ex_seeds{0, 1, 2, 3, 4};
  double ex_gamma = 0.0;
  std::size_t ex_threads = 1;
  TrainFlags ef;
  auto* ex_curve = experiment->add_subcommand("curve", "GCN accuracy across a K grid");
  ex_curve->add_option("bundle", ex_bundle, "Base bundle")->required();
  ex_curve->add_option("--dists", ex_dists, "Preset name, JSON file or inline JSON")
      ->capture_default_str();
  ex_curve->add_option("--k-grid", ex_k, "Edges to add")->delimiter(',')->capture_default_str();
  ex_curve->add_option("--gamma", ex_gamma, "Noise level")->capture_default_str();
  ex_curve->add_option("--seeds", ex_seeds, "Seeds")->delimiter(',')->capture_default_str();
  ex_curve->add_option("--threads", ex_threads, "Worker threads, 0 = all cores")
      ->capture_default_str();
  ex_curve->add_option("--out", ex_out, "Result JSON")->capture_default_str();
  ex_curve->add_option("--svg", ex_svg, "Also render the curve");
  ex_curve->add_option("--seed", seed, "Seed (echoed; runs use --seeds)");
  ef.add(ex_curve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kValidation);
  }

  try {
    print_seed(seed);

    if (*analyze) {
      const io::Bundle b = io::load_bundle_with_names(analyze_bundle);
      const LabeledGraph& g = b.graph;
      const DegreeSummary d = degree_summary(g);
      std::cout << "nodes: " << g.num_nodes() << "\n"
                << "edges: " << g.num_edges() << "\n"
                << "classes: " << g.num_classes() << "\n"
                << "homophily: " << (g.num_edges() ? f4(homophily_ratio(g)) : "undefined")
                << "\n"
                << "degree: min " << d.min << " max " << d.max << " mean " << f4(d.mean)
                << " isolated " << d.isolated << "\n";
      const CcnsMatrix c = ccns(g);
      std::cout << "ccns excluded isolated: " << c.excluded_isolated << "\n";
      fs::create_directories(analyze_out);
      write_output((fs::path(analyze_out) / "ccns.csv").string(), matrix_csv(c.values), "wrote");
      HeatmapSpec spec;
      spec.matrix = c.values;
      spec.row_labels = b.label_names;
      spec.col_labels = b.label_names;
      spec.title = "Cross-class neighborhood similarity";
      write_output((fs::path(analyze_out) / "ccns.svg").string(), render_heatmap(spec), "wrote");
    } else if (*synth_csbm) {
      if (csbm_dim == 0) throw ValidationError("--dim must be positive");
      csbm.mu0.assign(csbm_dim, 0.0);
      csbm.mu1.assign(csbm_dim, 0.0);
      csbm.mu0[0] = csbm_sep / 2;
      csbm.mu1[0] = -csbm_sep / 2;
      const LabeledGraph g = sample_csbm(csbm, RngSeed{seed, 0});
      io::save_bundle(g, csbm_out);
      std::cout << "nodes: " << g.num_nodes() << "\nedges: " << g.num_edges()
                << "\nhomophily: " << (g.num_edges() ? f4(homophily_ratio(g)) : "undefined")
                << "\nwrote: " << csbm_out << "\n";
    } else if (*synth_sbm) {
      if (sbm_dim < sbm_sizes.size()) throw ValidationError("--dim must be at least the class count");
      SbmParams sp;
      sp.class_sizes = sbm_sizes;
      sp.p = sbm_p;
      sp.q = sbm_q;
      sp.means = Matrix(sbm_sizes.size(), sbm_dim);
      for (std::size_t c = 0; c < sbm_sizes.size(); ++c) sp.means(c, c) = sbm_signal;
      const LabeledGraph g = sample_sbm(sp, RngSeed{seed, 0});
      io::save_bundle(g, sbm_out);
      std::cout << "nodes: " << g.num_nodes() << "\nedges: " << g.num_edges()
                << "\nhomophily: " << (g.num_edges() ? f4(homophily_ratio(g)) : "undefined")
                << "\nwrote: " << sbm_out << "\n";
    } else if (*synth_add) {
      const io::Bundle b = io::load_bundle_with_names(add_in);
      const auto dists = io::load_distributions(add_dists, b.graph.num_classes());
      const LabeledGraph g = add_heterophilous_edges_noisy(b.graph, add_k, dists, add_gamma,
                                                           RngSeed{seed, kAddEdgesStream}.derive(add_k));
      io::save_bundle(g, add_out, b.label_names);
      std::cout << "edges: " << b.graph.num_edges() << " -> " << g.num_edges() << "\n"
                << "homophily: "
                << (b.graph.num_edges() ? f4(homophily_ratio(b.graph)) : "undefined") << " -> "
                << f4(homophily_ratio(g)) << "\nwrote: " << add_out << "\n";
    } else if (*train) {
      const LabeledGraph g = io::load_bundle(train_bundle);
      const nn::ModelKind kind = nn::parse_model_kind(tf.model);
      if (train_splits == 0) throw ValidationError("--splits must be positive");
      std::vector<nn::TrainReport> reports;
      std::vector<double> accs;
      for (std::size_t s = 0; s < train_splits; ++s) {
        const nn::Split split = nn::random_split(g.num_nodes(), seed + s);
        nn::TrainConfig cfg = tf.resolved(seed);
        nn::TrainReport rep;
        if (train_grid) {
          const nn::GridResult gr = nn::grid_search(g, cfg, kind, split);
          rep = gr.best_report;
          rep.split_id = s;
          std::cout << "split " << s << ": grid lr " << gr.best_config.learning_rate << " wd "
                    << gr.best_config.weight_decay << " dropout " << gr.best_config.dropout
                    << " (" << gr.evaluated << " configs)\n";
        } else {
          rep = nn::train(g, cfg, kind, split, s);
        }
        std::cout << "split " << s << ": best epoch " << rep.best_epoch << " val "
                  << f4(rep.best_val_accuracy) << " test " << f4(rep.test_accuracy) << "\n";
        accs.push_back(rep.test_accuracy);
        reports.push_back(std::move(rep));
      }
      std::cout << "model: " << nn::model_kind_name(kind) << "\n"
                << "test accuracy: " << f4(mean_of(accs)) << " +- " << f4(std_of(accs)) << "\n";
      if (!train_out.empty()) write_output(train_out, to_json(reports), "wrote");
    } else if (*conc) {
      std::string json = "[\n";
      std::size_t total = 0;
      for (std::size_t i = 0; i < conc_degrees.size(); ++i) {
        const auto setup = theory::default_concentration_setup(conc_l, conc_b, RngSeed{seed, 1});
        const double rho = theory::spectral_norm(setup.w);
        const auto t = theory::concentration_t_grid(conc_degrees[i], rho, conc_b, conc_l, conc_points);
        const auto rep = theory::verify_concentration(setup.dists[0], setup.feats, setup.w,
                                                      conc_degrees[i], t, conc_trials,
                                                      RngSeed{seed, 2}.derive(conc_degrees[i]));
        std::cout << "degree " << rep.degree << " rho " << f4(rep.rho) << "\n";
        for (std::size_t k = 0; k < t.size(); ++k) {
          std::cout << "  t " << f4(t[k]) << " empirical " << format_fixed(rep.empirical[k], 6)
                    << " bound " << format_fixed(rep.bound[k], 6) << "\n";
        }
        std::cout << "  violations: " << rep.violations << "\n";
        total += rep.violations;
        json += to_json(rep, seed);
        if (i + 1 < conc_degrees.size()) json += ",\n";
      }
      json += "]\n";
      if (!conc_out.empty()) write_output(conc_out, json, "wrote");
      if (conc_check && total > 0) {
        throw NumericalError(std::to_string(total) + " grid points exceed the bound");
      }
    } else if (*th_csbm) {
      if (th_dim == 0) throw ValidationError("--dim must be positive");
      CsbmParams params;
      params.n0 = 1;
      params.n1 = 1;
      params.p = th_p;
      params.q = th_q;
      params.mu0.assign(th_dim, 0.0);
      params.mu1.assign(th_dim, 0.0);
      params.mu0[0] = th_sep / 2;
      params.mu1[0] = -th_sep / 2;
      const auto curve =
          theory::misclassification_curve(params, th_degrees, th_trials, RngSeed{seed, 0});
      if (curve.threshold.kind == theory::ThresholdKind::kFinite) {
        std::cout << "degree threshold: " << format_fixed(curve.threshold.value, 6) << "\n";
      } else {
        std::cout << "degree threshold: none (aggregation never helps)\n";
      }
      for (const auto& e : curve.entries) {
        std::cout << "degree " << e.degree << ": p_x " << format_fixed(e.analytic_x, 6)
                  << " (mc " << format_fixed(e.empirical_x, 6) << ")  p_h "
                  << format_fixed(e.analytic_h, 6) << " (mc " << format_fixed(e.empirical_h, 6)
                  << ")\n";
      }
      if (!th_out.empty()) write_output(th_out, to_json(curve), "wrote");
    } else if (*hm) {
      HeatmapSpec spec;
      spec.matrix = io::read_matrix_csv(hm_in);
      spec.row_labels = hm_labels;
      spec.col_labels = hm_labels;
      spec.title = hm_title;
      spec.precision = hm_precision;
      write_output(hm_out, render_heatmap(spec), "wrote");
    } else if (*cv) {
      const ExperimentResult r = experiment_result_from_json(io::read_text(cv_in));
      write_output(cv_out, render_curve(r), "wrote");
    } else if (*convert) {
      conv.edges = conv_edges;
      conv.labels = conv_labels;
      if (!conv_features.empty()) conv.features = conv_features;
      const io::CsvImportResult r = io::import_csv(conv);
      io::save_bundle(r.bundle.graph, conv_out, r.bundle.label_names);
      std::cout << "nodes: " << r.bundle.graph.num_nodes() << "\nedges: "
                << r.bundle.graph.num_edges() << "\nclasses: " << r.bundle.graph.num_classes()
                << "\ndropped self-loops: " << r.dropped_self_loops
                << "\nduplicate edges: " << r.duplicate_edges << "\nwrote: " << conv_out << "\n";
    } else if (*ex_curve) {
      const LabeledGraph g = io::load_bundle(ex_bundle);
      CurveExperiment exp;
      exp.dists_name = ex_dists.rfind("{", 0) == 0 ? "custom" : ex_dists;
      exp.dists = io::load_distributions(ex_dists, g.num_classes());
      exp.k_grid = ex_k;
      exp.gamma = ex_gamma;
      exp.seeds = ex_seeds;
      exp.config = ef.resolved(0);
      exp.threads = ex_threads;
      const ExperimentResult r = run_curve_experiment(g, exp);
      for (const auto& p : r.points) {
        std::cout << "K " << p.k << ": h " << f4(p.h_mean) << " accuracy "
                  << f4(p.accuracy_mean) << " +- " << f4(p.accuracy_std) << "\n";
      }
      write_output(ex_out, to_json(r), "wrote");
      if (!ex_svg.empty()) write_output(ex_svg, render_curve(r), "wrote");
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kIo);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
