#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "kufs/admm.hpp"
#include "kufs/csv.hpp"
#include "kufs/feature_matrix.hpp"
#include "kufs/laplacian.hpp"
#include "kufs/manifest.hpp"
#include "kufs/metrics.hpp"
#include "kufs/spectral.hpp"
#include "kufs/trace_io.hpp"
#include "kufs/version.hpp"

namespace {

constexpr int kExitFlags = 2;
constexpr int kExitData = 3;
constexpr int kExitSolver = 4;

// KUFS_LOG_LEVEL: 0 = errors only, 1 = warnings (default), 2 = progress notes
int log_level() {
  const char* env = std::getenv("KUFS_LOG_LEVEL");
  if (env == nullptr || *env == '\0') return 1;
  return std::atoi(env);
}

void note(const std::string& message) {
  if (log_level() >= 2) std::cerr << "kufs: " << message << '\n';
}

struct SelectArgs {
  std::string input;
  long long clusters = 0;
  long long features = 0;
  std::string variant = "bilinear";
  std::string method = "kufs";
  double mu0 = 0.1;
  double rho = 1.05;
  double mu_max = 1e7;
  long long max_iter = 3000;
  long long stability_window = 30;
  bool header = false;
  long long knn = 5;
  double bandwidth = 0;  // <= 0 means automatic
  std::string output = "selection.json";
  std::string trace;
  std::string scores;
};

struct EvaluateArgs {
  std::string input;
  std::string labels;
  std::string selection;
  long long repeats = 20;
  unsigned long long seed = 42;
  bool header = false;
  std::string output;
};

struct ToyArgs {
  unsigned long long seed = 42;
  std::string csv;
  std::string labels_out;
  std::string output;
  std::string trace;
};

struct BlowupArgs {
  unsigned long long seed = 1;
  long long iterations = 200;
  long long features = 8;
  std::string trace_quadratic = "blowup_quadratic.csv";
  std::string trace_bilinear = "blowup_bilinear.csv";
};

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_indices(const kufs::IndexList& idx) {
  std::string s;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i > 0) s += ' ';
    s += std::to_string(idx[i]);
  }
  return s;
}

void warn_constant_rows(const kufs::FeatureMatrix<double>& x) {
  if (log_level() >= 1 && !x.constant_rows.empty()) {
    std::cerr << "warning: constant feature rows mapped to zero:";
    for (kufs::Index i : x.constant_rows) std::cerr << ' ' << i;
    std::cerr << '\n';
  }
}

int run_select(const SelectArgs& a) {
  kufs::FeatureMatrix<double> x;
  try {
    x = kufs::standardize_rows(kufs::load_csv(a.input, a.header));
  } catch (const std::exception& e) {
    std::cerr << "kufs select: data: " << e.what() << '\n';
    return kExitData;
  }
  warn_constant_rows(x);
  note("loaded " + std::to_string(x.p()) + " features x " + std::to_string(x.n()) + " samples");

  try {
    const auto op = kufs::build_target_operator(x, a.clusters);

    kufs::SelectionManifest m;
    m.input = a.input;
    m.p = x.p();
    m.n = x.n();
    m.k = a.clusters;
    m.h = a.features;
    m.method = a.method;
    m.variant = a.variant;
    m.mu0 = a.mu0;
    m.rho = a.rho;
    m.mu_max = a.mu_max;
    m.max_iterations = a.max_iter;
    m.stability_window = a.stability_window;
    m.version = kufs::kVersion;

    if (a.method == "kufs") {
      kufs::AdmmConfig cfg;
      cfg.mu0 = a.mu0;
      cfg.rho = a.rho;
      cfg.mu_max = a.mu_max;
      cfg.max_iterations = a.max_iter;
      cfg.stability_window = a.stability_window;
      cfg.variant = a.variant == "quadratic" ? kufs::AdmmVariant::kQuadratic
                                             : kufs::AdmmVariant::kBilinear;
      const auto result = kufs::run_admm(op, a.features, cfg);
      m.selected = result.selection.indices;
      m.objective = result.selection.objective;
      m.iterations = result.selection.iterations;
      m.termination = kufs::to_string(result.selection.termination);
      if (!a.trace.empty()) kufs::write_trace_csv(result.trace, a.trace);
    } else {
      const double sigma = a.bandwidth > 0
                               ? a.bandwidth
                               : kufs::mean_connected_squared_distance(x, a.knn);
      note("laplacian bandwidth " + format_real(sigma));
      const auto graph = kufs::knn_similarity(x, a.knn, sigma);
      const auto scores = kufs::laplacian_score(x, graph);
      m.selected = kufs::rank_features_by_score(scores, a.features);
      m.objective = kufs::selection_objective(op, m.selected);
      m.iterations = 0;
      m.termination = "none";
      if (!a.scores.empty()) {
        std::ofstream out(a.scores, std::ios::binary);
        if (!out) throw kufs::DataError("cannot open scores output file: " + a.scores);
        for (kufs::Index i = 0; i < scores.size(); ++i) {
          out << format_real(scores(i)) << '\n';
        }
      }
      if (!a.trace.empty() && log_level() >= 1) {
        std::cerr << "warning: --trace ignored for --method laplacian\n";
      }
    }

    if (!x.feature_names.empty()) {
      for (kufs::Index i : m.selected) {
        m.selected_names.push_back(x.feature_names[static_cast<std::size_t>(i)]);
      }
    }
    kufs::save_manifest(m, a.output);

    std::cout << "selected " << m.selected.size() << " of " << m.p << " features (method "
              << m.method << (a.method == "kufs" ? ", variant " + m.variant : std::string())
              << ")\n";
    std::cout << "indices: " << format_indices(m.selected) << '\n';
    std::cout << "objective: " << format_real(m.objective) << '\n';
    if (a.method == "kufs") {
      std::cout << "iterations: " << m.iterations << " (" << m.termination << ")\n";
    }
    std::cout << "manifest: " << a.output << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "kufs select: solver: " << e.what() << '\n';
    return kExitSolver;
  }
}

std::string format_report(const kufs::EvalReport& rep, const EvaluateArgs& a,
                          const kufs::IndexList& indices) {
  char line[128];
  std::string out;
  out += "input: " + a.input + "\n";
  out += "selection: " + a.selection + "\n";
  out += "features: " + format_indices(indices) + "\n";
  out += "repeats: " + std::to_string(rep.repeats) + "\n";
  out += "seed: " + std::to_string(rep.seed) + "\n";
  std::snprintf(line, sizeof(line), "ACC %.2f ± %.2f\n", 100.0 * rep.acc_mean,
                100.0 * rep.acc_std);
  out += line;
  std::snprintf(line, sizeof(line), "NMI %.2f ± %.2f\n", 100.0 * rep.nmi_mean,
                100.0 * rep.nmi_std);
  out += line;
  return out;
}

int run_evaluate(const EvaluateArgs& a) {
  kufs::FeatureMatrix<double> x;
  kufs::ClusterLabels truth;
  kufs::SelectionManifest m;
  try {
    x = kufs::standardize_rows(kufs::load_csv(a.input, a.header));
    truth = kufs::load_labels(a.labels);
    m = kufs::load_manifest(a.selection);
    if (truth.size() != x.n()) {
      throw kufs::DataError("label count " + std::to_string(truth.size()) +
                            " does not match sample count " + std::to_string(x.n()));
    }
    for (kufs::Index i : m.selected) {
      if (i < 0 || i >= x.p()) {
        throw kufs::DataError("manifest index " + std::to_string(i) +
                              " out of range for p = " + std::to_string(x.p()));
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "kufs evaluate: data: " << e.what() << '\n';
    return kExitData;
  }
  warn_constant_rows(x);

  try {
    const kufs::EvalReport rep =
        kufs::evaluate_selection(x, m.selected, truth, static_cast<int>(a.repeats), a.seed);
    const std::string text = format_report(rep, a, m.selected);
    std::cout << text;
    if (!a.output.empty()) {
      std::ofstream out(a.output, std::ios::binary);
      if (!out) throw kufs::DataError("cannot open report output file: " + a.output);
      out << text;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "kufs evaluate: solver: " << e.what() << '\n';
    return kExitSolver;
  }
}

int run_demo_toy(const ToyArgs& a) {
  try {
    kufs::ToySpec spec;
    spec.seed = a.seed;
    const auto toy = kufs::generate_toy(spec);
    if (!a.csv.empty()) kufs::write_csv(toy.data, a.csv);
    if (!a.labels_out.empty()) kufs::write_labels(toy.labels, a.labels_out);

    const auto x = kufs::standardize_rows(toy.data);
    const auto op = kufs::build_target_operator(x, spec.clusters);
    const kufs::AdmmConfig cfg;
    const auto result = kufs::run_admm(op, spec.informative_features, cfg);
    if (!a.trace.empty()) kufs::write_trace_csv(result.trace, a.trace);

    std::cout << "toy dataset: p=" << x.p() << " n=" << x.n() << " clusters=" << spec.clusters
              << " seed=" << a.seed << '\n';
    std::cout << "planted informative rows: " << format_indices(toy.informative_rows) << '\n';
    std::cout << "selected rows: " << format_indices(result.selection.indices) << '\n';

    if (!a.output.empty()) {
      kufs::SelectionManifest m;
      m.input = a.csv.empty() ? "<generated>" : a.csv;
      m.p = x.p();
      m.n = x.n();
      m.k = spec.clusters;
      m.h = spec.informative_features;
      m.method = "kufs";
      m.variant = "bilinear";
      m.mu0 = cfg.mu0;
      m.rho = cfg.rho;
      m.mu_max = cfg.mu_max;
      m.max_iterations = cfg.max_iterations;
      m.stability_window = cfg.stability_window;
      m.selected = result.selection.indices;
      m.objective = result.selection.objective;
      m.iterations = result.selection.iterations;
      m.termination = kufs::to_string(result.selection.termination);
      m.version = kufs::kVersion;
      kufs::save_manifest(m, a.output);
    }

    if (result.selection.indices == toy.informative_rows) {
      std::cout << "selected = planted\n";
      return 0;
    }
    std::cout << "selected != planted\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "kufs demo toy: solver: " << e.what() << '\n';
    return kExitSolver;
  }
}

int run_demo_blowup(const BlowupArgs& a) {
  try {
    const auto raw = kufs::generate_correlated(40, 400, 0.05, a.seed);
    const auto x = kufs::standardize_rows(raw);
    const auto op = kufs::build_target_operator(x, 3);

    // rho = 1.02 keeps the ill-conditioned (mu I - A) window open long enough
    // for the growth to compound well past 1e6 on this input
    kufs::AdmmConfig quad_cfg;
    quad_cfg.rho = 1.02;
    quad_cfg.max_iterations = a.iterations;
    const auto quad_trace = kufs::run_quadratic_demo(op, a.features, quad_cfg);
    kufs::write_trace_csv(quad_trace, a.trace_quadratic);

    kufs::AdmmConfig bi_cfg;
    bi_cfg.rho = 1.02;
    const auto bi = kufs::run_admm(op, a.features, bi_cfg);
    kufs::write_trace_csv(bi.trace, a.trace_bilinear);

    double first = 0, peak = 0;
    if (!quad_trace.records.empty()) {
      first = quad_trace.records.front().v_norm;
      for (const auto& r : quad_trace.records) peak = std::max(peak, r.v_norm);
    }
    const double sqrt_h = std::sqrt(static_cast<double>(a.features));
    double bi_dev = 0;
    for (const auto& r : bi.trace.records) {
      bi_dev = std::max(bi_dev, std::abs(r.v_norm - sqrt_h));
    }

    std::cout << "top eigenvalue of A: " << format_real(op.top_eigenvalue) << '\n';
    std::cout << "quadratic: ||V||_F grows " << format_real(peak / first) << "x over "
              << quad_trace.records.size() << " iterations\n";
    std::cout << "bilinear: max |  ||V||_F - sqrt(h) | = " << format_real(bi_dev) << '\n';
    std::cout << "traces: " << a.trace_quadratic << ' ' << a.trace_bilinear << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "kufs demo blowup: solver: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"K-means derived unsupervised feature selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kufs::kVersion);

  SelectArgs sel;
  auto* select = app.add_subcommand("select", "Select the h most discriminative feature rows");
  select->add_option("--input", sel.input, "Sample-major CSV file")->required();
  select->add_option("--clusters", sel.clusters, "Number of clusters k")
      ->required()
      ->check(CLI::PositiveNumber);
  select->add_option("--features", sel.features, "Number of features h to select")
      ->required()
      ->check(CLI::PositiveNumber);
  select->add_option("--variant", sel.variant, "ADMM variant")
      ->check(CLI::IsMember({"bilinear", "quadratic"}));
  select->add_option("--method", sel.method, "Selection method")
      ->check(CLI::IsMember({"kufs", "laplacian"}));
  select->add_option("--mu0", sel.mu0, "Initial penalty")->check(CLI::PositiveNumber);
  select->add_option("--rho", sel.rho, "Penalty growth factor")->check(CLI::Range(1.0 + 1e-12, 1e6));
  select->add_option("--mu-max", sel.mu_max, "Penalty cap")->check(CLI::PositiveNumber);
  select->add_option("--max-iter", sel.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  select->add_option("--stability-window", sel.stability_window,
                     "Consecutive stable iterations required to stop")
      ->check(CLI::PositiveNumber);
  select->add_flag("--header", sel.header, "First CSV line is a header");
  select->add_option("--knn", sel.knn, "Neighborhood size for --method laplacian")
      ->check(CLI::PositiveNumber);
  select->add_option("--bandwidth", sel.bandwidth,
                     "Heat-kernel bandwidth for --method laplacian (<=0: automatic)");
  select->add_option("--output", sel.output, "Manifest output path");
  select->add_option("--trace", sel.trace, "Per-iteration trace CSV output path");
  select->add_option("--scores", sel.scores,
                     "Write per-feature scores here (--method laplacian only)");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Cluster selected features and score ACC/NMI");
  evaluate->add_option("--input", ev.input, "Sample-major CSV file")->required();
  evaluate->add_option("--labels", ev.labels, "Ground-truth labels, one per line")->required();
  evaluate->add_option("--selection", ev.selection, "Selection manifest JSON")->required();
  evaluate->add_option("--repeats", ev.repeats, "K-means restarts")->check(CLI::PositiveNumber);
  evaluate->add_option("--seed", ev.seed, "Base seed for the restarts");
  evaluate->add_flag("--header", ev.header, "First CSV line is a header");
  evaluate->add_option("--output", ev.output, "Also write the report to this file");

  auto* demo = app.add_subcommand("demo", "Built-in demonstrations");
  demo->require_subcommand(1);

  ToyArgs toy;
  auto* demo_toy = demo->add_subcommand("toy", "Planted-toy selection demo");
  demo_toy->add_option("--seed", toy.seed, "Toy generator seed");
  demo_toy->add_option("--csv", toy.csv, "Also write the toy dataset CSV here");
  demo_toy->add_option("--labels-out", toy.labels_out, "Also write the true labels here");
  demo_toy->add_option("--output", toy.output, "Also write a selection manifest here");
  demo_toy->add_option("--trace", toy.trace, "Per-iteration trace CSV output path");

  BlowupArgs blow;
  auto* demo_blowup =
      demo->add_subcommand("blowup", "Quadratic-vs-bilinear scale blow-up demo");
  demo_blowup->add_option("--seed", blow.seed, "Input generator seed");
  demo_blowup->add_option("--iterations", blow.iterations, "Quadratic iteration budget")
      ->check(CLI::PositiveNumber);
  demo_blowup->add_option("--features", blow.features, "Number of selected features h")
      ->check(CLI::PositiveNumber);
  demo_blowup->add_option("--trace-quadratic", blow.trace_quadratic,
                          "Quadratic trace CSV output path");
  demo_blowup->add_option("--trace-bilinear", blow.trace_bilinear,
                          "Bilinear trace CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "kufs: flags: " << e.what() << '\n';
    std::cerr << "run with --help for usage\n";
    return kExitFlags;
  }

  if (select->parsed()) return run_select(sel);
  if (evaluate->parsed()) return run_evaluate(ev);
  if (demo->parsed()) {
    if (demo_toy->parsed()) return run_demo_toy(toy);
    if (demo_blowup->parsed()) return run_demo_blowup(blow);
  }
  return kExitFlags;
}
