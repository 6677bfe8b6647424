#include "cli.hpp"

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "qsn/error.hpp"
#include "qsn/experiments.hpp"
#include "qsn/output.hpp"
#include "qsn/rng.hpp"

namespace qsn::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  bool force = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  bool paper_scale = false;

  std::optional<std::string> model;
  std::optional<int> n, k, m, count, realizations, bins, max_spins;
  std::optional<double> p, coupling, quota;
  std::optional<bool> connected;
  std::vector<double> fields, h_over_j, lambdas;

  std::optional<std::string> direction, strategy;
  std::optional<double> q, fraction;

  // ground-state
  std::string graph;
  double field = 1.0;
  int network = 0;

  // classical
  std::vector<int> sizes{20, 54};
  int classical_count = 1000;
  double classical_fraction = 0.2;

  // report
  std::vector<std::string> inputs;
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("--out", o.out, "Output directory (default $QSN_OUTPUT_ROOT/<command>)");
  app->add_flag("--force", o.force, "Allow writing into a non-empty output directory");
  app->add_option("--seed", o.seed, "Master seed");
  app->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

void add_model(CLI::App* app, Options& o) {
  app->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("--model", o.model, "Imprinted graph model: er, ws, ba");
  app->add_option("--n", o.n, "Number of spins");
  app->add_option("--p", o.p, "ER link probability or WS rewiring probability");
  app->add_option("--k", o.k, "WS ring degree");
  app->add_option("--m", o.m, "BA attachments per new node");
  app->add_option("--require-connected", o.connected, "Reject disconnected graphs (true/false)");
  app->add_option("--coupling", o.coupling, "Ising coupling J");
  app->add_option("--fields", o.fields, "Transverse fields h")->delimiter(',');
  app->add_option("--h-over-j", o.h_over_j, "Transverse fields as h/J")->delimiter(',');
  app->add_option("--lambdas", o.lambdas, "Grid of lambda = h/(ZJ)")->delimiter(',');
  app->add_option("--count,--ensemble", o.count, "Networks in the ensemble");
  app->add_option("--bins", o.bins, "Histogram bins");
  app->add_option("--max-spins", o.max_spins, "Exact-solver ceiling");
}

void add_experiment(CLI::App* app, Options& o) {
  app->add_option("--realizations", o.realizations, "Attack realizations per network");
  app->add_option("--failure-quota", o.quota, "Tolerated fraction of failed tasks");
  app->add_flag("--paper-scale", o.paper_scale, "n=20, 100 networks, 100 realizations");
}

void add_attack(CLI::App* app, Options& o) {
  app->add_option("--direction", o.direction, "Measurement axis: x or z");
  app->add_option("--q", o.q, "Measurement strength in [0, 1]");
  app->add_option("--fraction", o.fraction, "Fraction of nodes attacked");
  app->add_option("--strategy", o.strategy, "random or preferential");
}

bool any_attack_flag(const Options& o) { return o.direction || o.q || o.fraction || o.strategy; }

ExperimentConfig build_config(const Options& o, bool attack_allowed, bool attack_required) {
  ExperimentConfig c;
  if (!o.config.empty()) c = load_config(o.config);
  if (o.paper_scale) c.apply_paper_scale();
  try {
    if (o.model) c.model.model = parse_graph_model(*o.model);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("--model: ") + e.what());
  }
  if (o.n) c.model.n = *o.n;
  if (o.p) c.model.p = *o.p;
  if (o.k) c.model.k = *o.k;
  if (o.m) c.model.m = *o.m;
  if (o.connected) c.model.require_connected = *o.connected;
  if (o.coupling) c.coupling = *o.coupling;
  if (o.seed) c.master_seed = *o.seed;
  if (o.count) c.ensemble_size = *o.count;
  if (o.realizations) c.realizations = *o.realizations;
  if (o.bins) c.histogram_bins = *o.bins;
  if (o.quota) c.failure_quota = *o.quota;
  if (o.max_spins) c.max_spins = *o.max_spins;
  if (!o.fields.empty()) {
    c.fields = o.fields;
    c.lambdas.clear();
  }
  if (!o.h_over_j.empty()) {
    c.fields.clear();
    for (double v : o.h_over_j) c.fields.push_back(v * c.coupling);
    c.lambdas.clear();
  }
  if (!o.lambdas.empty()) {
    c.lambdas = o.lambdas;
    c.fields.clear();
  }
  if (!attack_allowed && (any_attack_flag(o) || c.attack))
    throw ConfigError("attack: this command runs without an attack");
  if (attack_required && !c.attack) c.attack = AttackSpec{};
  if (any_attack_flag(o)) {
    if (!c.attack) c.attack = AttackSpec{};
    try {
      if (o.direction) c.attack->direction = parse_axis(*o.direction);
      if (o.strategy) c.attack->strategy = parse_strategy(*o.strategy);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("attack: ") + e.what());
    }
    if (o.q) c.attack->strength = *o.q;
    if (o.fraction) c.attack->fraction = *o.fraction;
  }
  c.validate();
  return c;
}

fs::path output_dir(const Options& o, const std::string& command) {
  if (!o.out.empty()) return o.out;
  const char* root = std::getenv("QSN_OUTPUT_ROOT");
  return fs::path(root && *root ? root : "qsn-output") / command;
}

void print_estimate(const ExperimentConfig& c, bool exact) {
  Stream rng(derive_seed(c.master_seed, {1, 0}));
  const Graph g = generate(c.model, rng).graph;
  const std::size_t tasks = std::size_t(c.ensemble_size) * c.field_values().size();
  double per_task = 0.0;
  if (exact) {
    const SparseHamiltonian ham(g, {c.coupling, 1.0}, c.max_spins);
    std::vector<double> x(ham.dimension(), 1.0), y(ham.dimension());
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < 3; ++r) ham.apply(x, y);
    const double matvec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 3;
    // Typical Lanczos cost plus the all-pairs reduction (about n^2/2 passes).
    per_task = matvec * (300.0 + 0.5 * c.model.n * c.model.n);
  } else {
    per_task = 1e-3;
  }
  const int realizations = c.attack && !c.attack->is_identity() ? c.realizations : 1;
  per_task += realizations * 1e-4 * c.model.n * c.model.n;
  std::cerr << "full scale: n=" << c.model.n << ", " << c.ensemble_size << " networks, "
            << realizations << " realizations, " << tasks << " tasks; estimated runtime ~"
            << static_cast<long>(per_task * double(tasks) / omp_get_max_threads() / 60.0 + 1)
            << " min on " << omp_get_max_threads() << " threads\n";
}

int finish(const ExperimentResult& result, const ExperimentConfig& c, const fs::path& dir) {
  write_experiment(result, dir);
  std::cout << "wrote " << result.rows.size() << " rows to " << (dir / "results.csv").string()
            << " (" << result.failures << "/" << result.tasks << " failed tasks)\n";
  if (result.failure_fraction() > c.failure_quota) {
    std::cerr << "error: failure fraction " << result.failure_fraction() << " exceeds quota "
              << c.failure_quota << "\n";
    return kFailureQuota;
  }
  return kOk;
}

int cmd_gen_graphs(const Options& o) {
  const ExperimentConfig c = build_config(o, true, false);
  const fs::path dir = output_dir(o, "gen-graphs");
  prepare_output_dir(dir, o.force);
  const auto graphs = ensemble_graphs(c);
  fs::create_directories(dir / "graphs");
  std::vector<double> degree, clustering, distance;
  int rejections = 0;
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    char name[32];
    std::snprintf(name, sizeof name, "graph_%04zu.txt", g);
    std::ofstream out(dir / "graphs" / name, std::ios::binary);
    write_graph(out, graphs[g].graph);
    if (!out) throw IoError("cannot write " + (dir / "graphs" / name).string());
    rejections += graphs[g].rejections;
    const UnweightedMeasures mm = unweighted_measures(graphs[g].graph);
    for (int k : mm.degree) degree.push_back(k);
    clustering.insert(clustering.end(), mm.clustering.begin(), mm.clustering.end());
    for (Node i = 0; i < mm.n; ++i)
      for (Node j = i + 1; j < mm.n; ++j) distance.push_back(mm.dist(i, j));
  }
  std::string csv = std::string(kSchemaLine) +
                    "\nmeasure,mean,width,skew,p95,max,sample_count,excluded_infinite_count\n";
  fs::create_directories(dir / "histograms");
  nlohmann::json exclusions = nlohmann::json::object();
  const std::pair<const char*, std::vector<double>*> measures[] = {
      {"degree", &degree}, {"clustering", &clustering}, {"distance", &distance}};
  for (const auto& [measure, samples] : measures) {
    double top = 0.0;
    for (double x : *samples)
      if (std::isfinite(x)) top = std::max(top, x);
    std::string stats = ",nan,nan,nan,nan,0,0";
    if (top > 0.0 || std::string(measure) != "distance") {
      const MeasureMoments mom = moments(*samples);
      stats = "," + format_double(mom.mean) + "," + format_double(mom.width) + "," +
              format_double(mom.skewness) + "," + format_double(percentile(*samples, 95.0)) +
              "," + format_double(top) + "," + std::to_string(mom.count) + "," +
              std::to_string(mom.excluded);
      exclusions[measure] = mom.excluded;
    }
    csv += measure + stats + "\n";
    Histogram h;
    const int t = static_cast<int>(top);
    if (std::string(measure) == "clustering")
      h = Histogram::build(measure, *samples, 0.0, 1.0, 20);
    else if (std::string(measure) == "degree")
      h = Histogram::build(measure, *samples, -0.5, t + 0.5, t + 1);
    else
      h = Histogram::build(measure, *samples, 0.5, std::max(1, t) + 0.5, std::max(1, t));
    write_text_file(dir / "histograms" / (std::string(measure) + ".csv"), h.to_csv());
  }
  write_text_file(dir / "measures.csv", csv);
  nlohmann::json meta;
  meta["version"] = kVersion;
  meta["schema"] = 1;
  meta["config"] = config_to_json(c);
  meta["connectivity_rejections"] = rejections;
  meta["excluded_infinite"] = exclusions;
  write_text_file(dir / "meta.json", meta.dump(2) + "\n");
  std::cout << "wrote " << graphs.size() << " graphs to " << (dir / "graphs").string() << "\n";
  return kOk;
}

int cmd_ground_state(const Options& o) {
  const ExperimentConfig c = build_config(o, false, false);
  if (!(o.field >= 0.0)) throw ConfigError("--field: must be non-negative");
  Graph graph;
  if (!o.graph.empty()) {
    std::ifstream in(o.graph);
    if (!in) throw IoError("cannot read " + o.graph);
    graph = read_graph(in);
  } else {
    if (o.network < 0 || o.network >= c.ensemble_size)
      throw ConfigError("--network: must lie in [0, ensemble size)");
    graph = ensemble_graphs(c)[o.network].graph;
  }
  if (graph.size() > c.max_spins)
    throw CapacityError("graph has " + std::to_string(graph.size()) +
                        " spins, above the solver ceiling of " + std::to_string(c.max_spins));
  const fs::path dir = output_dir(o, "ground-state");
  prepare_output_dir(dir, o.force);
  const SparseHamiltonian ham(graph, {c.coupling, o.field}, c.max_spins);
  const GroundState gs = ground_state(ham, c.solver);
  {
    std::ofstream out(dir / "ground_state.bin", std::ios::binary);
    write_ground_state(out, gs);
    if (!out) throw IoError("cannot write ground_state.bin");
  }
  const MiNetwork net = build_mi_network(gs.state);
  {
    std::ofstream out(dir / "mi.csv", std::ios::binary);
    write_mi_csv(out, net);
    if (!out) throw IoError("cannot write mi.csv");
  }
  {
    std::ofstream out(dir / "graph.txt", std::ios::binary);
    write_graph(out, graph);
  }
  nlohmann::json summary;
  summary["version"] = kVersion;
  summary["n"] = graph.size();
  summary["links"] = graph.link_count();
  summary["coupling"] = c.coupling;
  summary["field"] = o.field;
  summary["lambda"] =
      graph.link_count() > 0 ? o.field / (graph.coordination() * c.coupling) : kInfinity;
  summary["energy"] = gs.energy;
  summary["residual"] = gs.residual;
  summary["matvecs"] = gs.matvecs;
  write_text_file(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << "E0 = " << format_double(gs.energy) << " (residual " << gs.residual << ", "
            << gs.matvecs << " matvecs)\n";
  return kOk;
}

int cmd_experiment(const Options& o, const std::string& command) {
  const bool is_attack = command == "attack";
  const bool is_mf = command == "mf";
  const ExperimentConfig c = build_config(o, is_attack || is_mf, is_attack);
  if (!is_mf && c.model.n > c.max_spins)
    throw CapacityError("n = " + std::to_string(c.model.n) + " exceeds the exact-solver ceiling of " +
                        std::to_string(c.max_spins) + " spins");
  const fs::path dir = output_dir(o, command);
  prepare_output_dir(dir, o.force);
  if (o.paper_scale) print_estimate(c, !is_mf);
  ExperimentResult result;
  if (is_mf) result = run_mf_pipeline(c);
  else if (is_attack) result = run_attack_experiment(c);
  else result = run_ground_state_sweep(c);
  return finish(result, c, dir);
}

int cmd_classical(const Options& o) {
  ClassicalConfig c;
  c.sizes = o.sizes;
  c.count = o.classical_count;
  c.fraction = o.classical_fraction;
  if (o.seed) c.master_seed = *o.seed;
  if (o.connected) c.require_connected = *o.connected;
  for (int n : c.sizes)
    if (n < 5) throw ConfigError("--sizes: every size must be at least 5");
  if (c.count < 1) throw ConfigError("--count: must be at least 1");
  if (!(c.fraction >= 0.0 && c.fraction <= 1.0)) throw ConfigError("--fraction: must lie in [0, 1]");
  const fs::path dir = output_dir(o, "classical");
  prepare_output_dir(dir, o.force);
  const ClassicalResult result = run_classical_attack_study(c);
  write_classical(result, dir);
  std::cout << "wrote " << result.rows.size() << " rows to " << (dir / "results.csv").string()
            << "\n";
  return kOk;
}

int cmd_report(const Options& o) {
  std::vector<ResultRow> rows;
  for (const auto& input : o.inputs) {
    const auto part = parse_results_csv(read_text_file(fs::path(input) / "results.csv"));
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const auto panels = collapse_report(rows);
  const fs::path dir = output_dir(o, "report");
  prepare_output_dir(dir, o.force);
  write_collapse(panels, dir);
  for (const auto& p : panels)
    std::cout << p.model << ": " << p.curves.size() << " curves, max deviation "
              << format_double(p.max_deviation) << "\n";
  return kOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Emergent mutual-information networks of transverse Ising ground states"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);
  Options o;

  auto* gen = app.add_subcommand("gen-graphs", "Generate an imprinted-graph ensemble");
  add_common(gen, o);
  add_model(gen, o);

  auto* gs = app.add_subcommand("ground-state", "Solve one ground state and its MI network");
  add_common(gs, o);
  add_model(gs, o);
  gs->add_option("--graph", o.graph, "Graph file (default: a network of the ensemble)")
      ->check(CLI::ExistingFile);
  gs->add_option("--field", o.field, "Transverse field h");
  gs->add_option("--network", o.network, "Ensemble index used without --graph");

  auto* sweep = app.add_subcommand("sweep", "Ensemble ground-state sweep over h");
  add_common(sweep, o);
  add_model(sweep, o);
  add_experiment(sweep, o);

  auto* attack = app.add_subcommand("attack", "Sweep with projective-measurement attacks");
  add_common(attack, o);
  add_model(attack, o);
  add_experiment(attack, o);
  add_attack(attack, o);

  auto* mf = app.add_subcommand("mf", "Generalized and uniform mean-field sweep");
  add_common(mf, o);
  add_model(mf, o);
  add_experiment(mf, o);
  add_attack(mf, o);

  auto* classical = app.add_subcommand("classical", "Node removal on classical graphs");
  add_common(classical, o);
  classical->add_option("--sizes", o.sizes, "Network sizes")->delimiter(',');
  classical->add_option("--count", o.classical_count, "Networks per model and size");
  classical->add_option("--fraction", o.classical_fraction, "Fraction of nodes removed");
  classical->add_option("--require-connected", o.connected, "Reject disconnected graphs");

  auto* report = app.add_subcommand("report", "Normalized-degree collapse across runs");
  add_common(report, o);
  report->add_option("inputs", o.inputs, "Experiment output directories")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (o.jobs) omp_set_num_threads(*o.jobs);
    if (*gen) return cmd_gen_graphs(o);
    if (*gs) return cmd_ground_state(o);
    if (*sweep) return cmd_experiment(o, "sweep");
    if (*attack) return cmd_experiment(o, "attack");
    if (*mf) return cmd_experiment(o, "mf");
    if (*classical) return cmd_classical(o);
    if (*report) return cmd_report(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const ReportError& e) {
    std::cerr << "report error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kFailureQuota;
  }
  return kUsage;
}

}  // namespace qsn::cli
