#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qsn/error.hpp"
#include "qsn/graph.hpp"
#include "qsn/hilbert.hpp"
#include "qsn/meanfield.hpp"
#include "qsn/minet.hpp"
#include "qsn/quantum_state.hpp"

namespace qsn {

/// h/J = 0 followed by 13 log-spaced values from 0.25 to 16.
std::vector<double> default_field_grid();

struct ExperimentConfig {
  GraphModelSpec model{GraphModel::erdos_renyi, 14, 0.38, 4, 3, true};
  double coupling = 1.0;
  /// Transverse fields h. When empty, `lambdas` is used (h = lambda Z J with
  /// the model's nominal Z); when both are empty the default grid (times J).
  std::vector<double> fields;
  std::vector<double> lambdas;
  int ensemble_size = 20;
  int realizations = 20;
  std::optional<AttackSpec> attack;
  std::uint64_t master_seed = 1;
  SolverOptions solver;
  MfOptions mean_field;
  int histogram_bins = 50;
  double failure_quota = 0.05;
  int max_spins = kDefaultMaxSpins;
  std::string output_dir;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  std::vector<double> field_values() const;
  double lambda_of(double field) const;
  /// Switches to n = 20 with 100 networks and 100 attack realizations.
  void apply_paper_scale();
};

/// Field-for-field JSON mapping; unknown keys raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);
/// Parses a config file; syntax errors report the line number.
ExperimentConfig load_config(const std::filesystem::path& path);

struct ResultRow {
  std::string model;
  std::string method;  // exact, mf, mf0
  int n = 0;
  double h = 0.0;
  double lambda = 0.0;
  std::string measure;  // k (as k/(n-1)), C, d
  double mean = 0.0;
  double width = 0.0;
  double skew = 0.0;
  std::size_t sample_count = 0;
  std::size_t excluded_infinite_count = 0;
  std::string attack_direction = "none";
  double attack_q = 0.0;
  double attack_fraction = 0.0;
  std::string attack_strategy = "none";
  std::uint64_t seed = 0;
  int networks = 0;
  /// Mean and standard deviation of the per-network means.
  double network_mean_avg = 0.0;
  double network_mean_sd = 0.0;

  /// Standard error of `mean` treating networks as the independent units.
  double standard_error() const;
  std::string variant() const;
};

std::string results_csv_header();
std::string to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_results_csv(const std::string& text);

struct Histogram {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> counts;
  std::size_t excluded = 0;  // non-finite samples

  static Histogram build(std::string name, const std::vector<double>& samples, double lo,
                         double hi, int bins);
  std::string to_csv() const;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<Histogram> histograms;
  nlohmann::json meta;
  int tasks = 0;
  int failures = 0;

  double failure_fraction() const { return tasks == 0 ? 0.0 : double(failures) / tasks; }
};

/// Reduced-matrix tables keyed by (model, n, seed, network, field), shared
/// between experiments that reuse the same ensemble.
class RdmCache {
 public:
  std::shared_ptr<const RdmTable> find(const std::string& key) const;
  void insert(const std::string& key, std::shared_ptr<const RdmTable> table);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const RdmTable>> tables_;
};

/// round(fraction n) distinct nodes, sorted. Preferential draws are
/// sequential without replacement with weights fixed at the pre-attack
/// weighted degrees; when every remaining weight is zero the draw is uniform.
NodeSet choose_attack_targets(const MiNetwork& net, double fraction, TargetStrategy strategy,
                              Stream& rng);

/// The ensemble graphs of `config` in network order.
std::vector<GeneratedGraph> ensemble_graphs(const ExperimentConfig& config);

ExperimentResult run_ground_state_sweep(const ExperimentConfig& config, RdmCache* cache = nullptr);
ExperimentResult run_attack_experiment(const ExperimentConfig& config, RdmCache* cache = nullptr);
/// Generalized mean field on every network plus uniform (mf0) curves.
ExperimentResult run_mf_pipeline(const ExperimentConfig& config);

/// Writes results.csv, histograms/<point>.csv and meta.json.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Classical node removal on the imprinted graphs.

struct ClassicalConfig {
  std::vector<int> sizes{20, 54};
  int count = 1000;
  double fraction = 0.2;
  std::uint64_t master_seed = 1;
  bool require_connected = false;

  /// Model parameters used at size n: the quantum-ensemble parameters at
  /// n <= 20, and ER p = 0.04, WS K = 4 p = 0.5, BA m = 2 above.
  std::vector<GraphModelSpec> models_for(int n) const;
};

struct ClassicalRow {
  std::string model;
  int n = 0;
  std::string strategy;  // none, random, targeted
  std::string measure;   // degree, clustering, distance
  double mean = 0.0;
  double width = 0.0;
  double skew = 0.0;
  double p95 = 0.0;
  double max = 0.0;
  std::size_t sample_count = 0;
  std::size_t excluded_infinite_count = 0;
};

struct ClassicalResult {
  std::vector<ClassicalRow> rows;
  std::vector<Histogram> histograms;
  nlohmann::json meta;

  const ClassicalRow& row(const std::string& model, int n, const std::string& strategy,
                          const std::string& measure) const;
};

ClassicalResult run_classical_attack_study(const ClassicalConfig& config);
void write_classical(const ClassicalResult& result, const std::filesystem::path& dir);

/// Linear-interpolated percentile (0..100) of finite samples.
double percentile(std::vector<double> samples, double pct);

// ---------------------------------------------------------------------------
// Normalized Mean[k]/Mean[k(h=0)] curves.

struct CollapseCurve {
  std::string model;
  std::string variant;
  std::vector<double> lambdas;
  std::vector<double> normalized;
};

struct CollapsePanel {
  std::string model;
  std::vector<CollapseCurve> curves;
  double max_deviation = 0.0;  // max over lambda and curve pairs
};

struct ReportError : Error {
  using Error::Error;
};

/// Groups exact-method degree rows by model and attack variant. Throws
/// ReportError on a missing h = 0 row or curves with different lambda grids.
std::vector<CollapsePanel> collapse_report(const std::vector<ResultRow>& rows);
void write_collapse(const std::vector<CollapsePanel>& panels, const std::filesystem::path& dir);

}  // namespace qsn
