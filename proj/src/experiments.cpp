#include "qsn/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>

#include "qsn/error.hpp"
#include "qsn/output.hpp"
#include "qsn/rng.hpp"

namespace qsn {

using nlohmann::json;

namespace {

constexpr std::uint64_t kGraphStream = 1;
constexpr std::uint64_t kAttackStream = 2;

enum class Method { exact, mf };

const char* method_name(Method m) { return m == Method::exact ? "exact" : "mf"; }

std::string cache_key(const ExperimentConfig& c, Method method, int g, double h) {
  std::ostringstream key;
  key << method_name(method) << '|' << c.model.name() << '|' << c.model.n << '|'
      << std::bit_cast<std::uint64_t>(c.model.p) << '|' << c.model.k << '|' << c.model.m << '|'
      << c.model.require_connected << '|' << c.master_seed << '|' << g << '|'
      << std::bit_cast<std::uint64_t>(c.coupling) << '|' << std::bit_cast<std::uint64_t>(h) << '|'
      << std::bit_cast<std::uint64_t>(c.solver.tolerance) << '|'
      << std::bit_cast<std::uint64_t>(c.mean_field.tolerance);
  return key.str();
}

struct TaskOutput {
  bool failed = false;
  std::string error;
  std::exception_ptr fatal;
  std::vector<double> k, c, d;
};

void append_measures(const MiNetwork& net, TaskOutput& out) {
  const int n = net.size();
  const double scale = n > 1 ? 1.0 / (n - 1) : 0.0;
  for (double k : weighted_degree(net)) out.k.push_back(k * scale);
  for (double c : weighted_clustering(net)) out.c.push_back(c);
  const PathLengths paths = weighted_shortest_paths(net);
  for (Node i = 0; i < n; ++i)
    for (Node j = i + 1; j < n; ++j) out.d.push_back(paths(i, j));
}

std::shared_ptr<const RdmTable> compute_table(const ExperimentConfig& c, Method method,
                                              const Graph& g, double h) {
  if (method == Method::exact) {
    const SparseHamiltonian ham(g, {c.coupling, h}, c.max_spins);
    const GroundState gs = ground_state(ham, c.solver);
    return std::make_shared<const RdmTable>(rdm_table(gs.state));
  }
  const GeneralMeanField mf = mf_general_solve(g, c.coupling, h, c.mean_field);
  return std::make_shared<const RdmTable>(mf_rdm_table(mf.magnetization));
}

bool attack_active(const ExperimentConfig& c) { return c.attack && !c.attack->is_identity(); }

TaskOutput run_task(const ExperimentConfig& c, Method method, const Graph& graph, int g,
                    double h, RdmCache* cache) {
  TaskOutput out;
  try {
    std::shared_ptr<const RdmTable> table;
    const std::string key = cache ? cache_key(c, method, g, h) : std::string();
    if (cache) table = cache->find(key);
    if (!table) {
      table = compute_table(c, method, graph, h);
      if (cache) cache->insert(key, table);
    }
    if (!attack_active(c)) {
      append_measures(build_mi_network(*table), out);
      return out;
    }
    const AttackSpec& a = *c.attack;
    MiNetwork base;
    if (a.strategy == TargetStrategy::preferential) base = build_mi_network(*table);
    else base = MiNetwork(table->n);
    for (int r = 0; r < c.realizations; ++r) {
      Stream rng(derive_seed(c.master_seed, {kAttackStream, std::uint64_t(g), std::uint64_t(r)}));
      const NodeSet targets = choose_attack_targets(base, a.fraction, a.strategy, rng);
      append_measures(build_mi_network(*table, targets, a.direction, a.strength), out);
    }
  } catch (const ConvergenceError& e) {
    out = {};
    out.failed = true;
    out.error = e.what();
  } catch (const InvalidDensityMatrix& e) {
    out = {};
    out.failed = true;
    out.error = e.what();
  } catch (...) {
    out = {};
    out.fatal = std::current_exception();
  }
  return out;
}

double finite_mean(std::span<const double> v, bool& any) {
  double sum = 0.0;
  std::size_t count = 0;
  for (double x : v)
    if (std::isfinite(x)) {
      sum += x;
      ++count;
    }
  any = count > 0;
  return any ? sum / static_cast<double>(count) : 0.0;
}

std::string point_name(const std::string& method, const std::string& model, int n, double h,
                       const std::string& variant, const std::string& measure) {
  std::string name = method + "_" + model + "_n" + std::to_string(n) + "_h" + format_double(h);
  if (variant != "none") name += "_" + variant;
  return name + "_" + measure;
}

ResultRow base_row(const ExperimentConfig& c, const std::string& method, double h) {
  ResultRow row;
  row.model = c.model.name();
  row.method = method;
  row.n = c.model.n;
  row.h = h;
  row.lambda = c.lambda_of(h);
  row.seed = c.master_seed;
  if (c.attack) {
    row.attack_direction = to_string(c.attack->direction);
    row.attack_q = c.attack->strength;
    row.attack_fraction = c.attack->fraction;
    row.attack_strategy = to_string(c.attack->strategy);
  }
  return row;
}

json base_meta(const ExperimentConfig& c) {
  json meta;
  meta["version"] = kVersion;
  meta["schema"] = 1;
  meta["master_seed"] = c.master_seed;
  meta["config"] = config_to_json(c);
  meta["nominal_coordination"] = c.model.nominal_coordination();
  meta["absent_link_threshold"] = kAbsentLinkThreshold;
  meta["width"] = "population standard deviation of pooled samples";
  meta["network_mean_sd"] = "sample standard deviation of per-network means";
  meta["degree_normalization"] = "k/(n-1)";
  meta["tolerances"] = {{"solver_residual", c.solver.tolerance},
                        {"mean_field", c.mean_field.tolerance},
                        {"eigenvalue_clamp", kEigenvalueClamp},
                        {"eigenvalue_error", kEigenvalueError}};
  return meta;
}

ExperimentResult run_ensemble(const ExperimentConfig& config, Method method, RdmCache* cache) {
  config.validate();
  if (method == Method::exact && config.model.n > config.max_spins)
    throw CapacityError("n = " + std::to_string(config.model.n) +
                        " exceeds the exact-solver ceiling of " +
                        std::to_string(config.max_spins) + " spins");

  const std::vector<GeneratedGraph> graphs = ensemble_graphs(config);
  const std::vector<double> fields = config.field_values();
  const int G = config.ensemble_size;
  const int H = static_cast<int>(fields.size());
  const int tasks = G * H;
  std::vector<TaskOutput> outputs(tasks);

#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < tasks; ++t) {
    const int g = t / H;
    const int hi = t % H;
    outputs[t] = run_task(config, method, graphs[g].graph, g, fields[hi], cache);
  }
  for (const auto& o : outputs)
    if (o.fatal) std::rethrow_exception(o.fatal);

  ExperimentResult result;
  result.tasks = tasks;
  result.meta = base_meta(config);
  json failures = json::array();
  for (int t = 0; t < tasks; ++t) {
    if (!outputs[t].failed) continue;
    ++result.failures;
    failures.push_back({{"network", t / H}, {"h", fields[t % H]}, {"error", outputs[t].error}});
  }
  int rejections = 0;
  for (const auto& g : graphs) rejections += g.rejections;
  result.meta["method"] = method_name(method);
  result.meta["tasks"] = tasks;
  result.meta["failures"] = failures;
  result.meta["connectivity_rejections"] = rejections;
  result.meta["effective_realizations"] = attack_active(config) ? config.realizations : 1;

  const std::string variant = base_row(config, "", 0.0).variant();
  json exclusions = json::object();
  for (int hi = 0; hi < H; ++hi) {
    const double h = fields[hi];
    const std::pair<const char*, std::vector<double> TaskOutput::*> measures[] = {
        {"k", &TaskOutput::k}, {"C", &TaskOutput::c}, {"d", &TaskOutput::d}};
    for (const auto& [measure, member] : measures) {
      std::vector<double> pooled;
      std::vector<double> network_means;
      for (int g = 0; g < G; ++g) {
        const TaskOutput& o = outputs[std::size_t(g) * H + hi];
        if (o.failed) continue;
        const auto& samples = o.*member;
        pooled.insert(pooled.end(), samples.begin(), samples.end());
        bool any = false;
        const double m = finite_mean(samples, any);
        if (any) network_means.push_back(m);
      }
      ResultRow row = base_row(config, method_name(method), h);
      row.measure = measure;
      MeasureMoments mom;
      if (std::any_of(pooled.begin(), pooled.end(), [](double x) { return std::isfinite(x); })) {
        mom = moments(pooled);
      } else {
        mom.mean = mom.width = mom.skewness = std::nan("");
        mom.excluded = pooled.size();
      }
      row.mean = mom.mean;
      row.width = mom.width;
      row.skew = mom.skewness;
      row.sample_count = mom.count;
      row.excluded_infinite_count = mom.excluded;
      row.networks = static_cast<int>(network_means.size());
      if (!network_means.empty()) {
        bool any = false;
        row.network_mean_avg = finite_mean(network_means, any);
        double ss = 0.0;
        for (double v : network_means) ss += (v - row.network_mean_avg) * (v - row.network_mean_avg);
        row.network_mean_sd =
            network_means.size() > 1 ? std::sqrt(ss / double(network_means.size() - 1)) : 0.0;
      }
      result.rows.push_back(row);

      const std::string name = point_name(row.method, row.model, row.n, h, variant, measure);
      double hi_edge = 1.0;
      if (std::string(measure) == "d") {
        hi_edge = 0.0;
        for (double x : pooled)
          if (std::isfinite(x)) hi_edge = std::max(hi_edge, x);
        if (hi_edge == 0.0) hi_edge = 1.0;
      }
      result.histograms.push_back(
          Histogram::build(name, pooled, 0.0, hi_edge, config.histogram_bins));
      exclusions[name] = mom.excluded;
    }
  }
  result.meta["excluded_infinite"] = exclusions;
  return result;
}

}  // namespace

double ResultRow::standard_error() const {
  return networks > 0 ? network_mean_sd / std::sqrt(double(networks)) : 0.0;
}

std::string ResultRow::variant() const {
  if (attack_direction == "none") return "none";
  return attack_direction + "_q" + format_double(attack_q) + "_f" + format_double(attack_fraction) +
         "_" + attack_strategy;
}

std::string results_csv_header() {
  return "model,method,n,h,lambda,measure,mean,width,skew,sample_count,excluded_infinite_count,"
         "attack_direction,attack_q,attack_fraction,attack_strategy,seed,networks,"
         "network_mean_avg,network_mean_sd";
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << kSchemaLine << '\n' << results_csv_header() << '\n';
  for (const auto& r : rows) {
    out << r.model << ',' << r.method << ',' << r.n << ',' << format_double(r.h) << ','
        << format_double(r.lambda) << ',' << r.measure << ',' << format_double(r.mean) << ','
        << format_double(r.width) << ',' << format_double(r.skew) << ',' << r.sample_count << ','
        << r.excluded_infinite_count << ',' << r.attack_direction << ','
        << format_double(r.attack_q) << ',' << format_double(r.attack_fraction) << ','
        << r.attack_strategy << ',' << r.seed << ',' << r.networks << ','
        << format_double(r.network_mean_avg) << ',' << format_double(r.network_mean_sd) << '\n';
  }
  return out.str();
}

std::vector<ResultRow> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool header = false;
  std::vector<ResultRow> rows;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != results_csv_header())
        throw IoError("results.csv line " + std::to_string(lineno) + ": unexpected header");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::string cell;
    std::istringstream cells(line);
    while (std::getline(cells, cell, ',')) f.push_back(cell);
    if (f.size() != 19)
      throw IoError("results.csv line " + std::to_string(lineno) + ": expected 19 fields");
    try {
      ResultRow r;
      r.model = f[0];
      r.method = f[1];
      r.n = std::stoi(f[2]);
      r.h = parse_double(f[3]);
      r.lambda = parse_double(f[4]);
      r.measure = f[5];
      r.mean = parse_double(f[6]);
      r.width = parse_double(f[7]);
      r.skew = parse_double(f[8]);
      r.sample_count = std::stoull(f[9]);
      r.excluded_infinite_count = std::stoull(f[10]);
      r.attack_direction = f[11];
      r.attack_q = parse_double(f[12]);
      r.attack_fraction = parse_double(f[13]);
      r.attack_strategy = f[14];
      r.seed = std::stoull(f[15]);
      r.networks = std::stoi(f[16]);
      r.network_mean_avg = parse_double(f[17]);
      r.network_mean_sd = parse_double(f[18]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw IoError("results.csv line " + std::to_string(lineno) + ": malformed number");
    }
  }
  if (!header) throw IoError("results.csv: missing header");
  return rows;
}

Histogram Histogram::build(std::string name, const std::vector<double>& samples, double lo,
                           double hi, int bins) {
  if (!(hi > lo) || bins < 1) throw InvalidArgument("histogram needs hi > lo and bins >= 1");
  Histogram h;
  h.name = std::move(name);
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / bins;
  for (double x : samples) {
    if (!std::isfinite(x)) {
      ++h.excluded;
      continue;
    }
    long b = static_cast<long>(std::floor((x - lo) / width));
    b = std::clamp(b, 0L, long(bins) - 1);
    ++h.counts[b];
  }
  return h;
}

std::string Histogram::to_csv() const {
  std::ostringstream out;
  out << kSchemaLine << '\n' << "bin_left,bin_right,count\n";
  const int bins = static_cast<int>(counts.size());
  const double width = (hi - lo) / bins;
  for (int b = 0; b < bins; ++b) {
    const double left = lo + b * width;
    const double right = b + 1 == bins ? hi : lo + (b + 1) * width;
    out << format_double(left) << ',' << format_double(right) << ',' << counts[b] << '\n';
  }
  return out.str();
}

std::shared_ptr<const RdmTable> RdmCache::find(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = tables_.find(key);
  return it == tables_.end() ? nullptr : it->second;
}

void RdmCache::insert(const std::string& key, std::shared_ptr<const RdmTable> table) {
  std::lock_guard lock(mutex_);
  tables_.emplace(key, std::move(table));
}

std::size_t RdmCache::size() const {
  std::lock_guard lock(mutex_);
  return tables_.size();
}

NodeSet choose_attack_targets(const MiNetwork& net, double fraction, TargetStrategy strategy,
                              Stream& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw InvalidArgument("attack fraction must lie in [0, 1]");
  const int n = net.size();
  const int count = static_cast<int>(std::lround(fraction * n));
  std::vector<Node> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  NodeSet chosen;
  chosen.reserve(count);
  if (strategy == TargetStrategy::random) {
    for (int s = 0; s < count; ++s) {
      const auto pick = s + static_cast<int>(rng.below(std::uint64_t(n - s)));
      std::swap(pool[s], pool[pick]);
      chosen.push_back(pool[s]);
    }
  } else {
    const std::vector<double> weight = weighted_degree(net);
    for (int s = 0; s < count; ++s) {
      const int remaining = n - s;
      double total = 0.0;
      for (int t = s; t < n; ++t) total += weight[pool[t]];
      int pick = s;
      if (total > 0.0) {
        const double u = rng.uniform() * total;
        double acc = 0.0;
        pick = -1;
        int last_positive = s;
        for (int t = s; t < n; ++t) {
          if (weight[pool[t]] <= 0.0) continue;
          last_positive = t;
          acc += weight[pool[t]];
          if (u < acc) {
            pick = t;
            break;
          }
        }
        if (pick < 0) pick = last_positive;
      } else {
        pick = s + static_cast<int>(rng.below(std::uint64_t(remaining)));
      }
      std::swap(pool[s], pool[pick]);
      chosen.push_back(pool[s]);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<GeneratedGraph> ensemble_graphs(const ExperimentConfig& config) {
  std::vector<GeneratedGraph> graphs;
  graphs.reserve(config.ensemble_size);
  for (int g = 0; g < config.ensemble_size; ++g) {
    Stream rng(derive_seed(config.master_seed, {kGraphStream, std::uint64_t(g)}));
    graphs.push_back(generate(config.model, rng));
  }
  return graphs;
}

ExperimentResult run_ground_state_sweep(const ExperimentConfig& config, RdmCache* cache) {
  if (config.attack) throw ConfigError("attack: the sweep runs without an attack");
  return run_ensemble(config, Method::exact, cache);
}

ExperimentResult run_attack_experiment(const ExperimentConfig& config, RdmCache* cache) {
  if (!config.attack) throw ConfigError("attack: an attack specification is required");
  return run_ensemble(config, Method::exact, cache);
}

ExperimentResult run_mf_pipeline(const ExperimentConfig& config) {
  ExperimentResult result = run_ensemble(config, Method::mf, nullptr);
  for (double h : config.field_values()) {
    const double lambda = config.lambda_of(h);
    const NetworkMeans means =
        attack_active(config)
            ? mf0_attacked_mean_measures(lambda, config.model.n, config.attack->fraction,
                                         config.attack->strength, config.attack->direction)
            : mf0_measures(lambda, config.model.n);
    const std::pair<const char*, double> values[] = {
        {"k", means.degree}, {"C", means.clustering}, {"d", means.distance}};
    for (const auto& [measure, value] : values) {
      ResultRow row = base_row(config, "mf0", h);
      row.measure = measure;
      row.mean = value;
      row.sample_count = std::isfinite(value) ? 1 : 0;
      row.excluded_infinite_count = std::isfinite(value) ? 0 : 1;
      result.rows.push_back(row);
    }
  }
  return result;
}

void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir) {
  write_text_file(dir / "results.csv", to_csv(result.rows));
  std::filesystem::create_directories(dir / "histograms");
  for (const auto& h : result.histograms)
    write_text_file(dir / "histograms" / (h.name + ".csv"), h.to_csv());
  write_text_file(dir / "meta.json", result.meta.dump(2) + "\n");
}

}  // namespace qsn
