#include <algorithm>
#include <cmath>

#include "qsn/error.hpp"
#include "qsn/experiments.hpp"
#include "qsn/output.hpp"
#include "qsn/rng.hpp"

namespace qsn {

namespace {

constexpr std::uint64_t kClassicalGraphStream = 11;
constexpr std::uint64_t kRemovalStream = 12;

struct Samples {
  std::vector<double> degree, clustering, distance;
};

void collect(const Graph& g, Samples& out) {
  const UnweightedMeasures m = unweighted_measures(g);
  for (int k : m.degree) out.degree.push_back(k);
  out.clustering.insert(out.clustering.end(), m.clustering.begin(), m.clustering.end());
  for (Node i = 0; i < m.n; ++i)
    for (Node j = i + 1; j < m.n; ++j) out.distance.push_back(m.dist(i, j));
}

double finite_max(const std::vector<double>& v) {
  double best = 0.0;
  for (double x : v)
    if (std::isfinite(x)) best = std::max(best, x);
  return best;
}

}  // namespace

double percentile(std::vector<double> samples, double pct) {
  if (!(pct >= 0.0 && pct <= 100.0)) throw InvalidArgument("percentile must lie in [0, 100]");
  std::erase_if(samples, [](double x) { return !std::isfinite(x); });
  if (samples.empty()) throw InvalidArgument("percentile of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double pos = pct / 100.0 * double(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  return samples[lo] + (pos - double(lo)) * (samples[hi] - samples[lo]);
}

std::vector<GraphModelSpec> ClassicalConfig::models_for(int n) const {
  std::vector<GraphModelSpec> out;
  if (n <= 20) {
    out.push_back({GraphModel::erdos_renyi, n, 0.26, 4, 2, require_connected});
    out.push_back({GraphModel::watts_strogatz, n, 0.5, 4, 2, require_connected});
    out.push_back({GraphModel::barabasi_albert, n, 0.0, 4, 2, require_connected});
  } else {
    out.push_back({GraphModel::erdos_renyi, n, 0.04, 4, 2, require_connected});
    out.push_back({GraphModel::watts_strogatz, n, 0.5, 4, 2, require_connected});
    out.push_back({GraphModel::barabasi_albert, n, 0.0, 4, 2, require_connected});
  }
  return out;
}

const ClassicalRow& ClassicalResult::row(const std::string& model, int n,
                                         const std::string& strategy,
                                         const std::string& measure) const {
  for (const auto& r : rows)
    if (r.model == model && r.n == n && r.strategy == strategy && r.measure == measure) return r;
  throw InvalidArgument("no classical row for " + model + " n=" + std::to_string(n) + " " +
                        strategy + " " + measure);
}

ClassicalResult run_classical_attack_study(const ClassicalConfig& config) {
  if (config.count < 1) throw ConfigError("count: must be at least 1");
  if (!(config.fraction >= 0.0 && config.fraction <= 1.0))
    throw ConfigError("fraction: must lie in [0, 1]");
  if (config.sizes.empty()) throw ConfigError("sizes: at least one size is required");

  ClassicalResult result;
  result.meta["version"] = kVersion;
  result.meta["schema"] = 1;
  result.meta["master_seed"] = config.master_seed;
  result.meta["count"] = config.count;
  result.meta["fraction"] = config.fraction;
  result.meta["require_connected"] = config.require_connected;
  result.meta["width"] = "population standard deviation of pooled samples";
  result.meta["percentile"] = "linear interpolation between order statistics";
  nlohmann::json exclusions = nlohmann::json::object();
  nlohmann::json models = nlohmann::json::array();

  const char* strategies[] = {"none", "random", "targeted"};
  for (int n : config.sizes) {
    const auto specs = config.models_for(n);
    for (std::size_t mi = 0; mi < specs.size(); ++mi) {
      const GraphModelSpec& spec = specs[mi];
      try {
        spec.validate();
      } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("sizes: ") + e.what());
      }
      models.push_back({{"model", spec.name()}, {"n", n}, {"p", spec.p}, {"k", spec.k},
                        {"m", spec.m}});
      const int count = config.count;
      std::vector<Samples> per_graph(std::size_t(count) * 3);

#pragma omp parallel for schedule(dynamic, 8)
      for (int g = 0; g < count; ++g) {
        Stream graph_rng(derive_seed(config.master_seed,
                                     {kClassicalGraphStream, std::uint64_t(n), mi, std::uint64_t(g)}));
        const Graph graph = generate(spec, graph_rng).graph;
        collect(graph, per_graph[std::size_t(g) * 3]);
        Stream removal_rng(
            derive_seed(config.master_seed, {kRemovalStream, std::uint64_t(n), mi, std::uint64_t(g)}));
        collect(remove_nodes(graph, config.fraction, RemovalStrategy::random, removal_rng),
                per_graph[std::size_t(g) * 3 + 1]);
        collect(remove_nodes(graph, config.fraction, RemovalStrategy::targeted, removal_rng),
                per_graph[std::size_t(g) * 3 + 2]);
      }

      for (int s = 0; s < 3; ++s) {
        Samples pooled;
        for (int g = 0; g < count; ++g) {
          const Samples& x = per_graph[std::size_t(g) * 3 + s];
          pooled.degree.insert(pooled.degree.end(), x.degree.begin(), x.degree.end());
          pooled.clustering.insert(pooled.clustering.end(), x.clustering.begin(),
                                   x.clustering.end());
          pooled.distance.insert(pooled.distance.end(), x.distance.begin(), x.distance.end());
        }
        const std::pair<const char*, const std::vector<double>*> measures[] = {
            {"degree", &pooled.degree},
            {"clustering", &pooled.clustering},
            {"distance", &pooled.distance}};
        for (const auto& [measure, samples] : measures) {
          ClassicalRow row;
          row.model = spec.name();
          row.n = n;
          row.strategy = strategies[s];
          row.measure = measure;
          const bool any =
              std::any_of(samples->begin(), samples->end(), [](double x) { return std::isfinite(x); });
          if (any) {
            const MeasureMoments mom = moments(*samples);
            row.mean = mom.mean;
            row.width = mom.width;
            row.skew = mom.skewness;
            row.sample_count = mom.count;
            row.excluded_infinite_count = mom.excluded;
            row.p95 = percentile(*samples, 95.0);
            row.max = finite_max(*samples);
          } else {
            row.mean = row.width = row.skew = row.p95 = std::nan("");
            row.excluded_infinite_count = samples->size();
          }
          result.rows.push_back(row);

          const std::string name = "classical_" + row.model + "_n" + std::to_string(n) + "_" +
                                   row.strategy + "_" + measure;
          Histogram h;
          if (std::string(measure) == "clustering") {
            h = Histogram::build(name, *samples, 0.0, 1.0, 20);
          } else if (std::string(measure) == "degree") {
            const int top = static_cast<int>(row.max);
            h = Histogram::build(name, *samples, -0.5, top + 0.5, top + 1);
          } else {
            const int top = std::max(1, static_cast<int>(row.max));
            h = Histogram::build(name, *samples, 0.5, top + 0.5, top);
          }
          result.histograms.push_back(std::move(h));
          exclusions[name] = row.excluded_infinite_count;
        }
      }
    }
  }
  result.meta["models"] = models;
  result.meta["excluded_infinite"] = exclusions;
  return result;
}

void write_classical(const ClassicalResult& result, const std::filesystem::path& dir) {
  std::string csv = std::string(kSchemaLine) + "\n" +
                    "model,n,strategy,measure,mean,width,skew,p95,max,sample_count,"
                    "excluded_infinite_count\n";
  for (const auto& r : result.rows) {
    csv += r.model + "," + std::to_string(r.n) + "," + r.strategy + "," + r.measure + "," +
           format_double(r.mean) + "," + format_double(r.width) + "," + format_double(r.skew) +
           "," + format_double(r.p95) + "," + format_double(r.max) + "," +
           std::to_string(r.sample_count) + "," + std::to_string(r.excluded_infinite_count) + "\n";
  }
  write_text_file(dir / "results.csv", csv);
  std::filesystem::create_directories(dir / "histograms");
  for (const auto& h : result.histograms)
    write_text_file(dir / "histograms" / (h.name + ".csv"), h.to_csv());
  write_text_file(dir / "meta.json", result.meta.dump(2) + "\n");
}

}  // namespace qsn
