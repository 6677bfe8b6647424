// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any failure.
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qsn/experiments.hpp"
#include "qsn/output.hpp"

using namespace qsn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body,
            double limit_seconds = 0.0) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_seconds > 0 && secs > limit_seconds) {
    o.pass = false;
    o.detail += ", over the " + std::to_string(int(limit_seconds)) + " s limit";
  }
  if (!o.pass) ++failures;
  std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ER link probability keeping the n = 20, p = 0.26 mean degree.
double scaled_er_p(int n) { return std::min(1.0, 0.26 * 19 / (n - 1)); }

GraphModelSpec model_spec(GraphModel m, int n) {
  switch (m) {
    case GraphModel::erdos_renyi: return {m, n, scaled_er_p(n), 4, 3, true};
    case GraphModel::watts_strogatz: return {m, n, 0.5, 4, 3, true};
    case GraphModel::barabasi_albert: return {m, n, 0.0, 4, 3, true};
  }
  return {};
}

const std::vector<GraphModel> kModels{GraphModel::erdos_renyi, GraphModel::watts_strogatz,
                                      GraphModel::barabasi_albert};
const std::vector<double> kLambdas{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0};

struct Variant {
  std::string label;
  std::optional<AttackSpec> attack;
};

const std::vector<Variant> kVariants{
    {"none", std::nullopt},
    {"x_q0.5", AttackSpec{Axis::x, 0.5, 0.2, TargetStrategy::random}},
    {"x_q1", AttackSpec{Axis::x, 1.0, 0.2, TargetStrategy::random}},
    {"z_q0.5", AttackSpec{Axis::z, 0.5, 0.2, TargetStrategy::random}},
    {"z_q1", AttackSpec{Axis::z, 1.0, 0.2, TargetStrategy::random}},
    {"xp_q0.5", AttackSpec{Axis::x, 0.5, 0.2, TargetStrategy::preferential}},
    {"xp_q1", AttackSpec{Axis::x, 1.0, 0.2, TargetStrategy::preferential}},
};

// model name -> variant label -> rows
std::map<std::string, std::map<std::string, std::vector<ResultRow>>> g_rows;
fs::path g_dump;

void run_shared_ensembles() {
  for (GraphModel m : kModels) {
    ExperimentConfig c;
    c.model = model_spec(m, 14);
    c.lambdas = kLambdas;
    c.ensemble_size = 20;
    c.realizations = 20;
    c.master_seed = 2024;
    RdmCache cache;
    for (const auto& v : kVariants) {
      c.attack = v.attack;
      const ExperimentResult r =
          v.attack ? run_attack_experiment(c, &cache) : run_ground_state_sweep(c, &cache);
      if (r.failures > 0)
        std::printf("note: %s %s had %d failed tasks\n", c.model.name().c_str(), v.label.c_str(),
                    r.failures);
      g_rows[c.model.name()][v.label] = r.rows;
      if (!g_dump.empty()) {
        fs::create_directories(g_dump);
        write_text_file(g_dump / (c.model.name() + "_" + v.label + ".csv"), to_csv(r.rows));
      }
    }
  }
}

const ResultRow& row_at(const std::vector<ResultRow>& rows, double lambda, const std::string& measure) {
  for (const auto& r : rows)
    if (r.method == "exact" && r.measure == measure && std::abs(r.lambda - lambda) < 1e-12) return r;
  throw Error("missing row " + measure + " at lambda " + format_double(lambda));
}

// Means of two variants differ by less than 2 pooled standard errors.
Outcome compare_within_se(const std::string& a, const std::string& b) {
  Outcome o;
  std::map<std::string, int> failed;
  double worst = 0.0;
  std::string where;
  int checks = 0;
  for (const auto& [model, variants] : g_rows) {
    for (const char* measure : {"k", "C", "d"}) {
      for (double l : kLambdas) {
        const ResultRow& ra = row_at(variants.at(a), l, measure);
        const ResultRow& rb = row_at(variants.at(b), l, measure);
        const double se = std::hypot(ra.standard_error(), rb.standard_error());
        const double diff = std::abs(ra.mean - rb.mean);
        ++checks;
        // Rounding slack for points where every network gives the same value.
        if (diff < 2 * se + 1e-12) continue;
        ++failed[measure];
        const double ratio = se > 0 ? diff / se : INFINITY;
        if (ratio > worst) {
          worst = ratio;
          where = model + " " + measure + " lambda=" + format_double(l);
        }
      }
    }
  }
  o.pass = failed.empty();
  o.detail = std::to_string(checks) + " points";
  if (!o.pass) {
    o.detail += ", outside 2 SE:";
    for (const auto& [m, c] : failed) o.detail += " " + m + "=" + std::to_string(c);
    o.detail += ", worst " + fmt("%.1f", worst) + " SE at " + where;
  }
  return o;
}

Outcome ghz_fixed_point() {
  Outcome o;
  double worst_pair = 0.0;
  double worst_moment = 0.0;
  int networks = 0;
  for (int n : {6, 10, 14}) {
    for (GraphModel m : kModels) {
      ExperimentConfig c;
      c.model = model_spec(m, n);
      c.fields = {0.0};
      c.ensemble_size = 5;
      c.master_seed = 7;
      for (const auto& gg : ensemble_graphs(c)) {
        const GroundState gs = ground_state(SparseHamiltonian(gg.graph, {1.0, 0.0}));
        const MiNetwork net = build_mi_network(gs.state);
        for (Node i = 0; i < n; ++i)
          for (Node j = i + 1; j < n; ++j) worst_pair = std::max(worst_pair, std::abs(net(i, j) - 0.5));
        ++networks;
      }
      const ExperimentResult r = run_ground_state_sweep(c);
      for (const auto& row : r.rows) {
        const double target = row.measure == "d" ? 2.0 : 0.5;
        worst_moment = std::max({worst_moment, std::abs(row.mean - target), row.width});
      }
    }
  }
  o.pass = worst_pair < 1e-9 && worst_moment < 1e-9;
  o.detail = std::to_string(networks) + " networks, max |MI - 0.5| = " + fmt("%.1e", worst_pair) +
             ", max moment error = " + fmt("%.1e", worst_moment);
  return o;
}

Outcome paramagnetic_limit() {
  ExperimentConfig c;
  c.model = model_spec(GraphModel::erdos_renyi, 14);
  c.fields = {100.0};
  c.ensemble_size = 20;
  const ExperimentResult r = run_ground_state_sweep(c);
  const double k = row_at(r.rows, c.lambda_of(100.0), "k").mean;
  const double cl = row_at(r.rows, c.lambda_of(100.0), "C").mean;
  return {k < 0.01 && cl < 0.01 && r.failures == 0,
          "mean k/(n-1) = " + fmt("%.2e", k) + ", mean C = " + fmt("%.2e", cl)};
}

Outcome oracle_equivalence() {
  Stream rng(derive_seed(31, {3}));
  double worst_e = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + static_cast<int>(rng.below(9));
    const GraphModel m = kModels[rng.below(3)];
    GraphModelSpec spec = model_spec(m, n);
    spec.require_connected = false;
    if (m == GraphModel::watts_strogatz) spec.k = n > 4 ? 4 : 2;
    if (m == GraphModel::barabasi_albert) spec.m = std::min(3, n - 1);
    if (m == GraphModel::watts_strogatz && n < 3) spec.model = GraphModel::erdos_renyi;
    const Graph g = generate(spec, rng).graph;
    const double h = 3 * rng.uniform();
    const double dense = oracle::ground_state(g, 1.0, h).energy;
    const double iter = ground_state(SparseHamiltonian(g, {1.0, h})).energy;
    worst_e = std::max(worst_e, std::abs(dense - iter));
  }
  double worst_rdm = 0.0;
  for (int n = 2; n <= 6; ++n) {
    for (int t = 0; t < 5; ++t) {
      const Graph g = gen_erdos_renyi(n, 0.6, rng);
      const GroundState gs = ground_state(SparseHamiltonian(g, {1.0, 2 * rng.uniform()}));
      const Eigen::VectorXd v =
          Eigen::Map<const Eigen::VectorXd>(gs.state.amplitudes.data(), gs.state.dimension());
      const Eigen::MatrixXd rho = v * v.transpose();
      const RdmTable table = rdm_table(gs.state);
      for (Node i = 0; i < n; ++i)
        for (Node j = i + 1; j < n; ++j)
          worst_rdm = std::max(worst_rdm,
                               (Eigen::MatrixXd(table.pair(i, j)) - oracle::partial_trace_pair(rho, n, i, j))
                                   .cwiseAbs()
                                   .maxCoeff());
    }
  }
  return {worst_e < 1e-8 && worst_rdm < 1e-12,
          "max energy diff = " + fmt("%.1e", worst_e) + " over 50 graphs, max RDM diff = " +
              fmt("%.1e", worst_rdm)};
}

Outcome attack_locality() {
  Stream rng(derive_seed(31, {4}));
  const int n = 6;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    PureState s{n, std::vector<double>(std::size_t{1} << n)};
    double norm = 0.0;
    for (auto& a : s.amplitudes) {
      a = rng.uniform() - 0.5;
      norm += a * a;
    }
    for (auto& a : s.amplitudes) a /= std::sqrt(norm);
    NodeSet attacked;
    for (Node v = 0; v < n; ++v)
      if (rng.bernoulli(0.4)) attacked.push_back(v);
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(s.amplitudes.data(), s.dimension());
    for (Axis dir : {Axis::x, Axis::z})
      for (double q : {0.0, 0.3, 1.0}) {
        Eigen::MatrixXd rho = v * v.transpose();
        for (Node a : attacked) rho = oracle::measure(rho, n, a, dir == Axis::x, q);
        for (Node i = 0; i < n; ++i)
          for (Node j = i + 1; j < n; ++j)
            worst = std::max(worst, (Eigen::MatrixXd(attacked_pair_rdm(s, i, j, attacked, dir, q)) -
                                     oracle::partial_trace_pair(rho, n, i, j))
                                        .cwiseAbs()
                                        .maxCoeff());
      }
  }
  return {worst < 1e-10, "max element diff = " + fmt("%.1e", worst)};
}

Outcome mf_consistency() {
  double worst_mi = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double m = k / 1000.0;
    const MfRdms r = mf_rdms(m, m);
    worst_mi = std::max(worst_mi, std::abs(mf_uniform_mi(m) - oracle::mutual_information(r.pair)));
  }
  double worst_res = 0.0;
  Stream rng(derive_seed(31, {5}));
  for (GraphModel model : kModels) {
    for (int t = 0; t < 5; ++t) {
      const Graph g = generate(model_spec(model, 20), rng).graph;
      for (double lambda : {0.1, 0.5, 0.9, 1.2, 2.0}) {
        const double h = lambda * model_spec(model, 20).nominal_coordination();
        const auto mf = mf_general_solve(g, 1.0, h);
        worst_res = std::max({worst_res, mf.residual, mf_residual(g, 1.0, h, mf.magnetization)});
      }
    }
  }
  double worst_reg = 0.0;
  for (const Graph& g : {Graph::ring(14), gen_watts_strogatz(14, 4, 0.0, rng)}) {
    const double z = 2.0 * g.links().size() / g.size();
    for (double lambda : {0.1, 0.3, 0.6, 0.9, 1.5}) {
      const auto mf = mf_general_solve(g, 1.0, lambda * z);
      for (double m : mf.magnetization)
        worst_reg = std::max(worst_reg, std::abs(m - mf_uniform(lambda).magnetization));
    }
  }
  return {worst_mi < 1e-9 && worst_res < 1e-10 && worst_reg < 1e-9,
          "closed form vs entropy " + fmt("%.1e", worst_mi) + ", max residual " + fmt("%.1e", worst_res) +
              ", regular reduction " + fmt("%.1e", worst_reg)};
}

Outcome lambda_collapse() {
  double worst = 0.0;
  std::string where;
  for (double l : kLambdas) {
    if (l <= 0.2) continue;
    std::vector<std::pair<std::string, double>> k;
    for (const auto& [model, v] : g_rows) k.emplace_back(model, row_at(v.at("none"), l, "k").mean);
    for (std::size_t a = 0; a < k.size(); ++a)
      for (std::size_t b = a + 1; b < k.size(); ++b) {
        const double d = std::abs(k[a].second - k[b].second);
        if (d > worst) {
          worst = d;
          where = k[a].first + "/" + k[b].first + " lambda=" + format_double(l);
        }
      }
  }
  return {worst <= 0.05, "max pairwise |diff| = " + fmt("%.4f", worst) + " at " + where};
}

Outcome mf0_vs_exact() {
  double worst = 0.0;
  std::string where;
  for (const auto& [model, v] : g_rows)
    for (double l : kLambdas) {
      if (l < 0.3) continue;
      const NetworkMeans mf = mf0_measures(l, 14);
      const double dk = std::abs(row_at(v.at("none"), l, "k").mean - mf.degree);
      const double dc = std::abs(row_at(v.at("none"), l, "C").mean - mf.clustering);
      if (std::max(dk, dc) > worst) {
        worst = std::max(dk, dc);
        where = model + (dk >= dc ? " k" : " C") + " lambda=" + format_double(l);
      }
    }
  return {worst <= 0.07, "max |MF0 - exact| = " + fmt("%.4f", worst) + " at " + where};
}

Outcome z_invariance() {
  const Outcome a = compare_within_se("none", "z_q0.5");
  const Outcome b = compare_within_se("none", "z_q1");
  return {a.pass && b.pass, "q=0.5: " + a.detail + "; q=1: " + b.detail};
}

Outcome strategy_indifference() {
  const Outcome a = compare_within_se("x_q0.5", "xp_q0.5");
  const Outcome b = compare_within_se("x_q1", "xp_q1");
  return {a.pass && b.pass, "q=0.5: " + a.detail + "; q=1: " + b.detail};
}

Outcome rescaling_collapse() {
  std::vector<ResultRow> rows;
  for (const auto& [model, v] : g_rows)
    for (const char* label : {"none", "x_q0.5", "x_q1", "z_q0.5", "z_q1"})
      rows.insert(rows.end(), v.at(label).begin(), v.at(label).end());
  Outcome o;
  for (const auto& panel : collapse_report(rows)) {
    if (panel.curves.size() != 5) o.pass = false;
    if (!(panel.max_deviation < 0.05)) o.pass = false;
    o.detail += (o.detail.empty() ? "" : ", ") + panel.model + " " + fmt("%.4f", panel.max_deviation);
  }
  o.detail = "max pairwise deviation: " + o.detail;
  return o;
}

Outcome classical_removal() {
  ClassicalConfig c;
  c.master_seed = 11;
  const ClassicalResult r = run_classical_attack_study(c);
  const auto effect = [&](int n) {
    return r.row("ba", n, "random", "degree").p95 - r.row("ba", n, "targeted", "degree").p95;
  };
  const double e20 = effect(20), e54 = effect(54);
  return {e54 > 0 && e54 > e20,
          "BA p95 random - targeted: n=20 " + fmt("%.2f", e20) + ", n=54 " + fmt("%.2f", e54)};
}

Outcome determinism() {
  ExperimentConfig c;
  c.model = {GraphModel::barabasi_albert, 10, 0.0, 4, 3, true};
  c.lambdas = {0.0, 0.5, 1.0, 2.0};
  c.ensemble_size = 6;
  c.realizations = 4;
  c.attack = AttackSpec{Axis::x, 0.5, 0.2, TargetStrategy::preferential};
  ClassicalConfig cc;
  cc.sizes = {20};
  cc.count = 50;
  const fs::path root = fs::temp_directory_path() / "qsn_acceptance_determinism";
  fs::remove_all(root);
  const int saved = omp_get_max_threads();
  for (int threads : {1, 8}) {
    omp_set_num_threads(threads);
    const fs::path dir = root / std::to_string(threads);
    for (const char* sub : {"attack", "mf", "classical"}) fs::create_directories(dir / sub);
    write_experiment(run_attack_experiment(c), dir / "attack");
    write_experiment(run_mf_pipeline(c), dir / "mf");
    write_classical(run_classical_attack_study(cc), dir / "classical");
  }
  omp_set_num_threads(saved);
  int files = 0;
  bool same = true;
  for (const auto& e : fs::recursive_directory_iterator(root / "1")) {
    if (!e.is_regular_file()) continue;
    const fs::path other = root / "8" / fs::relative(e.path(), root / "1");
    same = same && fs::exists(other) && read_text_file(e.path()) == read_text_file(other);
    ++files;
  }
  fs::remove_all(root);
  return {same && files > 0, std::to_string(files) + " files compared for 1 and 8 workers"};
}

}  // namespace

int main(int argc, char** argv) {
  // Optional directory receiving the shared ensemble rows.
  if (argc > 1) g_dump = argv[1];
  report(1, "GHZ fixed point", ghz_fixed_point, 60);
  report(2, "paramagnetic limit", paramagnetic_limit, 300);
  report(3, "oracle equivalence", oracle_equivalence);
  report(4, "attack-channel locality", attack_locality);
  report(5, "mean-field consistency", mf_consistency);
  run_shared_ensembles();
  report(6, "lambda collapse across models", lambda_collapse);
  report(7, "uniform mean field vs exact", mf0_vs_exact);
  report(8, "z-attack invariance", z_invariance);
  report(9, "strategy indifference", strategy_indifference);
  report(10, "rescaling collapse", rescaling_collapse);
  report(11, "classical node removal", classical_removal, 120);
  report(12, "determinism", determinism);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
