#include "qsn/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qsn/error.hpp"

namespace qsn {

namespace {

// sqrt(1 - m^2) without cancellation near m = 1.
double transverse(double m) { return std::sqrt(std::max(0.0, (1.0 - m) * (1.0 + m))); }

Eigen::Matrix4d kron(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
  Eigen::Matrix4d out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out(r, c) = a(r >> 1, c >> 1) * b(r & 1, c & 1);
  return out;
}

void check_magnetization(double m) {
  if (!(m >= 0.0 && m <= 1.0)) throw InvalidArgument("magnetization must lie in [0, 1]");
}

}  // namespace

UniformMeanField mf_uniform(double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be non-negative");
  UniformMeanField mf;
  mf.lambda = lambda;
  if (lambda < 1.0) {
    mf.theta = std::asin(lambda);
    mf.magnetization = std::sqrt((1.0 - lambda) * (1.0 + lambda));
  } else {
    mf.theta = std::numbers::pi / 2;
    mf.magnetization = 0.0;
  }
  return mf;
}

double mf_uniform_mi(double m) {
  check_magnetization(m);
  if (m == 1.0) return 0.5;
  if (m == 0.0) return 0.0;
  const double m2 = m * m;
  const double a = transverse(m);
  const double one_minus_a = m2 / (1.0 + a);
  const double value = 0.5 * (1.0 - a * std::log2((1.0 + a) / one_minus_a) +
                              0.5 * (2.0 - m2) * std::log2((2.0 - m2) / m2));
  return std::clamp(value, 0.0, 0.5);
}

NetworkMeans mf0_measures(double lambda, int /*n*/) {
  const double mi = mf_uniform_mi(mf_uniform(lambda).magnetization);
  return {mi, mi, mi > 0.0 ? 1.0 / mi : kInfinity};
}

GeneralMeanField mf_general_solve(const Graph& g, double coupling, double field,
                                  const MfOptions& options) {
  if (!(coupling > 0.0)) throw InvalidArgument("coupling J must be positive");
  if (!(field >= 0.0)) throw InvalidArgument("field h must be non-negative");
  if (!(options.mixing >= 0.0 && options.mixing < 1.0))
    throw InvalidArgument("mixing must lie in [0, 1)");
  const int n = g.size();
  GeneralMeanField out;
  out.magnetization.assign(n, 1.0);
  if (field == 0.0) return out;

  const double ratio = coupling / field;
  std::vector<double> next(n);
  auto& m = out.magnetization;
  for (;;) {
    double change = 0.0;
    for (Node i = 0; i < n; ++i) {
      double sum = 0.0;
      for (Node j : g.neighbors(i)) sum += m[j];
      const double x = ratio * sum;
      const double update = x / std::sqrt(1.0 + x * x);  // zero when sum is zero
      next[i] = options.mixing * m[i] + (1.0 - options.mixing) * update;
      change = std::max(change, std::abs(next[i] - m[i]));
    }
    m.swap(next);
    ++out.iterations;
    if (change < options.tolerance) break;
    if (out.iterations >= options.max_iter)
      throw ConvergenceError("mean-field iteration did not converge in " +
                                 std::to_string(options.max_iter) + " sweeps",
                             change);
  }
  out.residual = mf_residual(g, coupling, field, m);
  return out;
}

double mf_residual(const Graph& g, double coupling, double field, std::span<const double> m) {
  if (field == 0.0) return 0.0;
  const double ratio = coupling / field;
  double worst = 0.0;
  for (Node i = 0; i < g.size(); ++i) {
    if (m[i] >= 1.0) continue;
    double sum = 0.0;
    for (Node j : g.neighbors(i)) sum += m[j];
    const double rhs = ratio * sum;
    const double lhs = m[i] / transverse(m[i]);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  return worst;
}

MfRdms mf_rdms(double m_i, double m_j) {
  check_magnetization(m_i);
  check_magnetization(m_j);
  const double x_i = transverse(m_i);
  const double x_j = transverse(m_j);
  const Eigen::Matrix2d one = Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d sx = (Eigen::Matrix2d() << 0, 1, 1, 0).finished();
  const Eigen::Matrix2d sz = (Eigen::Matrix2d() << 1, 0, 0, -1).finished();

  MfRdms out;
  out.first = 0.5 * (one + x_i * sx);
  out.second = 0.5 * (one + x_j * sx);
  out.pair = 0.25 * (kron(one, one) + x_i * kron(sx, one) + x_j * kron(one, sx) +
                     m_i * m_j * kron(sz, sz) + x_i * x_j * kron(sx, sx));
  return out;
}

MfRdms mf_attacked_rdm(double m_i, double m_j, double q, Axis direction, AttackedSites which) {
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("attack strength q must lie in [0, 1]");
  MfRdms out = mf_rdms(m_i, m_j);
  const bool first = which == AttackedSites::first || which == AttackedSites::both;
  const bool second = which == AttackedSites::second || which == AttackedSites::both;
  if (first) out.first = apply_attack_channel(out.first, direction, q);
  if (second) out.second = apply_attack_channel(out.second, direction, q);
  out.pair = apply_attack_channel(out.pair, first, second, direction, q);
  return out;
}

RdmTable mf_rdm_table(std::span<const double> magnetization) {
  const int n = static_cast<int>(magnetization.size());
  RdmTable t;
  t.n = n;
  t.sites.resize(n);
  t.pairs.resize(std::size_t(n) * (n - 1) / 2);
  for (Node i = 0; i < n; ++i) {
    for (Node j = i + 1; j < n; ++j) {
      const MfRdms r = mf_rdms(magnetization[i], magnetization[j]);
      t.pairs[RdmTable::pair_index(n, i, j)] = r.pair;
      t.sites[i] = r.first;
      t.sites[j] = r.second;
    }
  }
  if (n == 1) t.sites[0] = mf_rdms(magnetization[0], magnetization[0]).first;
  return t;
}

NetworkMeans mf0_attacked_mean_measures(double lambda, int n, double fraction, double q,
                                        Axis direction) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw InvalidArgument("attack fraction must lie in [0, 1]");
  if (n < 2) throw InvalidArgument("need at least two nodes");
  const double m = mf_uniform(lambda).magnetization;
  auto pair_mi = [&](AttackedSites which) {
    const MfRdms r = mf_attacked_rdm(m, m, q, direction, which);
    return mutual_information(r.first, r.second, r.pair);
  };
  const double none = pair_mi(AttackedSites::none);
  const double one = pair_mi(AttackedSites::first);
  const double both = pair_mi(AttackedSites::both);

  NetworkMeans out;
  const double f = fraction;
  out.degree = (1 - f) * (1 - f) * none + 2 * f * (1 - f) * one + f * f * both;

  const int attacked = static_cast<int>(std::lround(f * n));
  MiNetwork net(n);
  for (Node i = 0; i < n; ++i) {
    for (Node j = i + 1; j < n; ++j) {
      const int hits = (i < attacked) + (j < attacked);
      net.set(i, j, hits == 0 ? none : hits == 1 ? one : both);
    }
  }
  const auto c = weighted_clustering(net);
  double c_sum = 0.0;
  for (double v : c) c_sum += v;
  out.clustering = c_sum / n;

  const auto paths = weighted_shortest_paths(net);
  double d_sum = 0.0;
  for (Node i = 0; i < n; ++i)
    for (Node j = i + 1; j < n; ++j)
      if (paths(i, j) != kInfinity) d_sum += paths(i, j);
  out.distance = paths.reachable_pairs > 0 ? d_sum / static_cast<double>(paths.reachable_pairs)
                                           : kInfinity;
  return out;
}

}  // namespace qsn
