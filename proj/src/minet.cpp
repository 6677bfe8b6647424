#include "qsn/minet.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "qsn/error.hpp"
#include "qsn/kernels.hpp"
#include "qsn/output.hpp"

namespace qsn {

MiNetwork::MiNetwork(int n, std::vector<double> weights) : n_(n), weights_(std::move(weights)) {
  if (weights_.size() != std::size_t(n) * n)
    throw InvalidArgument("MI weight matrix has the wrong size");
  for (Node i = 0; i < n; ++i) {
    if ((*this)(i, i) != 0.0) throw InvalidArgument("MI network must have a zero diagonal");
    for (Node j = i + 1; j < n; ++j) {
      if ((*this)(i, j) != (*this)(j, i)) throw InvalidArgument("MI network must be symmetric");
      if (!((*this)(i, j) >= 0.0)) throw InvalidArgument("MI weights must be non-negative");
    }
  }
}

void MiNetwork::set(Node i, Node j, double w) {
  if (i == j) throw InvalidArgument("MI network has no self-links");
  if (!(w >= 0.0)) throw InvalidArgument("MI weights must be non-negative");
  weights_[std::size_t(i) * n_ + j] = w;
  weights_[std::size_t(j) * n_ + i] = w;
}

MiNetwork MiNetwork::uniform(int n, double w) {
  MiNetwork net(n);
  for (Node i = 0; i < n; ++i)
    for (Node j = i + 1; j < n; ++j) net.set(i, j, w);
  return net;
}

namespace {

RdmTable make_table(const PureState& state, bool parallel) {
  const int n = state.spins;
  RdmTable t;
  t.n = n;
  t.sites.resize(n);
  t.pairs.resize(std::size_t(n) * (n - 1) / 2);
  for (Node i = 0; i < n; ++i) {
    const auto b = parallel ? kernels::site_block(state.amplitudes, n, i)
                            : kernels::serial::site_block(state.amplitudes, n, i);
    t.sites[i] << b[0], b[1], b[2], b[3];
  }
  const auto pair_count = static_cast<std::ptrdiff_t>(t.pairs.size());
  std::vector<std::pair<Node, Node>> pairs;
  pairs.reserve(t.pairs.size());
  for (Node i = 0; i < n; ++i)
    for (Node j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  const auto reduce = [&](std::ptrdiff_t p) {
    const auto [i, j] = pairs[p];
    const auto b = parallel ? kernels::pair_block(state.amplitudes, n, i, j)
                            : kernels::serial::pair_block(state.amplitudes, n, i, j);
    t.pairs[p] = Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(b.data());
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic) if (!omp_in_parallel())
    for (std::ptrdiff_t p = 0; p < pair_count; ++p) reduce(p);
  } else {
    for (std::ptrdiff_t p = 0; p < pair_count; ++p) reduce(p);
  }
  return t;
}

}  // namespace

RdmTable rdm_table(const PureState& state) { return make_table(state, true); }

RdmTable rdm_table_serial(const PureState& state) { return make_table(state, false); }

MiNetwork build_mi_network(const RdmTable& rdms) { return build_mi_network(rdms, {}, Axis::x, 0.0); }

MiNetwork build_mi_network(const RdmTable& rdms, const NodeSet& attacked, Axis direction,
                           double q) {
  const int n = rdms.n;
  const bool active = q != 0.0 && !attacked.empty();
  std::vector<SiteRdm> sites = rdms.sites;
  std::vector<char> hit(n, 0);
  if (active) {
    for (Node v : attacked) {
      hit[v] = 1;
      sites[v] = apply_attack_channel(rdms.sites[v], direction, q);
    }
  }
  std::vector<double> entropy(n);
  for (Node i = 0; i < n; ++i) entropy[i] = von_neumann_entropy(sites[i]);

  MiNetwork net(n);
  for (Node i = 0; i < n; ++i) {
    for (Node j = i + 1; j < n; ++j) {
      const PairRdm& raw = rdms.pair(i, j);
      double mi;
      if (active && (hit[i] || hit[j])) {
        mi = mutual_information(sites[i], sites[j],
                                apply_attack_channel(raw, hit[i], hit[j], direction, q));
      } else {
        // Unattacked pair: reuse the cached single-site entropies.
        const double gap = std::max((trace_out_second(raw) - sites[i]).cwiseAbs().maxCoeff(),
                                    (trace_out_first(raw) - sites[j]).cwiseAbs().maxCoeff());
        if (gap > kConsistencyTolerance)
          throw InvalidDensityMatrix("pair matrix inconsistent with site matrices");
        mi = 0.5 * (entropy[i] + entropy[j] - von_neumann_entropy(raw));
        if (mi < 0.0) {
          if (mi < -kConsistencyTolerance)
            throw InvalidDensityMatrix("negative mutual information " + std::to_string(mi));
          mi = 0.0;
        }
        mi = std::min(mi, 1.0);
      }
      net.set(i, j, mi);
    }
  }
  return net;
}

MiNetwork build_mi_network(const PureState& state) { return build_mi_network(rdm_table(state)); }

std::vector<double> weighted_degree(const MiNetwork& net) {
  const int n = net.size();
  std::vector<double> k(n, 0.0);
  for (Node i = 0; i < n; ++i)
    for (double w : net.row(i)) k[i] += w;
  return k;
}

std::vector<double> weighted_clustering(const MiNetwork& net) {
  const int n = net.size();
  std::vector<double> c(n, 0.0);
  for (Node i = 0; i < n; ++i) {
    const auto wi = net.row(i);
    double sum = 0.0;
    double sum_sq = 0.0;
    double closed = 0.0;
    for (Node j = 0; j < n; ++j) {
      if (wi[j] == 0.0) continue;
      sum += wi[j];
      sum_sq += wi[j] * wi[j];
      const auto wj = net.row(j);
      double through = 0.0;
      for (Node k = 0; k < n; ++k) through += wj[k] * wi[k];  // zero diagonal drops k = i, j
      closed += wi[j] * through;
    }
    const double open = sum * sum - sum_sq;
    c[i] = open > 0.0 ? closed / open : 0.0;
  }
  return c;
}

PathLengths weighted_shortest_paths(const MiNetwork& net, double threshold) {
  const int n = net.size();
  PathLengths out;
  out.n = n;
  out.threshold = threshold;
  out.d.assign(std::size_t(n) * n, kInfinity);
  std::vector<char> done(n);
  for (Node s = 0; s < n; ++s) {
    double* dist = out.d.data() + std::size_t(s) * n;
    std::fill(done.begin(), done.end(), 0);
    dist[s] = 0.0;
    for (int step = 0; step < n; ++step) {
      Node u = -1;
      for (Node v = 0; v < n; ++v)
        if (!done[v] && (u < 0 || dist[v] < dist[u])) u = v;
      if (u < 0 || dist[u] == kInfinity) break;
      done[u] = 1;
      const auto wu = net.row(u);
      for (Node v = 0; v < n; ++v) {
        if (done[v] || wu[v] < threshold) continue;
        const double via = dist[u] + 1.0 / wu[v];
        if (via < dist[v]) dist[v] = via;
      }
    }
  }
  // Symmetrize so d(i,j) and d(j,i) agree to the last bit.
  for (Node i = 0; i < n; ++i) {
    for (Node j = i + 1; j < n; ++j) {
      const double v = std::min(out(i, j), out(j, i));
      out.d[std::size_t(i) * n + j] = out.d[std::size_t(j) * n + i] = v;
      if (v != kInfinity) ++out.reachable_pairs;
    }
  }
  return out;
}

MeasureMoments moments(std::span<const double> samples) {
  MeasureMoments m;
  double mean = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  std::size_t count = 0;
  for (double x : samples) {
    if (!std::isfinite(x)) {
      ++m.excluded;
      continue;
    }
    const double n1 = static_cast<double>(count);
    ++count;
    const double n = static_cast<double>(count);
    const double delta = x - mean;
    const double delta_n = delta / n;
    const double term = delta * delta_n * n1;
    mean += delta_n;
    m3 += term * delta_n * (n - 2.0) - 3.0 * delta_n * m2;
    m2 += term;
  }
  if (count == 0) throw InvalidArgument("moments of an empty sample");
  const double n = static_cast<double>(count);
  m.count = count;
  m.mean = mean;
  m.width = std::sqrt(std::max(m2 / n, 0.0));
  m.skewness = m.width > 0.0 ? (m3 / n) / (m.width * m.width * m.width) : 0.0;
  return m;
}

void write_mi_csv(std::ostream& out, const MiNetwork& net) {
  out << kSchemaLine << "\ni,j,mi\n";
  for (Node i = 0; i < net.size(); ++i)
    for (Node j = i + 1; j < net.size(); ++j)
      if (net(i, j) != 0.0) out << i << ',' << j << ',' << format_double(net(i, j)) << '\n';
}

MiNetwork read_mi_csv(std::istream& in, int n) {
  MiNetwork net(n);
  std::string line;
  bool header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "i,j,mi") throw IoError("MI csv: expected header 'i,j,mi'");
      header = true;
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    Node i = 0;
    Node j = 0;
    double w = 0.0;
    if (!(fields >> i >> j >> w) || i < 0 || j < 0 || i >= n || j >= n || i == j)
      throw IoError("MI csv line " + std::to_string(line_no) + ": bad row");
    net.set(i, j, w);
  }
  return net;
}

}  // namespace qsn
