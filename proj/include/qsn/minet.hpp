#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qsn/quantum_state.hpp"

namespace qsn {

/// Links with mutual information below this are absent for path finding.
inline constexpr double kAbsentLinkThreshold = 1e-12;

/// Symmetric, non-negative MI weights with zero diagonal.
class MiNetwork {
 public:
  MiNetwork() = default;
  explicit MiNetwork(int n) : n_(n), weights_(std::size_t(n) * n, 0.0) {}
  /// Validates the invariants; throws InvalidArgument.
  MiNetwork(int n, std::vector<double> weights);

  int size() const { return n_; }
  double operator()(Node i, Node j) const { return weights_[std::size_t(i) * n_ + j]; }
  void set(Node i, Node j, double w);
  std::span<const double> row(Node i) const {
    return {weights_.data() + std::size_t(i) * n_, std::size_t(n_)};
  }
  const std::vector<double>& weights() const { return weights_; }

  static MiNetwork uniform(int n, double w);

 private:
  int n_ = 0;
  std::vector<double> weights_;
};

/// All one- and two-site reduced matrices of a state, pairs stored for i < j.
struct RdmTable {
  int n = 0;
  std::vector<SiteRdm> sites;
  std::vector<PairRdm> pairs;

  static std::size_t pair_index(int n, Node i, Node j) {
    return std::size_t(i) * n - std::size_t(i) * (i + 1) / 2 + (j - i - 1);
  }
  const PairRdm& pair(Node i, Node j) const { return pairs[pair_index(n, i, j)]; }
};

/// OpenMP over pairs; each pair reduced serially, so the output does not
/// depend on the thread count.
RdmTable rdm_table(const PureState& state);
RdmTable rdm_table_serial(const PureState& state);

MiNetwork build_mi_network(const RdmTable& rdms);
/// MI network after the attack channel acts on `attacked` nodes.
MiNetwork build_mi_network(const RdmTable& rdms, const NodeSet& attacked, Axis direction,
                           double q);
MiNetwork build_mi_network(const PureState& state);

/// k_i = sum_j I_ij
std::vector<double> weighted_degree(const MiNetwork& net);

/// C_i = sum_{j != k} I_ij I_jk I_ki / sum_{j != k} I_ij I_ik, zero when the
/// denominator vanishes.
std::vector<double> weighted_clustering(const MiNetwork& net);

struct PathLengths {
  int n = 0;
  std::vector<double> d;  // row-major, +inf when unreachable
  std::size_t reachable_pairs = 0;  // unordered pairs i < j
  double threshold = kAbsentLinkThreshold;

  double operator()(Node i, Node j) const { return d[std::size_t(i) * n + j]; }
};

/// Dijkstra from each source with link length 1 / I_ij.
PathLengths weighted_shortest_paths(const MiNetwork& net,
                                    double threshold = kAbsentLinkThreshold);

struct MeasureMoments {
  double mean = 0.0;
  double width = 0.0;     // population standard deviation
  double skewness = 0.0;  // 0 whenever width is 0
  std::size_t count = 0;
  std::size_t excluded = 0;  // non-finite samples dropped
};

/// Throws InvalidArgument when no finite sample is present.
MeasureMoments moments(std::span<const double> samples);

/// CSV `i,j,mi` for each unordered pair with nonzero weight.
void write_mi_csv(std::ostream& out, const MiNetwork& net);
MiNetwork read_mi_csv(std::istream& in, int n);

}  // namespace qsn
