#include "qsn/quantum_state.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "qsn/error.hpp"
#include "qsn/kernels.hpp"

namespace qsn {

namespace {

double entropy_term(double lambda) {
  if (lambda < -kEigenvalueError)
    throw InvalidDensityMatrix("density matrix has eigenvalue " + std::to_string(lambda));
  if (lambda <= 0.0) return 0.0;
  return -lambda * std::log2(lambda);
}

const Eigen::Matrix2d& hadamard() {
  static const Eigen::Matrix2d h = (Eigen::Matrix2d() << 1, 1, 1, -1).finished() / std::sqrt(2.0);
  return h;
}

Eigen::Matrix4d kron(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
  Eigen::Matrix4d out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out(r, c) = a(r >> 1, c >> 1) * b(r & 1, c & 1);
  return out;
}

double min_eigenvalue(const SiteRdm& rho) {
  const double mean = 0.5 * (rho(0, 0) + rho(1, 1));
  const double half_gap = 0.5 * (rho(0, 0) - rho(1, 1));
  const double off = 0.5 * (rho(0, 1) + rho(1, 0));
  return mean - std::hypot(half_gap, off);
}

}  // namespace

bool contains(const NodeSet& set, Node v) { return std::binary_search(set.begin(), set.end(), v); }

std::string to_string(Axis axis) { return axis == Axis::x ? "x" : "z"; }

std::string to_string(TargetStrategy strategy) {
  return strategy == TargetStrategy::random ? "random" : "preferential";
}

Axis parse_axis(const std::string& name) {
  if (name == "x") return Axis::x;
  if (name == "z") return Axis::z;
  throw InvalidArgument("unknown attack direction '" + name + "' (expected x or z)");
}

TargetStrategy parse_strategy(const std::string& name) {
  if (name == "random") return TargetStrategy::random;
  if (name == "preferential" || name == "targeted") return TargetStrategy::preferential;
  throw InvalidArgument("unknown targeting strategy '" + name +
                        "' (expected random or preferential)");
}

void AttackSpec::validate() const {
  if (!(strength >= 0.0 && strength <= 1.0))
    throw InvalidArgument("attack strength q must lie in [0, 1]");
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw InvalidArgument("attack fraction must lie in [0, 1]");
}

SiteRdm reduce_single(const PureState& state, Node i) {
  if (i < 0 || i >= state.spins)
    throw InvalidArgument("site " + std::to_string(i) + " out of range");
  const auto b = kernels::site_block(state.amplitudes, state.spins, i);
  SiteRdm rho;
  rho << b[0], b[1], b[2], b[3];
  return rho;
}

PairRdm reduce_pair(const PureState& state, Node i, Node j) {
  if (i < 0 || j < 0 || i >= state.spins || j >= state.spins)
    throw InvalidArgument("pair (" + std::to_string(i) + "," + std::to_string(j) +
                          ") out of range");
  if (i == j) throw InvalidArgument("pair reduction needs two distinct sites");
  const auto b = kernels::pair_block(state.amplitudes, state.spins, i, j);
  return Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(b.data());
}

double von_neumann_entropy(const SiteRdm& rho) {
  const double mean = 0.5 * (rho(0, 0) + rho(1, 1));
  const double radius = std::hypot(0.5 * (rho(0, 0) - rho(1, 1)), 0.5 * (rho(0, 1) + rho(1, 0)));
  return entropy_term(mean + radius) + entropy_term(mean - radius);
}

double von_neumann_entropy(const PairRdm& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int k = 0; k < 4; ++k) s += entropy_term(es.eigenvalues()[k]);
  return s;
}

SiteRdm trace_out_second(const PairRdm& rho) {
  SiteRdm out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) out(a, b) = rho(2 * a, 2 * b) + rho(2 * a + 1, 2 * b + 1);
  return out;
}

SiteRdm trace_out_first(const PairRdm& rho) {
  SiteRdm out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) out(a, b) = rho(a, b) + rho(2 + a, 2 + b);
  return out;
}

double mutual_information(const SiteRdm& rho_i, const SiteRdm& rho_j, const PairRdm& rho_ij) {
  const double gap_i = (trace_out_second(rho_ij) - rho_i).cwiseAbs().maxCoeff();
  const double gap_j = (trace_out_first(rho_ij) - rho_j).cwiseAbs().maxCoeff();
  if (gap_i > kConsistencyTolerance || gap_j > kConsistencyTolerance)
    throw InvalidDensityMatrix("single-site matrices are not partial traces of the pair matrix");
  const double mi =
      0.5 * (von_neumann_entropy(rho_i) + von_neumann_entropy(rho_j) - von_neumann_entropy(rho_ij));
  if (mi < 0.0) {
    if (mi < -kConsistencyTolerance)
      throw InvalidDensityMatrix("negative mutual information " + std::to_string(mi));
    return 0.0;
  }
  return std::min(mi, 1.0);
}

SiteRdm apply_attack_channel(const SiteRdm& rho, Axis direction, double q) {
  const Eigen::Matrix2d basis = direction == Axis::x ? hadamard() : Eigen::Matrix2d::Identity();
  SiteRdm rotated = basis * rho * basis;
  rotated(0, 1) *= 1.0 - q;
  rotated(1, 0) *= 1.0 - q;
  SiteRdm out = basis * rotated * basis;
  out = 0.5 * (out + out.transpose()).eval();
  check_density_matrix(out);
  return out;
}

PairRdm apply_attack_channel(const PairRdm& rho, bool first, bool second, Axis direction,
                             double q) {
  if (!first && !second) return rho;
  const Eigen::Matrix2d one = Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d& measured = direction == Axis::x ? hadamard() : one;
  const Eigen::Matrix4d basis = kron(first ? measured : one, second ? measured : one);
  PairRdm rotated = basis * rho * basis;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (first && ((r ^ c) & 2)) rotated(r, c) *= 1.0 - q;
      if (second && ((r ^ c) & 1)) rotated(r, c) *= 1.0 - q;
    }
  }
  PairRdm out = basis * rotated * basis;
  out = 0.5 * (out + out.transpose()).eval();
  check_density_matrix(out);
  return out;
}

PairRdm attacked_pair_rdm(const PureState& state, Node i, Node j, const NodeSet& attacked,
                          Axis direction, double q) {
  return apply_attack_channel(reduce_pair(state, i, j), contains(attacked, i),
                              contains(attacked, j), direction, q);
}

void check_density_matrix(const SiteRdm& rho) {
  if (std::abs(rho.trace() - 1.0) > kConsistencyTolerance)
    throw InvalidDensityMatrix("site matrix trace " + std::to_string(rho.trace()));
  if (std::abs(rho(0, 1) - rho(1, 0)) > kConsistencyTolerance)
    throw InvalidDensityMatrix("site matrix is not symmetric");
  if (min_eigenvalue(rho) < -kEigenvalueClamp)
    throw InvalidDensityMatrix("site matrix is not positive semidefinite");
}

void check_density_matrix(const PairRdm& rho) {
  if (std::abs(rho.trace() - 1.0) > kConsistencyTolerance)
    throw InvalidDensityMatrix("pair matrix trace " + std::to_string(rho.trace()));
  if ((rho - rho.transpose()).cwiseAbs().maxCoeff() > kConsistencyTolerance)
    throw InvalidDensityMatrix("pair matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()[0] < -kEigenvalueClamp)
    throw InvalidDensityMatrix("pair matrix is not positive semidefinite (eigenvalue " +
                               std::to_string(es.eigenvalues()[0]) + ")");
}

}  // namespace qsn
