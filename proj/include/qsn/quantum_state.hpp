#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "qsn/hilbert.hpp"

namespace qsn {

/// rho_i, basis {up, down}.
using SiteRdm = Eigen::Matrix2d;
/// rho_ij, basis {up up, up down, down up, down down}; node i is the
/// first (more significant) factor.
using PairRdm = Eigen::Matrix4d;

/// Sorted, duplicate-free node list.
using NodeSet = std::vector<Node>;

bool contains(const NodeSet& set, Node v);

/// Eigenvalues above this negative bound are clamped to zero when taking
/// entropies; anything more negative is reported as an invalid matrix.
inline constexpr double kEigenvalueClamp = 1e-12;
inline constexpr double kEigenvalueError = 1e-9;
inline constexpr double kConsistencyTolerance = 1e-10;

enum class Axis { x, z };
enum class TargetStrategy { random, preferential };

std::string to_string(Axis axis);
std::string to_string(TargetStrategy strategy);
Axis parse_axis(const std::string& name);
TargetStrategy parse_strategy(const std::string& name);

/// Partial projective measurement applied to a fraction of the nodes.
struct AttackSpec {
  Axis direction = Axis::x;
  double strength = 1.0;  // q
  double fraction = 0.2;
  TargetStrategy strategy = TargetStrategy::random;

  void validate() const;
  /// True when the channel cannot change any state (q = 0 or no targets).
  bool is_identity() const { return strength == 0.0 || fraction == 0.0; }
};

SiteRdm reduce_single(const PureState& state, Node i);
PairRdm reduce_pair(const PureState& state, Node i, Node j);

/// Entropy in bits. Throws InvalidDensityMatrix for an eigenvalue below
/// -kEigenvalueError.
double von_neumann_entropy(const SiteRdm& rho);
double von_neumann_entropy(const PairRdm& rho);

/// I_ij = (S_i + S_j - S_ij) / 2 in bits, clamped to [0, 1]. Throws when
/// the single-site matrices are not the partial traces of rho_ij.
double mutual_information(const SiteRdm& rho_i, const SiteRdm& rho_j, const PairRdm& rho_ij);

/// Partial traces of a pair matrix onto its first or second site.
SiteRdm trace_out_second(const PairRdm& rho);
SiteRdm trace_out_first(const PairRdm& rho);

/// Multiplies every element that is off-diagonal in the measured site's
/// eigenbasis (z: computational, x: Hadamard-rotated) by (1 - q).
SiteRdm apply_attack_channel(const SiteRdm& rho, Axis direction, double q);
PairRdm apply_attack_channel(const PairRdm& rho, bool first, bool second, Axis direction,
                             double q);

/// rho_ij after attacking `attacked`; only attacked members of {i, j}
/// matter because the channel is trace preserving on every other site.
PairRdm attacked_pair_rdm(const PureState& state, Node i, Node j, const NodeSet& attacked,
                          Axis direction, double q);

/// Throws InvalidDensityMatrix unless rho is symmetric with unit trace and
/// no eigenvalue below -kEigenvalueClamp.
void check_density_matrix(const SiteRdm& rho);
void check_density_matrix(const PairRdm& rho);

}  // namespace qsn
