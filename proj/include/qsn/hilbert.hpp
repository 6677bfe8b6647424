#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qsn/graph.hpp"

namespace qsn {

/// Largest spin count the exact solver accepts unless the caller raises it.
inline constexpr int kDefaultMaxSpins = 20;

struct HamiltonianParams {
  double coupling = 1.0;  // J > 0, ferromagnetic
  double field = 0.0;     // h >= 0, transverse (x) field

  void validate() const;
};

/// Real amplitudes over the z basis. Bit i of the basis index is spin i,
/// with a clear bit meaning up (sigma^z = +1).
struct PureState {
  int spins = 0;
  std::vector<double> amplitudes;

  std::size_t dimension() const { return amplitudes.size(); }
  double norm() const;

  static PureState ghz(int spins);
  /// All spins along +x.
  static PureState x_polarized(int spins);
};

/// H = -J sum_links s^z_a s^z_b + h sum_i s^x_i, acting matrix-free: the
/// diagonal is stored, the n single-flip couplings of magnitude h are not.
class SparseHamiltonian {
 public:
  SparseHamiltonian(const Graph& g, HamiltonianParams params, int max_spins = kDefaultMaxSpins);

  int spins() const { return spins_; }
  std::size_t dimension() const { return diagonal_.size(); }
  const HamiltonianParams& params() const { return params_; }
  std::size_t link_count() const { return link_ends_.size() / 2; }
  std::span<const double> diagonal() const { return diagonal_; }

  /// y = H x (OpenMP kernel).
  void apply(std::span<const double> x, std::span<double> y) const;
  /// Reference single-threaded y = H x.
  void apply_serial(std::span<const double> x, std::span<double> y) const;

 private:
  int spins_;
  HamiltonianParams params_;
  std::vector<std::int32_t> link_ends_;
  std::vector<double> diagonal_;
};

struct SolverOptions {
  double tolerance = 1e-10;  // on ||H v - E v|| with ||v|| = 1
  int max_matvecs = 20000;
  int krylov_dim = 40;
};

struct GroundState {
  double energy = 0.0;
  PureState state;
  double residual = 0.0;
  int matvecs = 0;
};

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization.
/// At h = 0 returns the GHZ state with energy -J |links| without iterating.
/// The global sign makes the largest-magnitude amplitude positive.
GroundState ground_state(const SparseHamiltonian& h, const SolverOptions& options = {});

struct SiteExpectations {
  std::vector<double> z;
  std::vector<double> x;
};

SiteExpectations site_expectations(const PureState& state);

/// Little-endian binary dump: uint32 spin count, float64 energy, then 2^n
/// float64 amplitudes in basis-index order.
void write_ground_state(std::ostream& out, const GroundState& gs);
GroundState read_ground_state(std::istream& in);

}  // namespace qsn
