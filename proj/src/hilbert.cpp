#include "qsn/hilbert.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>

#include "qsn/error.hpp"
#include "qsn/kernels.hpp"

namespace qsn {

namespace {

// Krylov vectors kept in memory are capped at this many doubles in total.
constexpr std::size_t kBasisBudget = std::size_t{1} << 25;

void put_u64(std::ostream& out, std::uint64_t v, int bytes) {
  for (int b = 0; b < bytes; ++b) out.put(static_cast<char>((v >> (8 * b)) & 0xffU));
}

std::uint64_t get_u64(std::istream& in, int bytes) {
  std::uint64_t v = 0;
  for (int b = 0; b < bytes; ++b) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw IoError("ground-state dump truncated");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * b);
  }
  return v;
}

}  // namespace

void HamiltonianParams::validate() const {
  if (!(coupling > 0.0)) throw InvalidArgument("coupling J must be positive");
  if (!(field >= 0.0)) throw InvalidArgument("transverse field h must be non-negative");
}

double PureState::norm() const {
  return std::sqrt(kernels::serial::dot(amplitudes, amplitudes));
}

PureState PureState::ghz(int spins) {
  PureState s{spins, std::vector<double>(std::size_t{1} << spins, 0.0)};
  s.amplitudes.front() += 1.0 / std::sqrt(2.0);
  s.amplitudes.back() += 1.0 / std::sqrt(2.0);
  return s;
}

PureState PureState::x_polarized(int spins) {
  const std::size_t dim = std::size_t{1} << spins;
  return {spins, std::vector<double>(dim, 1.0 / std::sqrt(static_cast<double>(dim)))};
}

SparseHamiltonian::SparseHamiltonian(const Graph& g, HamiltonianParams params, int max_spins)
    : spins_(g.size()), params_(params) {
  params_.validate();
  if (spins_ > max_spins)
    throw CapacityError("graph has " + std::to_string(spins_) +
                        " spins; the exact solver is limited to " + std::to_string(max_spins));
  if (spins_ < 1) throw InvalidArgument("Hamiltonian needs at least one spin");
  link_ends_.reserve(2 * g.link_count());
  for (const auto& l : g.links()) {
    link_ends_.push_back(l.a);
    link_ends_.push_back(l.b);
  }
  diagonal_.resize(std::size_t{1} << spins_);
  kernels::ising_diagonal(link_ends_, spins_, params_.coupling, diagonal_);
}

void SparseHamiltonian::apply(std::span<const double> x, std::span<double> y) const {
  kernels::ising_apply(diagonal_, params_.field, spins_, x, y);
}

void SparseHamiltonian::apply_serial(std::span<const double> x, std::span<double> y) const {
  kernels::serial::ising_apply(diagonal_, params_.field, spins_, x, y);
}

GroundState ground_state(const SparseHamiltonian& h, const SolverOptions& options) {
  const int n = h.spins();
  const std::size_t dim = h.dimension();

  if (h.params().field == 0.0) {
    GroundState gs;
    gs.state = PureState::ghz(n);
    gs.energy = -h.params().coupling * static_cast<double>(h.link_count());
    return gs;
  }

  // Start in the gauge (-1)^popcount: the ground state of +h sum X is that
  // sign pattern times a positive vector, so the overlap is strictly
  // positive and the start lies in the ground state's Z2 sector.
  std::vector<double> start(dim);
  const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
  for (std::size_t s = 0; s < dim; ++s) start[s] = (std::popcount(s) & 1) ? -amp : amp;

  const std::size_t budget = std::max<std::size_t>(8, kBasisBudget / dim);
  const int kdim = static_cast<int>(
      std::min({static_cast<std::size_t>(std::max(options.krylov_dim, 2)), dim, budget}));

  std::vector<std::vector<double>> basis(kdim, std::vector<double>(dim));
  std::vector<double> w(dim);
  std::vector<double> ritz(dim);
  std::vector<double> alpha;
  std::vector<double> beta;
  alpha.reserve(kdim);
  beta.reserve(kdim);

  GroundState gs;
  double best = kInfinity;
  basis[0] = std::move(start);

  for (;;) {
    alpha.clear();
    beta.clear();
    for (int k = 0; k < kdim; ++k) {
      h.apply(basis[k], w);
      ++gs.matvecs;
      const double a = kernels::dot(basis[k], w);
      kernels::axpy(-a, basis[k], w);
      if (k > 0) kernels::axpy(-beta[k - 1], basis[k - 1], w);
      for (int pass = 0; pass < 2; ++pass)
        for (int j = 0; j <= k; ++j) kernels::axpy(-kernels::dot(basis[j], w), basis[j], w);
      alpha.push_back(a);
      if (k + 1 == kdim) break;
      const double b = std::sqrt(kernels::dot(w, w));
      if (b <= 1e-13 * std::max(1.0, std::abs(a))) break;  // invariant subspace
      beta.push_back(b);
      std::copy(w.begin(), w.end(), basis[k + 1].begin());
      kernels::scale(1.0 / b, basis[k + 1]);
    }

    const int m = static_cast<int>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub = Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::VectorXd y = tri.eigenvectors().col(0);

    std::fill(ritz.begin(), ritz.end(), 0.0);
    for (int j = 0; j < m; ++j) kernels::axpy(y[j], basis[j], ritz);
    kernels::scale(1.0 / std::sqrt(kernels::dot(ritz, ritz)), ritz);

    h.apply(ritz, w);
    ++gs.matvecs;
    const double energy = kernels::dot(ritz, w);
    kernels::axpy(-energy, ritz, w);
    const double residual = std::sqrt(kernels::dot(w, w));
    best = std::min(best, residual);

    if (residual <= options.tolerance) {
      gs.energy = energy;
      gs.residual = residual;
      break;
    }
    if (gs.matvecs >= options.max_matvecs)
      throw ConvergenceError("Lanczos did not converge within " +
                                 std::to_string(options.max_matvecs) +
                                 " matrix-vector products (best residual " +
                                 std::to_string(best) + ")",
                             best);
    std::copy(ritz.begin(), ritz.end(), basis[0].begin());
  }

  auto largest = std::max_element(ritz.begin(), ritz.end(), [](double a, double b) {
    return std::abs(a) < std::abs(b);
  });
  if (*largest < 0.0) kernels::scale(-1.0, ritz);
  gs.state = PureState{n, std::move(ritz)};
  return gs;
}

SiteExpectations site_expectations(const PureState& state) {
  SiteExpectations out;
  out.z.resize(state.spins);
  out.x.resize(state.spins);
  for (int i = 0; i < state.spins; ++i) {
    const auto b = kernels::site_block(state.amplitudes, state.spins, i);
    out.z[i] = b[0] - b[3];
    out.x[i] = b[1] + b[2];
  }
  return out;
}

void write_ground_state(std::ostream& out, const GroundState& gs) {
  put_u64(out, static_cast<std::uint32_t>(gs.state.spins), 4);
  put_u64(out, std::bit_cast<std::uint64_t>(gs.energy), 8);
  for (double a : gs.state.amplitudes) put_u64(out, std::bit_cast<std::uint64_t>(a), 8);
  if (!out) throw IoError("failed writing ground-state dump");
}

GroundState read_ground_state(std::istream& in) {
  GroundState gs;
  const auto spins = static_cast<int>(get_u64(in, 4));
  if (spins < 1 || spins > 30) throw IoError("ground-state dump has invalid spin count");
  gs.energy = std::bit_cast<double>(get_u64(in, 8));
  gs.state.spins = spins;
  gs.state.amplitudes.resize(std::size_t{1} << spins);
  for (double& a : gs.state.amplitudes) a = std::bit_cast<double>(get_u64(in, 8));
  return gs;
}

}  // namespace qsn
