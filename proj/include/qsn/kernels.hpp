#pragma once

// Hot loops over the 2^n amplitude vector. Every kernel has an OpenMP
// version and a serial reference in `serial::` used by tests and benchmarks.
//
// Reductions are computed over fixed-size blocks whose partial sums are
// combined in block order, so results are bitwise identical for any thread
// count. Element-wise kernels are trivially deterministic.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace qsn::kernels {

inline constexpr std::size_t kReductionBlock = std::size_t{1} << 12;

/// Below this length the OpenMP kernels run on the calling thread.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 14;

/// Row-major 4x4 block accumulated over the two selected bits, basis order
/// 2*bit_i + bit_j.
using Block4 = std::array<double, 16>;
using Block2 = std::array<double, 4>;

/// Diagonal of the Ising coupling term, -J * sum over links of s_a s_b with
/// s = +1 for a clear bit and -1 for a set bit.
void ising_diagonal(std::span<const std::int32_t> link_ends, int spins, double coupling,
                    std::span<double> diagonal);

/// y = D x + field * sum_i X_i x, with X_i flipping bit i.
void ising_apply(std::span<const double> diagonal, double field, int spins,
                 std::span<const double> x, std::span<double> y);

double dot(std::span<const double> x, std::span<const double> y);

/// y += a x
void axpy(double a, std::span<const double> x, std::span<double> y);

void scale(double a, std::span<double> x);

/// Two-site reduced density matrix of a real state, sites i != j.
Block4 pair_block(std::span<const double> psi, int spins, int i, int j);

Block2 site_block(std::span<const double> psi, int spins, int i);

namespace serial {

void ising_diagonal(std::span<const std::int32_t> link_ends, int spins, double coupling,
                    std::span<double> diagonal);
void ising_apply(std::span<const double> diagonal, double field, int spins,
                 std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale(double a, std::span<double> x);
Block4 pair_block(std::span<const double> psi, int spins, int i, int j);
Block2 site_block(std::span<const double> psi, int spins, int i);

}  // namespace serial

}  // namespace qsn::kernels
