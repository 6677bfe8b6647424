#include "qsn/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <vector>

namespace qsn::kernels {

namespace {

bool go_parallel(std::size_t size) { return size >= kParallelThreshold && !omp_in_parallel(); }

std::size_t block_count(std::size_t size) {
  return (size + kReductionBlock - 1) / kReductionBlock;
}

// Spreads the bits of t around two zero bits placed at positions lo < hi.
inline std::size_t insert_two_zeros(std::size_t t, int lo, int hi) {
  const std::size_t low_mask = (std::size_t{1} << lo) - 1;
  t = ((t & ~low_mask) << 1) | (t & low_mask);
  const std::size_t high_mask = (std::size_t{1} << hi) - 1;
  return ((t & ~high_mask) << 1) | (t & high_mask);
}

inline std::size_t insert_zero(std::size_t t, int pos) {
  const std::size_t mask = (std::size_t{1} << pos) - 1;
  return ((t & ~mask) << 1) | (t & mask);
}

// Upper-triangle accumulation of the 4-vector outer product for one coset.
inline void accumulate_pair(const double* psi, std::size_t base, std::size_t bit_i,
                            std::size_t bit_j, double* acc) {
  const double v0 = psi[base];
  const double v1 = psi[base | bit_j];
  const double v2 = psi[base | bit_i];
  const double v3 = psi[base | bit_i | bit_j];
  acc[0] += v0 * v0;
  acc[1] += v0 * v1;
  acc[2] += v0 * v2;
  acc[3] += v0 * v3;
  acc[4] += v1 * v1;
  acc[5] += v1 * v2;
  acc[6] += v1 * v3;
  acc[7] += v2 * v2;
  acc[8] += v2 * v3;
  acc[9] += v3 * v3;
}

Block4 unpack_upper(const double* acc) {
  Block4 r{};
  const int rows[10] = {0, 0, 0, 0, 1, 1, 1, 2, 2, 3};
  const int cols[10] = {0, 1, 2, 3, 1, 2, 3, 2, 3, 3};
  for (int e = 0; e < 10; ++e) {
    r[rows[e] * 4 + cols[e]] = acc[e];
    r[cols[e] * 4 + rows[e]] = acc[e];
  }
  return r;
}

}  // namespace

void ising_diagonal(std::span<const std::int32_t> link_ends, int spins, double coupling,
                    std::span<double> diagonal) {
  const std::size_t dim = std::size_t{1} << spins;
  const std::size_t links = link_ends.size() / 2;
  const std::int32_t* ends = link_ends.data();
  double* d = diagonal.data();
#pragma omp parallel for schedule(static) if (go_parallel(dim))
  for (std::size_t s = 0; s < dim; ++s) {
    int aligned = 0;
    for (std::size_t l = 0; l < links; ++l)
      aligned += (((s >> ends[2 * l]) ^ (s >> ends[2 * l + 1])) & 1U) ? -1 : 1;
    d[s] = -coupling * aligned;
  }
}

void ising_apply(std::span<const double> diagonal, double field, int spins,
                 std::span<const double> x, std::span<double> y) {
  const std::size_t dim = x.size();
  const double* d = diagonal.data();
  const double* xs = x.data();
  double* ys = y.data();
#pragma omp parallel for schedule(static) if (go_parallel(dim))
  for (std::size_t s = 0; s < dim; ++s) {
    double flips = 0.0;
    for (int i = 0; i < spins; ++i) flips += xs[s ^ (std::size_t{1} << i)];
    ys[s] = d[s] * xs[s] + field * flips;
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t size = x.size();
  const std::size_t blocks = block_count(size);
  std::vector<double> partial(blocks, 0.0);
  const double* xs = x.data();
  const double* ys = y.data();
#pragma omp parallel for schedule(static) if (go_parallel(size))
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t end = std::min(size, (b + 1) * kReductionBlock);
    double acc = 0.0;
    for (std::size_t s = b * kReductionBlock; s < end; ++s) acc += xs[s] * ys[s];
    partial[b] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t size = x.size();
  const double* xs = x.data();
  double* ys = y.data();
#pragma omp parallel for schedule(static) if (go_parallel(size))
  for (std::size_t s = 0; s < size; ++s) ys[s] += a * xs[s];
}

void scale(double a, std::span<double> x) {
  const std::size_t size = x.size();
  double* xs = x.data();
#pragma omp parallel for schedule(static) if (go_parallel(size))
  for (std::size_t s = 0; s < size; ++s) xs[s] *= a;
}

Block4 pair_block(std::span<const double> psi, int spins, int i, int j) {
  const std::size_t bit_i = std::size_t{1} << i;
  const std::size_t bit_j = std::size_t{1} << j;
  const int lo = std::min(i, j);
  const int hi = std::max(i, j);
  const std::size_t cosets = std::size_t{1} << (spins - 2);
  const std::size_t blocks = block_count(cosets);
  std::vector<std::array<double, 10>> partial(blocks);
  const double* v = psi.data();
#pragma omp parallel for schedule(static) if (go_parallel(cosets))
  for (std::size_t b = 0; b < blocks; ++b) {
    std::array<double, 10> acc{};
    const std::size_t end = std::min(cosets, (b + 1) * kReductionBlock);
    for (std::size_t t = b * kReductionBlock; t < end; ++t)
      accumulate_pair(v, insert_two_zeros(t, lo, hi), bit_i, bit_j, acc.data());
    partial[b] = acc;
  }
  std::array<double, 10> total{};
  for (const auto& p : partial)
    for (int e = 0; e < 10; ++e) total[e] += p[e];
  return unpack_upper(total.data());
}

Block2 site_block(std::span<const double> psi, int spins, int i) {
  const std::size_t bit = std::size_t{1} << i;
  const std::size_t cosets = std::size_t{1} << (spins - 1);
  const std::size_t blocks = block_count(cosets);
  std::vector<std::array<double, 3>> partial(blocks);
  const double* v = psi.data();
#pragma omp parallel for schedule(static) if (go_parallel(cosets))
  for (std::size_t b = 0; b < blocks; ++b) {
    std::array<double, 3> acc{};
    const std::size_t end = std::min(cosets, (b + 1) * kReductionBlock);
    for (std::size_t t = b * kReductionBlock; t < end; ++t) {
      const std::size_t s = insert_zero(t, i);
      const double up = v[s];
      const double down = v[s | bit];
      acc[0] += up * up;
      acc[1] += up * down;
      acc[2] += down * down;
    }
    partial[b] = acc;
  }
  std::array<double, 3> total{};
  for (const auto& p : partial)
    for (int e = 0; e < 3; ++e) total[e] += p[e];
  return {total[0], total[1], total[1], total[2]};
}

namespace serial {

void ising_diagonal(std::span<const std::int32_t> link_ends, int spins, double coupling,
                    std::span<double> diagonal) {
  const std::size_t dim = std::size_t{1} << spins;
  for (std::size_t s = 0; s < dim; ++s) {
    int aligned = 0;
    for (std::size_t l = 0; l + 1 < link_ends.size(); l += 2) {
      const int sa = ((s >> link_ends[l]) & 1U) ? -1 : 1;
      const int sb = ((s >> link_ends[l + 1]) & 1U) ? -1 : 1;
      aligned += sa * sb;
    }
    diagonal[s] = -coupling * aligned;
  }
}

void ising_apply(std::span<const double> diagonal, double field, int spins,
                 std::span<const double> x, std::span<double> y) {
  for (std::size_t s = 0; s < x.size(); ++s) {
    double flips = 0.0;
    for (int i = 0; i < spins; ++i) flips += x[s ^ (std::size_t{1} << i)];
    y[s] = diagonal[s] * x[s] + field * flips;
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t s = 0; s < x.size(); ++s) acc += x[s] * y[s];
  return acc;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t s = 0; s < x.size(); ++s) y[s] += a * x[s];
}

void scale(double a, std::span<double> x) {
  for (double& v : x) v *= a;
}

Block4 pair_block(std::span<const double> psi, int spins, int i, int j) {
  Block4 r{};
  const std::size_t bit_i = std::size_t{1} << i;
  const std::size_t bit_j = std::size_t{1} << j;
  const std::size_t dim = std::size_t{1} << spins;
  for (std::size_t s = 0; s < dim; ++s) {
    const int row = ((s & bit_i) ? 2 : 0) + ((s & bit_j) ? 1 : 0);
    const std::size_t rest = s & ~(bit_i | bit_j);
    for (int col = 0; col < 4; ++col) {
      const std::size_t t = rest | ((col & 2) ? bit_i : 0) | ((col & 1) ? bit_j : 0);
      r[row * 4 + col] += psi[s] * psi[t];
    }
  }
  return r;
}

Block2 site_block(std::span<const double> psi, int spins, int i) {
  Block2 r{};
  const std::size_t bit = std::size_t{1} << i;
  const std::size_t dim = std::size_t{1} << spins;
  for (std::size_t s = 0; s < dim; ++s) {
    const int row = (s & bit) ? 1 : 0;
    r[row * 2 + row] += psi[s] * psi[s];
    r[row * 2 + (1 - row)] += psi[s] * psi[s ^ bit];
  }
  return r;
}

}  // namespace serial

}  // namespace qsn::kernels
