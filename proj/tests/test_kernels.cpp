#include "doctest.h"

#include <omp.h>

#include <cstring>
#include <vector>

#include "oracles.hpp"
#include "qsn/kernels.hpp"
#include "qsn/rng.hpp"

using namespace qsn;

namespace {

std::vector<double> random_vector(std::size_t size, std::uint64_t seed) {
  Stream rng(seed);
  std::vector<double> v(size);
  for (auto& x : v) x = rng.uniform() - 0.5;
  return v;
}

bool bitwise_equal(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<std::int32_t> ring_links(int n) {
  std::vector<std::int32_t> ends;
  for (int i = 0; i < n; ++i) {
    ends.push_back(i);
    ends.push_back((i + 1) % n);
  }
  return ends;
}

}  // namespace

TEST_CASE("parallel kernels are bitwise stable across thread counts") {
  const int n = 16;
  const std::size_t dim = std::size_t{1} << n;
  const auto x = random_vector(dim, 1);
  const auto y0 = random_vector(dim, 2);
  const auto links = ring_links(n);

  std::vector<double> diag_ref(dim), apply_ref(dim);
  kernels::serial::ising_diagonal(links, n, 1.3, diag_ref);
  kernels::serial::ising_apply(diag_ref, 0.7, n, x, apply_ref);
  auto axpy_ref = y0;
  kernels::serial::axpy(0.25, x, axpy_ref);

  // Reductions are blocked, so they match the plain serial loops only to
  // rounding; across thread counts they must not move at all.
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double dot_ref = kernels::dot(x, y0);
  const auto pair_ref = kernels::pair_block(x, n, 3, 11);
  const auto site_ref = kernels::site_block(x, n, 5);
  CHECK(dot_ref == doctest::Approx(kernels::serial::dot(x, y0)).epsilon(1e-12));
  const auto pair_serial = kernels::serial::pair_block(x, n, 3, 11);
  for (int e = 0; e < 16; ++e) CHECK(pair_ref[e] == doctest::Approx(pair_serial[e]).epsilon(1e-12));
  for (int threads : {1, 2, 3, 8}) {
    CAPTURE(threads);
    omp_set_num_threads(threads);
    std::vector<double> diag(dim), applied(dim);
    kernels::ising_diagonal(links, n, 1.3, diag);
    kernels::ising_apply(diag, 0.7, n, x, applied);
    CHECK(bitwise_equal(diag, diag_ref));
    CHECK(bitwise_equal(applied, apply_ref));
    const double d = kernels::dot(x, y0);
    CHECK(std::memcmp(&d, &dot_ref, sizeof d) == 0);
    CHECK(kernels::pair_block(x, n, 3, 11) == pair_ref);
    CHECK(kernels::site_block(x, n, 5) == site_ref);
    auto y = y0;
    kernels::axpy(0.25, x, y);
    CHECK(bitwise_equal(y, axpy_ref));
  }
  omp_set_num_threads(saved);
}

TEST_CASE("blocked dot product agrees with a plain sum") {
  const auto x = random_vector(100000, 3);
  const auto y = random_vector(100000, 4);
  long double plain = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) plain += (long double)x[i] * y[i];
  CHECK(kernels::dot(x, y) == doctest::Approx(double(plain)).epsilon(1e-12));
}

TEST_CASE("ising diagonal counts satisfied and frustrated links") {
  // Path 0-1-2, J = 1. Basis index 0b010 has spin 1 down: both links broken.
  const std::vector<std::int32_t> ends{0, 1, 1, 2};
  std::vector<double> diag(8);
  kernels::ising_diagonal(ends, 3, 1.0, diag);
  CHECK(diag[0] == -2.0);
  CHECK(diag[0b010] == 2.0);
  CHECK(diag[0b001] == 0.0);
  CHECK(diag[0b111] == -2.0);
}

TEST_CASE("matrix-free action equals the dense Hamiltonian") {
  const int n = 6;
  const Graph g(n, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}, {0, 3}});
  std::vector<std::int32_t> ends;
  for (const auto& l : g.links()) {
    ends.push_back(l.a);
    ends.push_back(l.b);
  }
  std::vector<double> diag(1 << n), y(1 << n);
  kernels::ising_diagonal(ends, n, 0.8, diag);
  const auto x = random_vector(1 << n, 9);
  kernels::ising_apply(diag, 1.7, n, x, y);
  const Eigen::VectorXd ref =
      oracle::hamiltonian(g, 0.8, 1.7) * Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
  for (int s = 0; s < (1 << n); ++s) CHECK(y[s] == doctest::Approx(ref(s)).epsilon(1e-13));
}

TEST_CASE("pair block is the dense partial trace of a pure state") {
  const int n = 5;
  const auto psi = random_vector(1 << n, 12);
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(psi.data(), psi.size());
  const Eigen::MatrixXd rho = v * v.transpose();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto block = kernels::pair_block(psi, n, i, j);
      const Eigen::MatrixXd ref = oracle::partial_trace_pair(rho, n, i, j);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) CHECK(block[r * 4 + c] == doctest::Approx(ref(r, c)).epsilon(1e-13));
    }
}
