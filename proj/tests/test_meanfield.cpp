#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "oracles.hpp"
#include "qsn/error.hpp"
#include "qsn/meanfield.hpp"

using namespace qsn;

namespace {

// Uniform mean-field pair matrix written out element by element.
Eigen::Matrix4d uniform_pair(double m) {
  const double a = std::sqrt(1 - m * m);
  const double b = 1 - m * m;
  Eigen::Matrix4d r;
  r << 1 + m * m, a, a, b,
       a, b, b, a,
       a, b, b, a,
       b, a, a, 1 + m * m;
  return r / 4;
}

}  // namespace

TEST_CASE("uniform solution: m = sqrt(1 - lambda^2) below lambda = 1") {
  CHECK(mf_uniform(0.0).magnetization == 1.0);
  CHECK(mf_uniform(0.6).magnetization == doctest::Approx(0.8));
  CHECK(mf_uniform(0.6).theta == doctest::Approx(std::asin(0.6)));
  CHECK(mf_uniform(1.0).magnetization == 0.0);
  CHECK(mf_uniform(2.5).theta == doctest::Approx(M_PI / 2));
  CHECK_THROWS_AS(mf_uniform(-0.1), InvalidArgument);
}

TEST_CASE("closed-form MI equals the entropy of the mean-field matrices") {
  for (int k = 1; k < 200; ++k) {
    const double m = k / 200.0;
    CAPTURE(m);
    CHECK(mf_uniform_mi(m) == doctest::Approx(oracle::mutual_information(uniform_pair(m))).epsilon(1e-12));
  }
  CHECK(mf_uniform_mi(1.0) == 0.5);
  CHECK(mf_uniform_mi(0.0) == 0.0);
  CHECK(mf_uniform_mi(0.8) == doctest::Approx(0.2697373660251156).epsilon(1e-14));
  CHECK_THROWS_AS(mf_uniform_mi(1.5), InvalidArgument);
}

TEST_CASE("closed-form MI is monotone in m") {
  double prev = 0.0;
  for (int k = 1; k <= 1000; ++k) {
    const double v = mf_uniform_mi(k / 1000.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("uniform mean-field measures") {
  const NetworkMeans at0 = mf0_measures(0.0, 20);
  CHECK(at0.degree == 0.5);
  CHECK(at0.clustering == 0.5);
  CHECK(at0.distance == 2.0);
  const NetworkMeans para = mf0_measures(1.2, 20);
  CHECK(para.degree == 0.0);
  CHECK(para.clustering == 0.0);
  CHECK(para.distance == kInfinity);
}

TEST_CASE("general solver satisfies the self-consistency condition") {
  Stream rng(13);
  for (int t = 0; t < 10; ++t) {
    const Graph g = gen_erdos_renyi(20, 0.26, rng);
    for (double h : {0.5, 2.0, 4.0, 8.0}) {
      const auto mf = mf_general_solve(g, 1.0, h);
      CHECK(mf.residual < 1e-10);
      for (double m : mf.magnetization) {
        CHECK(m >= 0.0);
        CHECK(m <= 1.0);
      }
      // Independent residual.
      for (Node i = 0; i < g.size(); ++i) {
        double sum = 0.0;
        for (Node j : g.neighbors(i)) sum += mf.magnetization[j];
        const double m = mf.magnetization[i];
        if (m > 0.0) CHECK(m / std::sqrt(1 - m * m) == doctest::Approx(sum / h).epsilon(1e-8));
      }
    }
  }
  const auto zero = mf_general_solve(Graph::ring(5), 1.0, 0.0);
  for (double m : zero.magnetization) CHECK(m == 1.0);
}

TEST_CASE("regular graphs reduce to the uniform solution") {
  Stream rng(1);
  const Graph ring = gen_watts_strogatz(14, 4, 0.0, rng);
  for (double lambda : {0.1, 0.4, 0.7, 0.95, 1.3}) {
    const auto mf = mf_general_solve(ring, 1.0, lambda * 4.0);
    const double m0 = mf_uniform(lambda).magnetization;
    for (double m : mf.magnetization) CHECK(m == doctest::Approx(m0).epsilon(1e-9));
    const MiNetwork net = build_mi_network(mf_rdm_table(mf.magnetization));
    const double mi = mf_uniform_mi(m0);
    for (double k : weighted_degree(net)) CHECK(k / 13 == doctest::Approx(mi).epsilon(1e-9));
    for (double c : weighted_clustering(net)) CHECK(c == doctest::Approx(mi).epsilon(1e-9));
  }
}

TEST_CASE("mean-field pair matrix reproduces the uniform form and its marginals") {
  for (double m : {0.0, 0.3, 0.8, 1.0}) {
    const MfRdms r = mf_rdms(m, m);
    CHECK((r.pair - uniform_pair(m)).cwiseAbs().maxCoeff() < 1e-15);
  }
  const MfRdms r = mf_rdms(0.9, 0.2);
  CHECK((trace_out_second(r.pair) - r.first).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((trace_out_first(r.pair) - r.second).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_NOTHROW(check_density_matrix(r.pair));
  // <s^z s^z> = m_i m_j, <s^x_i> = sqrt(1 - m_i^2).
  const double zz = r.pair(0, 0) - r.pair(1, 1) - r.pair(2, 2) + r.pair(3, 3);
  CHECK(zz == doctest::Approx(0.9 * 0.2));
  CHECK(2 * r.first(0, 1) == doctest::Approx(std::sqrt(1 - 0.81)));
}

TEST_CASE("z-attacked mean-field matrices take the closed forms") {
  for (double m : {0.2, 0.6, 0.95}) {
    for (double q : {0.3, 0.5, 1.0}) {
      const double a = std::sqrt(1 - m * m);
      const double b = 1 - m * m;
      const double s = 1 - q;
      Eigen::Matrix4d one;
      one << 1 + m * m, a, s * a, s * b,
             a, b, s * b, s * a,
             s * a, s * b, b, a,
             s * b, s * a, a, 1 + m * m;
      Eigen::Matrix4d both;
      both << 1 + m * m, s * a, s * a, s * s * b,
              s * a, b, s * s * b, s * a,
              s * a, s * s * b, b, s * a,
              s * s * b, s * a, s * a, 1 + m * m;
      const MfRdms r1 = mf_attacked_rdm(m, m, q, Axis::z, AttackedSites::first);
      const MfRdms r2 = mf_attacked_rdm(m, m, q, Axis::z, AttackedSites::both);
      CHECK((r1.pair - one / 4).cwiseAbs().maxCoeff() < 1e-15);
      CHECK((r2.pair - both / 4).cwiseAbs().maxCoeff() < 1e-15);
      CHECK(r1.first(0, 1) == doctest::Approx(s * a / 2));
    }
  }
}

TEST_CASE("x-attacked mean-field matrix shrinks only z-z correlations") {
  for (double m : {0.2, 0.6, 0.95}) {
    for (double q : {0.5, 1.0}) {
      const double a = std::sqrt(1 - m * m);
      const double b = 1 - m * m;
      const double s = 1 - q;
      Eigen::Matrix4d expect;
      expect << 1 + m * m * s, a, a, b,
                a, 1 - m * m * s, b, a,
                a, b, 1 - m * m * s, a,
                b, a, a, 1 + m * m * s;
      const MfRdms r = mf_attacked_rdm(m, m, q, Axis::x, AttackedSites::first);
      CHECK((r.pair - expect / 4).cwiseAbs().maxCoeff() < 1e-15);
      CHECK((r.first - mf_rdms(m, m).first).cwiseAbs().maxCoeff() < 1e-15);
      const MfRdms both = mf_attacked_rdm(m, m, q, Axis::x, AttackedSites::both);
      const double zz = both.pair(0, 0) - both.pair(1, 1) - both.pair(2, 2) + both.pair(3, 3);
      CHECK(zz == doctest::Approx(m * m * s * s));
    }
  }
}

TEST_CASE("shrinking the x-x coherence as well would not give a state") {
  // The variant that also multiplies the (1,4) element by (1 - q) has a
  // negative eigenvalue somewhere on the (m, q) grid.
  double worst = 1.0;
  for (int i = 1; i < 20; ++i)
    for (int k = 1; k <= 10; ++k) {
      const double m = i / 20.0, q = k / 10.0;
      Eigen::Matrix4d r = 4 * mf_attacked_rdm(m, m, q, Axis::x, AttackedSites::first).pair;
      r(0, 3) = r(3, 0) = (1 - q) * (1 - m * m);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(r / 4);
      worst = std::min(worst, es.eigenvalues()[0]);
    }
  CHECK(worst < -0.1);
}

TEST_CASE("attacked uniform means") {
  // No attack, no change.
  const NetworkMeans base = mf0_measures(0.5, 20);
  const NetworkMeans none = mf0_attacked_mean_measures(0.5, 20, 0.0, 1.0, Axis::x);
  CHECK(none.degree == doctest::Approx(base.degree));
  CHECK(none.clustering == doctest::Approx(base.clustering));
  CHECK(none.distance == doctest::Approx(base.distance));
  // x attacks lower the mean degree; everything is zero in the paramagnet.
  CHECK(mf0_attacked_mean_measures(0.5, 20, 0.2, 1.0, Axis::x).degree < base.degree);
  CHECK(mf0_attacked_mean_measures(1.5, 20, 0.2, 1.0, Axis::x).degree == 0.0);
  // Degree follows the expected pair categories.
  const double m = mf_uniform(0.5).magnetization;
  auto mi = [&](AttackedSites w) {
    const MfRdms r = mf_attacked_rdm(m, m, 0.5, Axis::x, w);
    return oracle::mutual_information(r.pair);
  };
  const double f = 0.2;
  const double expect = (1 - f) * (1 - f) * mi(AttackedSites::none) +
                        2 * f * (1 - f) * mi(AttackedSites::first) + f * f * mi(AttackedSites::both);
  CHECK(mf0_attacked_mean_measures(0.5, 20, f, 0.5, Axis::x).degree ==
        doctest::Approx(expect).epsilon(1e-12));
}
