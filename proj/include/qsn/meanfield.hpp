#pragma once

#include <span>
#include <vector>

#include "qsn/graph.hpp"
#include "qsn/minet.hpp"
#include "qsn/quantum_state.hpp"

namespace qsn {

/// Uniform mean field for dimensionless field lambda = h / (Z J).
struct UniformMeanField {
  double lambda = 0.0;
  double theta = 0.0;          // tilt from the z axis
  double magnetization = 1.0;  // sqrt(1 - lambda^2) below lambda = 1, else 0
};

UniformMeanField mf_uniform(double lambda);

/// Closed-form pair mutual information (bits) of the uniform mean-field
/// state with magnetization m; exact limits at m = 0 and m = 1.
double mf_uniform_mi(double m);

/// Mean emergent-network measures; `degree` is k / (n - 1).
struct NetworkMeans {
  double degree = 0.0;
  double clustering = 0.0;
  double distance = 0.0;  // +inf when no pair is linked
};

/// Fully connected uniform prediction: k/(n-1) = C = I_MF, d = 1 / I_MF.
NetworkMeans mf0_measures(double lambda, int n);

struct MfOptions {
  double tolerance = 1e-14;  // on max_i |delta m_i| between sweeps
  int max_iter = 1'000'000;
  double mixing = 0.0;  // fraction of the previous iterate kept each sweep
};

struct GeneralMeanField {
  std::vector<double> magnetization;
  double residual = 0.0;  // max violation of the self-consistency condition
  int iterations = 0;
};

/// Iterates m_i <- x / sqrt(1 + x^2), x = (J/h) sum_{j in N(i)} m_j, from
/// m_i = 1 until the update stalls below tolerance. h = 0 returns m_i = 1.
GeneralMeanField mf_general_solve(const Graph& g, double coupling, double field,
                                  const MfOptions& options = {});

/// Max over nodes of |m_i / sqrt(1 - m_i^2) - (J/h) sum m_j|, scaled by
/// max(1, |rhs|). Nodes with m_i = 1 are skipped (h = 0 only).
double mf_residual(const Graph& g, double coupling, double field, std::span<const double> m);

struct MfRdms {
  SiteRdm first;
  SiteRdm second;
  PairRdm pair;
};

/// Reduced matrices of the product-like mean-field state for magnetizations
/// m_i (first site) and m_j (second site).
MfRdms mf_rdms(double m_i, double m_j);

enum class AttackedSites { none, first, second, both };

MfRdms mf_attacked_rdm(double m_i, double m_j, double q, Axis direction, AttackedSites which);

/// All-pairs reduced matrices for per-node mean-field magnetizations.
RdmTable mf_rdm_table(std::span<const double> magnetization);

/// Uniform-mean-field means after attacking a fraction f of the nodes.
/// The degree uses the expected pair categories (1-f)^2, 2f(1-f), f^2;
/// clustering and distance are evaluated on the three-valued fully
/// connected network with round(f n) attacked nodes.
NetworkMeans mf0_attacked_mean_measures(double lambda, int n, double fraction, double q,
                                        Axis direction);

}  // namespace qsn
