#pragma once

#include <map>
#include <string>
#include <vector>

#include "bsforge/birman_schwinger.hpp"

namespace bsforge {

/// Forged potential with the data that makes the eigenvalue claim checkable.
struct Certificate {
  DispersionSymbol symbol = DispersionSymbol::laplacian();
  double lambda = 1.0;
  double eps = 0.1;
  cplx z{1.0, 0.1};
  RegionSpec region;
  double mu = 0.0;
  Field phi;
  Field psi;
  Field V; // complex; |V| <= 1/mu on the region, 0 elsewhere
  double residual = 0.0;
  double nodal_fraction = 0.0;
  double tau = 1e-8;
  double eigen_residual = 0.0;
  int iterations = 0;
  std::map<double, double> q_norms;

  const FourierGrid &grid() const { return psi.grid(); }
  int dimension() const { return psi.grid().dimension(); }
};

inline constexpr double kDefaultNodalThreshold = 1e-8;

/// Default exponents for q_norms: 1, (d+1)/2, 2, 4.
std::vector<double> default_q_list(int d);

/// psi = (H0 - z)^{-1} phi, V = -mu^{-1} Im(psi)/psi on region minus the nodal set.
Certificate forge_potential(const DispersionSymbol &symbol, double lambda, double eps,
                            const RegionSpec &region, const EigenPair &eigenpair,
                            double tau = kDefaultNodalThreshold,
                            const std::vector<double> &q_list = {});

/// |(H0 + V - z) psi| / |psi| computed spectrally.
double eigen_equation_residual(const Certificate &cert);

/// mu^{-1} |1_N Im psi| / |psi|; the part of the residual owed to the nodal cutoff.
double nodal_residual_bound(const Certificate &cert);

struct VerifyReport {
  bool passed = false;
  double residual = 0.0;
  double tol = 0.0;
  bool pointwise_bound = false; // |V| <= 1/mu everywhere
  bool support = false;         // V = 0 off the region
  bool norm_bounds = false;     // |V|_q <= mu^{-1} |region|^{1/q}
  std::map<double, double> q_norms;
  std::vector<std::string> failures;
};

VerifyReport verify_certificate(const Certificate &cert, double tol,
                                const std::vector<double> &q_list = {});

struct BsCorrespondence {
  /// |((H0-lambda)^2 + eps^2) u - (eps/mu) chi^2 u| / |u| with u = delta chi phi.
  double kernel_residual = 0.0;
  /// Same numerator over |((H0-lambda)^2 + eps^2) u|; scale free.
  double relative_kernel_residual = 0.0;
  /// |mu^{-1} chi u - phi|.
  double inverse_residual = 0.0;
};

BsCorrespondence verify_bs_correspondence(const EigenPair &eigenpair,
                                          const DispersionSymbol &symbol, double lambda,
                                          double eps, const RegionSpec &region);

struct EmbeddedCertificate {
  Certificate certificate;
  double outside_norm = 0.0;     // |(1 - chi) f|
  double quasimode_defect = 0.0; // |(H0 - lambda) f|
  double seed_bound = 0.0;       // eps |chi delta chi f|
  double max_abs_V = 0.0;
};

/// Perturbation route for a quasi-mode f: checks the preconditions, then forges with a
/// power iteration seeded by chi f. The result satisfies |V| <= 4 eps chi.
EmbeddedCertificate embedded_perturbation(const Field &f, const DispersionSymbol &symbol,
                                          double lambda, double eps, const RegionSpec &region,
                                          const PowerOptions &options = {},
                                          double tau = kDefaultNodalThreshold);

} // namespace bsforge
