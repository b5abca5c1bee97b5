#include "bsforge/forge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bsforge/bounds.hpp"

namespace bsforge {

namespace {

Field apply_shifted_symbol(const DispersionSymbol &symbol, cplx z, const Field &f) {
  const auto m = symbol_function(symbol, f.grid_ptr(), [z](double h) { return h - z; });
  return apply_multiplier(m, f);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

} // namespace

std::vector<double> default_q_list(int d) { return {1.0, (d + 1) / 2.0, 2.0, 4.0}; }

Certificate forge_potential(const DispersionSymbol &symbol, double lambda, double eps,
                            const RegionSpec &region, const EigenPair &eigenpair, double tau,
                            const std::vector<double> &q_list) {
  if (!eigenpair.converged) {
    throw std::invalid_argument("cannot forge from a non-converged eigenpair (residual " +
                                fmt(eigenpair.residual) + ")");
  }
  if (!(eigenpair.mu > 0.0)) {
    throw std::invalid_argument("cannot forge with mu <= 0");
  }
  if (!(tau > 0.0) || tau > 1e-4) {
    throw std::invalid_argument("nodal threshold must lie in (0, 1e-4]");
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("forging needs eps > 0");
  }
  const Field &phi = eigenpair.phi;
  const auto &grid = phi.grid_ptr();
  const Field chi = region_indicator(region, grid);
  const cplx z(lambda, eps);

  Certificate cert;
  cert.symbol = symbol;
  cert.lambda = lambda;
  cert.eps = eps;
  cert.z = z;
  cert.region = region;
  cert.mu = eigenpair.mu;
  cert.phi = phi;
  cert.tau = tau;
  cert.eigen_residual = eigenpair.residual;
  cert.iterations = eigenpair.iterations;
  cert.psi = apply_multiplier(resolvent_multiplier(symbol, z, grid), phi);

  const double max_psi = cert.psi.max_abs();
  if (!(max_psi > 0.0)) {
    throw std::runtime_error("degenerate eigenfunction: psi vanishes identically");
  }
  const double cut = tau * max_psi;
  const double inv_mu = 1.0 / eigenpair.mu;
  const double shrink = std::nextafter(1.0, 0.0);
  cert.V = Field(grid);
  std::size_t inside = 0;
  std::size_t nodal = 0;
  for (std::size_t k = 0; k < chi.size(); ++k) {
    if (chi[k].real() == 0.0) {
      continue;
    }
    ++inside;
    const cplx p = cert.psi[k];
    const double a = std::abs(p);
    if (a <= cut) {
      ++nodal;
      continue;
    }
    const double t = std::clamp(p.imag() / a, -1.0, 1.0);
    cplx v = -(t * inv_mu) * (std::conj(p) / a);
    while (std::abs(v) > inv_mu) {
      v *= shrink;
    }
    cert.V[k] = v;
  }
  cert.nodal_fraction = inside ? static_cast<double>(nodal) / static_cast<double>(inside) : 0.0;
  cert.residual = eigen_equation_residual(cert);
  for (double q : q_list.empty() ? default_q_list(grid->dimension()) : q_list) {
    cert.q_norms[q] = lq_norm(cert.V, q);
  }
  return cert;
}

double eigen_equation_residual(const Certificate &cert) {
  Field r = apply_shifted_symbol(cert.symbol, cert.z, cert.psi);
  r += hadamard(cert.V, cert.psi);
  return r.norm() / cert.psi.norm();
}

double nodal_residual_bound(const Certificate &cert) {
  const Field chi = region_indicator(cert.region, cert.psi.grid_ptr());
  const double cut = cert.tau * cert.psi.max_abs();
  Field part(cert.psi.grid_ptr());
  for (std::size_t k = 0; k < part.size(); ++k) {
    if (chi[k].real() != 0.0 && std::abs(cert.psi[k]) <= cut) {
      part[k] = cert.psi[k].imag();
    }
  }
  return part.norm() / (cert.mu * cert.psi.norm());
}

VerifyReport verify_certificate(const Certificate &cert, double tol,
                                const std::vector<double> &q_list) {
  VerifyReport rep;
  rep.tol = tol;
  auto fail = [&rep](std::string what) { rep.failures.push_back(std::move(what)); };

  if (!(cert.eps > 0.0)) {
    fail("invariant eps > 0 violated");
  }
  if (cert.z != cplx(cert.lambda, cert.eps)) {
    fail("invariant z = lambda + i eps violated");
  }
  if (!(cert.mu > 0.0) || !std::isfinite(cert.mu)) {
    fail("invariant mu > 0 violated");
  }
  if (!cert.phi.grid_ptr() || !cert.psi.grid_ptr() || !cert.V.grid_ptr() ||
      !(cert.phi.grid() == cert.psi.grid()) || !(cert.V.grid() == cert.psi.grid())) {
    fail("invariant phi, psi, V share one grid violated");
    rep.passed = false;
    return rep;
  }
  if (!cert.phi.is_real()) {
    fail("invariant phi real violated");
  }
  if (!rep.failures.empty()) {
    return rep;
  }

  Field chi;
  try {
    chi = region_indicator(cert.region, cert.psi.grid_ptr());
  } catch (const std::exception &e) {
    fail(std::string("region invalid: ") + e.what());
    return rep;
  }
  const double inv_mu = 1.0 / cert.mu;
  std::size_t above = 0;
  std::size_t off = 0;
  std::size_t inside = 0;
  for (std::size_t k = 0; k < chi.size(); ++k) {
    if (!(std::abs(cert.V[k]) <= inv_mu)) {
      ++above;
    }
    if (chi[k].real() == 0.0) {
      if (cert.V[k] != cplx{}) {
        ++off;
      }
    } else {
      ++inside;
    }
  }
  rep.pointwise_bound = above == 0;
  rep.support = off == 0;
  if (!rep.pointwise_bound) {
    fail("pointwise bound |V| <= 1/mu violated at " + std::to_string(above) + " points");
  }
  if (!rep.support) {
    fail("support V = 0 off the region violated at " + std::to_string(off) + " points");
  }

  const double measure = static_cast<double>(inside) * cert.grid().cell_volume();
  rep.norm_bounds = true;
  for (double q : q_list.empty() ? default_q_list(cert.dimension()) : q_list) {
    const double n = lq_norm(cert.V, q);
    rep.q_norms[q] = n;
    const double bound = std::isinf(q) ? inv_mu : inv_mu * std::pow(measure, 1.0 / q);
    if (n > bound * (1.0 + 1e-12)) {
      rep.norm_bounds = false;
      fail("norm bound |V|_q <= |region|^{1/q}/mu violated at q = " + fmt(q) + " (" + fmt(n) +
           " > " + fmt(bound) + ")");
    }
  }

  rep.residual = eigen_equation_residual(cert);
  if (!(rep.residual <= tol)) {
    fail("eigenvalue equation residual " + fmt(rep.residual) + " exceeds tolerance " +
         fmt(tol));
  }
  rep.passed = rep.failures.empty();
  return rep;
}

BsCorrespondence verify_bs_correspondence(const EigenPair &eigenpair,
                                          const DispersionSymbol &symbol, double lambda,
                                          double eps, const RegionSpec &region) {
  if (!(eigenpair.mu > 0.0)) {
    throw std::invalid_argument("Birman-Schwinger check needs mu > 0");
  }
  const Field &phi = eigenpair.phi;
  const auto &grid = phi.grid_ptr();
  const Field chi = region_indicator(region, grid);
  const Field u = apply_multiplier(delta_multiplier(symbol, lambda, eps, grid), hadamard(chi, phi));
  const auto A = symbol_function(symbol, grid, [=](double h) {
    return cplx((h - lambda) * (h - lambda) + eps * eps, 0.0);
  });
  const Field lhs = apply_multiplier(A, u);
  Field diff = lhs;
  const double scale = eps / eigenpair.mu;
  for (std::size_t k = 0; k < diff.size(); ++k) {
    const double c = chi[k].real();
    diff[k] -= scale * c * c * u[k];
  }
  BsCorrespondence out;
  const double num = diff.norm();
  out.kernel_residual = num / u.norm();
  out.relative_kernel_residual = num / lhs.norm();
  Field back = hadamard(chi, u);
  back *= cplx(1.0 / eigenpair.mu);
  back -= phi;
  out.inverse_residual = back.norm() / phi.norm();
  return out;
}

EmbeddedCertificate embedded_perturbation(const Field &f, const DispersionSymbol &symbol,
                                          double lambda, double eps, const RegionSpec &region,
                                          const PowerOptions &options, double tau) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("embedded route needs eps > 0");
  }
  const double fn = f.norm();
  if (std::abs(fn - 1.0) > 1e-10) {
    throw std::invalid_argument("quasi-mode must be normalized, |f| = " + fmt(fn));
  }
  const auto &grid = f.grid_ptr();
  const Field chi = region_indicator(region, grid);
  EmbeddedCertificate out;

  Field outside = f;
  for (std::size_t k = 0; k < outside.size(); ++k) {
    outside[k] *= 1.0 - chi[k].real();
  }
  out.outside_norm = outside.norm();
  if (out.outside_norm > 0.25) {
    throw std::invalid_argument("precondition |(1 - chi) f| <= 1/4 fails: |(1 - chi) f| = " +
                                fmt(out.outside_norm));
  }
  out.quasimode_defect = apply_shifted_symbol(symbol, cplx(lambda, 0.0), f).norm();
  if (eps < 2.0 * out.quasimode_defect) {
    throw std::invalid_argument("precondition eps >= 2 |(H0 - lambda) f| fails: |(H0 - lambda) f| = " +
                                fmt(out.quasimode_defect) + ", eps = " + fmt(eps));
  }
  const BirmanSchwingerOperator K(chi, symbol, lambda, eps);
  out.seed_bound = eps * K.apply(f).norm();
  if (out.seed_bound < 0.25) {
    throw std::runtime_error("eps |K f| = " + fmt(out.seed_bound) +
                             " fell below 1/4 although the preconditions hold");
  }

  Field seed = real_part(f);
  if (seed.norm() < 1e-3) {
    seed = imag_part(f);
  }
  const EigenPair ep = top_eigenpair(K, seed, options);
  if (!ep.converged) {
    throw std::runtime_error("power iteration did not converge (residual " + fmt(ep.residual) +
                             ")");
  }
  out.certificate = forge_potential(symbol, lambda, eps, region, ep, tau);
  out.max_abs_V = out.certificate.V.max_abs();
  if (out.max_abs_V > 4.0 * eps) {
    throw std::logic_error("forged |V| = " + fmt(out.max_abs_V) + " exceeds 4 eps");
  }
  return out;
}

} // namespace bsforge
