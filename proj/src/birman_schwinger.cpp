#include "bsforge/birman_schwinger.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bsforge {

namespace {

std::size_t frequency_reflect(const FourierGrid &g, std::size_t flat, int axis) {
  const auto s = g.stride(axis);
  const auto n = static_cast<std::size_t>(g.sizes()[axis]);
  const auto i = (flat / s) % n;
  return flat - i * s + ((n - i) % n) * s;
}

bool field_reflection_symmetric(const Field &f, int axis) {
  const auto &g = f.grid();
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (f[k] != f[g.reflect(k, axis)]) {
      return false;
    }
  }
  return true;
}

bool multiplier_reflection_symmetric(const Multiplier &m, int axis) {
  const auto &g = m.grid();
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] != m[frequency_reflect(g, k, axis)]) {
      return false;
    }
  }
  return true;
}

std::vector<int> common_reflection_axes(const Field &chi, const Multiplier &m) {
  std::vector<int> axes;
  for (int j = 0; j < chi.grid().dimension(); ++j) {
    if (field_reflection_symmetric(chi, j) && multiplier_reflection_symmetric(m, j)) {
      axes.push_back(j);
    }
  }
  return axes;
}

Field project_parity(const Field &v, const std::vector<int> &axes, const std::vector<int> &parity) {
  Field out = v;
  const auto &g = v.grid();
  for (std::size_t a = 0; a < axes.size(); ++a) {
    Field next(v.grid_ptr());
    const double p = parity[a];
    for (std::size_t k = 0; k < out.size(); ++k) {
      next[k] = 0.5 * (out[k] + p * out[g.reflect(k, axes[a])]);
    }
    out = std::move(next);
  }
  return out;
}

void drop_imag(Field &f) {
  for (auto &v : f.values()) {
    v = cplx(v.real(), 0.0);
  }
}

struct SectorRun {
  EigenPair pair;
  bool ran = false;
};

SectorRun run_sector(const std::function<Field(const Field &)> &op, const Field &init,
                     const PowerOptions &opt, const std::vector<int> &axes,
                     const std::vector<int> &parity, double init_norm) {
  SectorRun run;
  Field v = init;
  if (opt.enforce_real) {
    drop_imag(v);
  }
  if (!axes.empty()) {
    v = project_parity(v, axes, parity);
  }
  const double n0 = v.norm();
  if (!(n0 > 1e-8 * init_norm)) {
    return run;
  }
  v *= cplx(1.0 / n0);
  run.ran = true;
  EigenPair &ep = run.pair;
  ep.parity = parity;
  for (int it = 1; it <= opt.max_iter; ++it) {
    Field g = op(v);
    if (opt.enforce_real) {
      drop_imag(g);
    }
    if (!axes.empty()) {
      g = project_parity(g, axes, parity);
    }
    const double mu = field_inner(v, g).real();
    if (!(mu > 0.0)) {
      throw std::runtime_error("power iteration reached a non-positive Rayleigh quotient; "
                               "the seed lies in the kernel of the operator");
    }
    Field r = g;
    for (std::size_t k = 0; k < r.size(); ++k) {
      r[k] -= mu * v[k];
    }
    const double res = r.norm() / mu;
    if (opt.record_history) {
      ep.rayleigh_history.push_back(mu);
    }
    ep.mu = mu;
    ep.residual = res;
    ep.iterations = it;
    if (res <= opt.tol) {
      ep.converged = true;
      break;
    }
    const double gn = g.norm();
    g *= cplx(1.0 / gn);
    v = std::move(g);
  }
  ep.phi = std::move(v);
  return run;
}

} // namespace

// ---------------------------------------------------------------------------------------
// RegionSpec

double RegionSpec::axial_half() const { return M / eps * axial_scale; }
double RegionSpec::transverse_half() const { return std::sqrt(M / eps) * transverse_scale; }
double RegionSpec::ball_radius() const { return M / eps * axial_scale; }

double RegionSpec::measure(int d) const {
  const auto ball_volume = [](int n, double r) {
    return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0) * std::pow(r, n);
  };
  if (shape == RegionShape::ball) {
    return ball_volume(d, ball_radius());
  }
  return 2.0 * axial_half() * ball_volume(d - 1, transverse_half());
}

std::vector<double> RegionSpec::center_or_origin(int d) const {
  if (center.empty()) {
    return std::vector<double>(d, 0.0);
  }
  if (static_cast<int>(center.size()) != d) {
    throw std::invalid_argument("region center has the wrong dimension");
  }
  return center;
}

std::vector<double> RegionSpec::axis_or_e1(int d) const {
  std::vector<double> a(d, 0.0);
  if (axis.empty()) {
    a[0] = 1.0;
    return a;
  }
  if (static_cast<int>(axis.size()) != d) {
    throw std::invalid_argument("region axis has the wrong dimension");
  }
  double n = 0.0;
  for (double v : axis) {
    n += v * v;
  }
  n = std::sqrt(n);
  if (!(n > 0.0)) {
    throw std::invalid_argument("region axis must be nonzero");
  }
  for (int j = 0; j < d; ++j) {
    a[j] = axis[j] / n;
  }
  return a;
}

double RegionSpec::extent(int d, int j) const {
  if (shape == RegionShape::ball) {
    return ball_radius();
  }
  const auto a = axis_or_e1(d);
  const double aj = std::abs(a[j]);
  const double perp = d > 1 ? std::sqrt(std::max(0.0, 1.0 - aj * aj)) : 0.0;
  return aj * axial_half() + perp * transverse_half();
}

TubeScales tube_scales(const DispersionSymbol &symbol, double lambda) {
  if (!symbol.is_radial()) {
    return {};
  }
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("tube scaling needs a positive energy");
  }
  const double s = symbol.exponent();
  const double r = symbol.radial_level(lambda);
  return {std::pow(r, s - 1.0), std::pow(r, (s - 2.0) / 2.0)};
}

void require_region_fits(const RegionSpec &region, const FourierGrid &grid) {
  if (!(region.eps > 0.0) || !(region.M > 0.0)) {
    throw std::invalid_argument("region needs eps > 0 and M > 0");
  }
  const int d = grid.dimension();
  const auto c = region.center_or_origin(d);
  for (int j = 0; j < d; ++j) {
    const double reach = std::abs(c[j]) + region.extent(d, j);
    if (!(reach < 0.5 * grid.box_lengths()[j])) {
      throw std::invalid_argument("region reaches " + std::to_string(reach) + " on axis " +
                                  std::to_string(j) + " but the half box is " +
                                  std::to_string(0.5 * grid.box_lengths()[j]) +
                                  "; it would alias across the periodic boundary");
    }
  }
}

Field region_indicator(const RegionSpec &region, const GridPtr &grid) {
  require_region_fits(region, *grid);
  const int d = grid->dimension();
  const auto c = region.center_or_origin(d);
  const auto a = region.axis_or_e1(d);
  const double ah = region.axial_half();
  const double th2 = region.transverse_half() * region.transverse_half();
  const double r2 = region.ball_radius() * region.ball_radius();
  Field chi(grid);
  std::vector<double> x(d);
  for (std::size_t k = 0; k < chi.size(); ++k) {
    grid->position(k, x);
    double t = 0.0;
    double rr = 0.0;
    for (int j = 0; j < d; ++j) {
      x[j] -= c[j];
      t += x[j] * a[j];
      rr += x[j] * x[j];
    }
    bool inside;
    if (region.shape == RegionShape::ball) {
      inside = rr < r2;
    } else {
      double p2 = 0.0;
      for (int j = 0; j < d; ++j) {
        const double p = x[j] - t * a[j];
        p2 += p * p;
      }
      inside = std::abs(t) < ah && p2 < th2;
    }
    chi[k] = inside ? 1.0 : 0.0;
  }
  return chi;
}

// ---------------------------------------------------------------------------------------
// K

BirmanSchwingerOperator::BirmanSchwingerOperator(Field chi, const DispersionSymbol &symbol,
                                                 double lambda, double eps)
    : chi_(std::move(chi)), delta_(delta_multiplier(symbol, lambda, eps, chi_.grid_ptr())),
      lambda_(lambda), eps_(eps) {
  if (!chi_.is_real()) {
    throw std::invalid_argument("region indicator must be real");
  }
  reflection_axes_ = common_reflection_axes(chi_, delta_);
}

Field BirmanSchwingerOperator::apply(const Field &f) const {
  Field g = hadamard(chi_, f);
  g = apply_multiplier(delta_, g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    g[k] *= chi_[k].real();
  }
  return g;
}

Field apply_K(const Field &chi, const DispersionSymbol &symbol, double lambda, double eps,
              const Field &f) {
  require_same_grid(chi.grid(), f.grid(), "apply_K");
  return BirmanSchwingerOperator(chi, symbol, lambda, eps).apply(f);
}

EigenPair power_iteration(const std::function<Field(const Field &)> &op, const Field &init,
                          const PowerOptions &options, const std::vector<int> &reflection_axes) {
  if (options.max_iter < 1 || !(options.tol > 0.0)) {
    throw std::invalid_argument("power iteration needs max_iter >= 1 and tol > 0");
  }
  const double init_norm = init.norm();
  if (!(init_norm > 0.0)) {
    throw std::invalid_argument("power iteration seed is zero");
  }
  const std::vector<int> axes = options.use_symmetry ? reflection_axes : std::vector<int>{};
  const std::size_t sectors = std::size_t{1} << axes.size();
  std::optional<EigenPair> best;
  for (std::size_t mask = 0; mask < sectors; ++mask) {
    std::vector<int> parity(axes.size());
    for (std::size_t a = 0; a < axes.size(); ++a) {
      parity[a] = (mask >> a) & 1U ? -1 : 1;
    }
    auto run = run_sector(op, init, options, axes, parity, init_norm);
    if (!run.ran) {
      continue;
    }
    if (!best || run.pair.mu > best->mu) {
      best = std::move(run.pair);
    }
  }
  if (!best) {
    throw std::invalid_argument("power iteration seed vanishes after projection");
  }
  return std::move(*best);
}

EigenPair top_eigenpair(const BirmanSchwingerOperator &K, const Field &init,
                        const PowerOptions &options) {
  require_same_grid(K.chi().grid(), init.grid(), "top_eigenpair");
  Field seed = hadamard(K.chi(), init);
  return power_iteration([&K](const Field &f) { return K.apply(f); }, seed, options,
                         K.reflection_axes());
}

EigenPair top_eigenpair(const Field &chi, const DispersionSymbol &symbol, double lambda,
                        double eps, const Field &init, double tol, int max_iter) {
  PowerOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  return top_eigenpair(BirmanSchwingerOperator(chi, symbol, lambda, eps), init, opt);
}

// ---------------------------------------------------------------------------------------
// Knapp

double smooth_step(double t) {
  const auto g = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  if (t <= 0.0) {
    return 0.0;
  }
  if (t >= 1.0) {
    return 1.0;
  }
  const double a = g(t);
  return a / (a + g(1.0 - t));
}

double bump_eta0(double u) {
  u = std::abs(u);
  if (u <= 1.0) {
    return 1.0;
  }
  if (u >= 2.0) {
    return 0.0;
  }
  return smooth_step(2.0 - u);
}

KnappPacket knapp_wavepacket(const KnappSpec &spec, const GridPtr &grid,
                             const DispersionSymbol &symbol) {
  if (!(spec.eps > 0.0) || !(spec.c0 > 0.0)) {
    throw std::invalid_argument("Knapp packet needs eps > 0 and c0 > 0");
  }
  const int d = grid->dimension();
  std::vector<double> xi0 = spec.base_point;
  double lambda = spec.lambda;
  if (xi0.empty()) {
    if (!symbol.is_radial()) {
      throw std::invalid_argument("tabulated symbols need an explicit Knapp base point");
    }
    xi0.assign(d, 0.0);
    xi0[0] = symbol.radial_level(lambda);
  } else {
    if (static_cast<int>(xi0.size()) != d) {
      throw std::invalid_argument("Knapp base point has the wrong dimension");
    }
    lambda = symbol(xi0);
  }
  double r0 = 0.0;
  for (double v : xi0) {
    r0 += v * v;
  }
  r0 = std::sqrt(r0);
  if (!(r0 > 0.0)) {
    throw std::invalid_argument("Knapp base point must be nonzero");
  }
  std::vector<double> n(d);
  for (int j = 0; j < d; ++j) {
    n[j] = xi0[j] / r0;
  }
  const double wa = spec.c0 * spec.eps / spec.axial_scale;
  const double wt = std::sqrt(spec.c0 * spec.eps) / spec.transverse_scale;

  // lattice spacing seen along the normal and across it
  double dxi_n = 0.0;
  double dxi_t = 0.0;
  for (int j = 0; j < d; ++j) {
    const double dj = grid->frequency_spacing(j);
    dxi_n += n[j] * n[j] * dj * dj;
    dxi_t = std::max(dxi_t, std::sqrt(std::max(0.0, 1.0 - n[j] * n[j])) * dj);
  }
  dxi_n = std::sqrt(dxi_n);
  const auto resolution_error = [](const char *dir, double width, double dxi) {
    return std::invalid_argument(
        std::string("Knapp cap under-resolved along the ") + dir + " direction: support width " +
        std::to_string(width) + " holds " + std::to_string(width / dxi) +
        " frequency spacings, the resolution rule needs at least 8 (enlarge the box)");
  };
  if (4.0 * wa < 8.0 * dxi_n) {
    throw resolution_error("normal", 4.0 * wa, dxi_n);
  }
  if (d > 1 && 4.0 * wt < 8.0 * dxi_t) {
    throw resolution_error("tangential", 4.0 * wt, dxi_t);
  }
  for (int j = 0; j < d; ++j) {
    const double perp = d > 1 ? std::sqrt(std::max(0.0, 1.0 - n[j] * n[j])) : 0.0;
    const double reach = std::abs(xi0[j]) + 2.0 * (std::abs(n[j]) * wa + perp * wt);
    if (!(reach < grid->max_frequency(j))) {
      throw std::invalid_argument("Knapp cap leaves the frequency lattice on axis " +
                                  std::to_string(j) + " (refine the grid)");
    }
  }

  const auto h = symbol.on_lattice(*grid);
  std::vector<double> x0(d);
  for (int j = 0; j < d; ++j) {
    x0[j] = grid->coordinate(j, 0);
  }
  std::vector<cplx> c(grid->point_count());
  std::vector<double> xi(d);
  double sum_sq = 0.0;
  KnappPacket out;
  out.lambda = lambda;
  for (std::size_t k = 0; k < c.size(); ++k) {
    grid->wavevector(k, xi);
    double along = 0.0;
    double phase = 0.0;
    for (int j = 0; j < d; ++j) {
      along += (xi[j] - xi0[j]) * n[j];
      phase += xi[j] * x0[j];
    }
    double perp2 = 0.0;
    for (int j = 0; j < d; ++j) {
      const double p = xi[j] - xi0[j] - along * n[j];
      perp2 += p * p;
    }
    const double u = std::sqrt((along / wa) * (along / wa) + perp2 / (wt * wt));
    const double fh = bump_eta0(u);
    if (fh == 0.0) {
      continue;
    }
    ++out.support_size;
    out.max_shell_deviation = std::max(out.max_shell_deviation, std::abs(h[k] - lambda));
    sum_sq += fh * fh;
    c[k] = fh * std::polar(1.0, phase);
  }
  if (out.support_size == 0) {
    throw std::invalid_argument("Knapp cap contains no lattice frequencies");
  }
  const double W = grid->volume();
  out.unnormalized_norm_sq = sum_sq / W;
  Field f = inverse_transform(grid, std::move(c));
  f *= cplx(1.0 / f.norm());
  out.field = std::move(f);
  return out;
}

RegionSpec knapp_region(double eps, double M, const TubeScales &scales) {
  RegionSpec r;
  r.eps = eps;
  r.M = M;
  r.axial_scale = scales.axial;
  r.transverse_scale = scales.transverse;
  return r;
}

double knapp_lower_bound(double eps, double M, double c0, const GridPtr &grid,
                         const DispersionSymbol &symbol, double lambda) {
  const auto scales = tube_scales(symbol, lambda);
  const Field chi = region_indicator(knapp_region(eps, M, scales), grid);
  KnappSpec spec;
  spec.eps = eps;
  spec.c0 = c0;
  spec.lambda = lambda;
  spec.axial_scale = scales.axial;
  spec.transverse_scale = scales.transverse;
  const auto packet = knapp_wavepacket(spec, grid, symbol);
  const BirmanSchwingerOperator K(chi, symbol, packet.lambda, eps);
  return eps * K.apply(packet.field).norm() / packet.field.norm();
}

Field default_seed(const RegionSpec &region, const DispersionSymbol &symbol, double lambda,
                   const GridPtr &grid) {
  const Field chi = region_indicator(region, grid);
  if (symbol.is_radial()) {
    try {
      KnappSpec spec;
      spec.eps = region.eps;
      spec.c0 = 1.0 / region.M;
      spec.lambda = lambda;
      spec.axial_scale = region.axial_scale;
      spec.transverse_scale = region.transverse_scale;
      Field seed = real_part(knapp_wavepacket(spec, grid, symbol).field);
      seed = hadamard(chi, seed);
      if (seed.norm() > 0.0) {
        return seed;
      }
    } catch (const std::invalid_argument &) {
      // fall through to the Gaussian seed
    }
  }
  const int d = grid->dimension();
  const double r = symbol.is_radial() ? symbol.radial_level(lambda) : 1.0;
  const auto c = region.center_or_origin(d);
  const auto a = region.axis_or_e1(d);
  const double la = region.axial_half();
  const double lt = region.transverse_half();
  Field seed(grid);
  std::vector<double> x(d);
  for (std::size_t k = 0; k < seed.size(); ++k) {
    if (chi[k].real() == 0.0) {
      continue;
    }
    grid->position(k, x);
    double t = 0.0;
    double rr = 0.0;
    for (int j = 0; j < d; ++j) {
      x[j] -= c[j];
      t += x[j] * a[j];
      rr += x[j] * x[j];
    }
    const double p2 = std::max(0.0, rr - t * t);
    seed[k] = std::cos(r * t) * std::exp(-(t / la) * (t / la) - p2 / (lt * lt));
  }
  return seed;
}

// ---------------------------------------------------------------------------------------
// Rescaled tube operator

double RescaledTubeOperator::symbol_value(double eps, std::span<const double> eta) {
  double tr = 0.0;
  for (std::size_t j = 1; j < eta.size(); ++j) {
    tr += eta[j] * eta[j];
  }
  return 2.0 * eta[0] + tr + eps * eta[0] * eta[0];
}

RescaledTubeOperator::RescaledTubeOperator(double eps, GridPtr grid, double M)
    : eps_(eps), chi_(grid), delta_(grid, std::vector<cplx>(grid->point_count())) {
  if (!(eps >= 0.0)) {
    throw std::invalid_argument("rescaled operator needs eps >= 0");
  }
  RegionSpec unit;
  unit.eps = 1.0;
  unit.M = M;
  chi_ = region_indicator(unit, grid);
  const int d = grid->dimension();
  std::vector<cplx> m(grid->point_count());
  std::vector<double> eta(d);
  for (std::size_t k = 0; k < m.size(); ++k) {
    grid->wavevector(k, eta);
    const double h = symbol_value(eps, eta);
    m[k] = 1.0 / (h * h + 1.0);
  }
  delta_ = Multiplier(grid, std::move(m));
  reflection_axes_ = common_reflection_axes(chi_, delta_);
}

Field RescaledTubeOperator::apply(const Field &f) const {
  Field g = hadamard(chi_, f);
  g = apply_multiplier(delta_, g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    g[k] *= chi_[k].real();
  }
  return g;
}

Field RescaledTubeOperator::knapp_init(double c0) const {
  if (!(c0 > 0.0)) {
    throw std::invalid_argument("Knapp cap needs c0 > 0");
  }
  const auto &grid = chi_.grid_ptr();
  const int d = grid->dimension();
  std::vector<double> x0(d);
  for (int j = 0; j < d; ++j) {
    x0[j] = grid->coordinate(j, 0);
  }
  std::vector<cplx> c(grid->point_count());
  std::vector<double> eta(d);
  for (std::size_t k = 0; k < c.size(); ++k) {
    grid->wavevector(k, eta);
    double u2 = (eta[0] / c0) * (eta[0] / c0);
    double phase = eta[0] * x0[0];
    for (int j = 1; j < d; ++j) {
      u2 += eta[j] * eta[j] / c0;
      phase += eta[j] * x0[j];
    }
    const double fh = bump_eta0(std::sqrt(u2));
    if (fh != 0.0) {
      c[k] = fh * std::polar(1.0, phase);
    }
  }
  Field f = inverse_transform(grid, std::move(c));
  const double n = f.norm();
  if (!(n > 0.0)) {
    throw std::invalid_argument("Knapp cap contains no lattice frequencies");
  }
  f *= cplx(1.0 / n);
  return f;
}

EigenPair RescaledTubeOperator::top_eigenpair(const Field &init, PowerOptions options) const {
  require_same_grid(chi_.grid(), init.grid(), "rescaled top_eigenpair");
  options.enforce_real = false;
  Field seed = hadamard(chi_, init);
  return power_iteration([this](const Field &f) { return apply(f); }, seed, options,
                         reflection_axes_);
}

GridPtr rescaled_grid(const FourierGrid &physical, double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("rescaled grid needs eps > 0");
  }
  std::vector<double> lengths = physical.box_lengths();
  lengths[0] *= eps;
  for (std::size_t j = 1; j < lengths.size(); ++j) {
    lengths[j] *= std::sqrt(eps);
  }
  return build_grid(physical.dimension(), lengths, physical.sizes());
}

} // namespace bsforge
