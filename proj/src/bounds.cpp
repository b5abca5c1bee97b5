#include "bsforge/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bsforge/fit.hpp"

namespace bsforge {

namespace {

double qth_power(const Field &V, double q) {
  const double n = lq_norm(V, q);
  if (!(n > 0.0)) {
    throw std::invalid_argument("potential has zero L^q norm");
  }
  return std::pow(n, q);
}

bool inside_region(const RegionSpec &region, std::span<const double> x, int d) {
  const auto c = region.center_or_origin(d);
  const auto a = region.axis_or_e1(d);
  double t = 0.0;
  double rr = 0.0;
  for (int j = 0; j < d; ++j) {
    const double y = x[j] - c[j];
    t += y * a[j];
    rr += y * y;
  }
  if (region.shape == RegionShape::ball) {
    return rr < region.ball_radius() * region.ball_radius();
  }
  double p2 = 0.0;
  for (int j = 0; j < d; ++j) {
    const double p = x[j] - c[j] - t * a[j];
    p2 += p * p;
  }
  return std::abs(t) < region.axial_half() && p2 < region.transverse_half() * region.transverse_half();
}

} // namespace

double lq_norm(const Field &f, double q) {
  if (!(q >= 1.0)) {
    throw std::invalid_argument("L^q norm needs q >= 1");
  }
  if (std::isinf(q)) {
    return f.max_abs();
  }
  double s = 0.0;
  if (q == 2.0) {
    for (const auto &v : f.values()) {
      s += std::norm(v);
    }
  } else {
    for (const auto &v : f.values()) {
      const double a = std::abs(v);
      if (a > 0.0) {
        s += std::pow(a, q);
      }
    }
  }
  return std::pow(s * f.grid().cell_volume(), 1.0 / q);
}

double dist_to_positive_axis(cplx z) { return z.real() >= 0.0 ? std::abs(z.imag()) : std::abs(z); }

double ls_quotient(const Certificate &cert, double q) {
  const int d = cert.dimension();
  if (!(q > d / 2.0)) {
    throw std::invalid_argument("ls_quotient needs q > d/2");
  }
  return std::pow(std::abs(cert.z), q - d / 2.0) / qth_power(cert.V, q);
}

double frank_quotient(const Certificate &cert, double q) {
  const int d = cert.dimension();
  if (!(q >= (d + 1) / 2.0)) {
    throw std::invalid_argument("frank_quotient needs q >= (d+1)/2");
  }
  return std::pow(dist_to_positive_axis(cert.z), q - (d + 1) / 2.0) *
         std::sqrt(std::abs(cert.z)) / qth_power(cert.V, q);
}

std::vector<std::vector<double>> default_y_set(const RegionSpec &region, const FourierGrid &grid) {
  const int d = grid.dimension();
  const auto c = region.center_or_origin(d);
  std::vector<std::vector<double>> ys{c};
  constexpr int per_axis = 8;
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) {
    total *= per_axis;
  }
  std::vector<double> y(d);
  for (std::size_t m = 0; m < total; ++m) {
    std::size_t r = m;
    for (int j = d - 1; j >= 0; --j) {
      const int i = static_cast<int>(r % per_axis);
      r /= per_axis;
      const double frac = (i + 0.5) / per_axis - 0.5;
      y[j] = c[j] + 2.0 * frac * region.extent(d, j);
    }
    if (inside_region(region, y, d)) {
      ys.push_back(y);
    }
  }
  return ys;
}

std::vector<std::vector<double>> full_y_set(const RegionSpec &region, const FourierGrid &grid) {
  const int d = grid.dimension();
  std::vector<std::vector<double>> ys;
  std::vector<double> x(d);
  for (std::size_t k = 0; k < grid.point_count(); ++k) {
    grid.position(k, x);
    if (inside_region(region, x, d)) {
      ys.push_back(x);
    }
  }
  return ys;
}

double davies_nath_F(const Field &V, double E, const DnMode &mode,
                     const std::vector<std::vector<double>> &y_set) {
  if (!(E >= 0.0)) {
    throw std::invalid_argument("decay rate E must be nonnegative");
  }
  if (y_set.empty()) {
    throw std::invalid_argument("sup over y needs a nonempty y set");
  }
  if (mode.weight == DecayWeight::polynomial && mode.N < 0) {
    throw std::invalid_argument("polynomial weight needs N >= 0");
  }
  const auto &g = V.grid();
  const int d = g.dimension();
  const double p = (d + 1) / 2.0;
  std::vector<double> xs;
  std::vector<double> ws;
  std::vector<double> x(d);
  for (std::size_t k = 0; k < V.size(); ++k) {
    const double a = std::abs(V[k]);
    if (a == 0.0) {
      continue;
    }
    g.position(k, x);
    xs.insert(xs.end(), x.begin(), x.end());
    ws.push_back(std::pow(a, p));
  }
  double best = 0.0;
  for (const auto &y : y_set) {
    if (static_cast<int>(y.size()) != d) {
      throw std::invalid_argument("y point has the wrong dimension");
    }
    double s = 0.0;
    for (std::size_t m = 0; m < ws.size(); ++m) {
      double r2 = 0.0;
      for (int j = 0; j < d; ++j) {
        const double dx = xs[m * d + j] - y[j];
        r2 += dx * dx;
      }
      const double r = std::sqrt(r2);
      double w = 1.0;
      if (E > 0.0) {
        w = mode.weight == DecayWeight::exponential ? std::exp(-E * r)
                                                    : std::pow(1.0 + E * r, -mode.N);
      }
      s += ws[m] * w;
    }
    best = std::max(best, s);
  }
  return best * g.cell_volume();
}

double dn_quotient(const Certificate &cert, double L) {
  if (!(L >= 1.0)) {
    throw std::invalid_argument("dn_quotient needs L >= 1");
  }
  const double E = L * std::sqrt(cert.z).imag();
  const double F = davies_nath_F(cert.V, E, {}, default_y_set(cert.region, cert.grid()));
  if (!(F > 0.0)) {
    throw std::invalid_argument("F_V vanishes");
  }
  return std::sqrt(std::abs(cert.z)) / F;
}

double fractional_q_threshold(int d, double s) {
  if (s < d) {
    return d / s;
  }
  return 1.0;
}

BoundReport fractional_check(const Certificate &cert, double q, FractionalVariant variant, int N) {
  const double s = cert.symbol.exponent();
  const int d = cert.dimension();
  const double qs = fractional_q_threshold(d, s);
  const bool open = s == static_cast<double>(d);
  if (q < qs || (open && q <= qs)) {
    throw std::invalid_argument("q = " + std::to_string(q) +
                                " lies below the admissible range q >= q_s = " +
                                std::to_string(qs) + (open ? "+" : "") +
                                " (q_s = d/s if s < d, 1+ if s = d, 1 if s > d)");
  }
  const double hd = (d + 1) / 2.0;
  const double az = std::abs(cert.z);
  BoundReport rep;
  rep.parameters = {{"q", q}, {"s", s}, {"d", static_cast<double>(d)}};
  switch (variant) {
  case FractionalVariant::i:
    if (q > hd) {
      throw std::invalid_argument("variant (i) needs q <= (d+1)/2");
    }
    rep.name = "fractional_i";
    rep.lhs = std::pow(az, q - d / s);
    rep.rhs = qth_power(cert.V, q);
    break;
  case FractionalVariant::ii:
    if (!(q > hd)) {
      throw std::invalid_argument("variant (ii) needs q > (d+1)/2");
    }
    rep.name = "fractional_ii";
    rep.lhs = std::pow(dist_to_positive_axis(cert.z), q - hd) * std::pow(az, hd - d / s);
    rep.rhs = qth_power(cert.V, q);
    break;
  case FractionalVariant::iii: {
    if (N < 0) {
      throw std::invalid_argument("variant (iii) needs N >= 0");
    }
    rep.name = "fractional_iii";
    rep.parameters["N"] = N;
    rep.lhs = std::pow(az, hd - d / s);
    DnMode mode{DecayWeight::polynomial, N};
    rep.rhs = davies_nath_F(cert.V, std::abs(cert.z.imag()), mode,
                            default_y_set(cert.region, cert.grid()));
    break;
  }
  }
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : kInfinity;
  return rep;
}

DecayProfile kernel_decay_profile(const DispersionSymbol &symbol, double lambda, double eps,
                                  const ShellCutoff &cutoff, const GridPtr &grid) {
  if (!(eps > 0.0) || !(cutoff.width > 0.0)) {
    throw std::invalid_argument("kernel profile needs eps > 0 and a positive cutoff width");
  }
  const int d = grid->dimension();
  const double w = cutoff.width;
  const auto h = symbol.on_lattice(*grid);
  // the cutoff must avoid xi = 0 and the outer lattice shell
  if (std::abs(h[0] - lambda) < 2.0 * w) {
    throw std::invalid_argument("shell cutoff reaches xi = 0 where the symbol is not smooth; "
                                "need |h0(0) - lambda| >= 2 width");
  }
  std::vector<int> idx(d);
  for (std::size_t k = 0; k < h.size(); ++k) {
    grid->unravel(k, idx);
    bool edge = false;
    for (int j = 0; j < d; ++j) {
      const int half = (grid->sizes()[j] - 1) / 2;
      edge = edge || std::abs(grid->wavenumber(j, idx[j])) == half;
    }
    if (edge && std::abs(h[k] - lambda) < 2.0 * w) {
      throw std::invalid_argument("shell cutoff reaches the edge of the frequency lattice");
    }
  }
  double spacing = 0.0;
  double half_box = kInfinity;
  for (int j = 0; j < d; ++j) {
    spacing = std::max(spacing, grid->spacing(j));
    half_box = std::min(half_box, 0.5 * grid->box_lengths()[j]);
  }
  const double r_lo = 5.0 * spacing;
  const double r_hi = 1.0 / (2.0 * eps);
  if (!(r_lo < r_hi)) {
    throw std::invalid_argument("kernel fit window [5 h, 1/(2 eps)] is empty");
  }
  if (!(2.0 / eps * 1.03 < half_box)) {
    throw std::invalid_argument("box too small to sample the kernel at 2/eps");
  }

  const cplx z(lambda, eps);
  std::vector<double> x0(d);
  for (int j = 0; j < d; ++j) {
    x0[j] = grid->coordinate(j, 0);
  }
  std::vector<cplx> c(h.size());
  std::vector<double> xi(d);
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double eta = bump_eta0((h[k] - lambda) / w);
    if (eta == 0.0) {
      continue;
    }
    grid->wavevector(k, xi);
    double phase = 0.0;
    for (int j = 0; j < d; ++j) {
      phase += xi[j] * x0[j];
    }
    c[k] = eta / (h[k] - z) * std::polar(1.0, phase);
  }
  Field kernel = inverse_transform(grid, std::move(c));
  const double scale =
      std::sqrt(static_cast<double>(grid->point_count())) / grid->volume();

  constexpr int fit_bins = 24;
  const double ratio = std::pow(r_hi / r_lo, 1.0 / fit_bins);
  const int total_bins =
      static_cast<int>(std::floor(std::log(half_box / r_lo) / std::log(ratio)));
  std::vector<double> env(std::max(total_bins, fit_bins), 0.0);
  std::vector<char> hit(env.size(), 0);
  double near_lo = 0.0;
  double far = 0.0;
  std::vector<double> x(d);
  for (std::size_t k = 0; k < kernel.size(); ++k) {
    grid->position(k, x);
    double r2 = 0.0;
    for (int j = 0; j < d; ++j) {
      r2 += x[j] * x[j];
    }
    const double r = std::sqrt(r2);
    const double a = std::abs(kernel[k]) * scale;
    if (r >= 0.97 * r_hi && r < 1.03 * r_hi) {
      near_lo = std::max(near_lo, a);
    }
    if (r >= 0.97 * (2.0 / eps) && r < 1.03 * (2.0 / eps)) {
      far = std::max(far, a);
    }
    if (r < r_lo) {
      continue;
    }
    const int b = static_cast<int>(std::floor(std::log(r / r_lo) / std::log(ratio)));
    if (b < 0 || b >= static_cast<int>(env.size())) {
      continue;
    }
    env[b] = std::max(env[b], a);
    hit[b] = 1;
  }

  DecayProfile prof;
  prof.r_min = r_lo;
  prof.r_max = r_hi;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t b = 0; b < env.size(); ++b) {
    if (!hit[b] || !(env[b] > 0.0)) {
      continue;
    }
    const double rc = r_lo * std::pow(ratio, b + 0.5);
    prof.radii.push_back(rc);
    prof.envelope.push_back(env[b]);
    if (static_cast<int>(b) < fit_bins) {
      pts.emplace_back(rc, env[b]);
    }
  }
  if (pts.size() < 2) {
    throw std::invalid_argument("kernel fit window holds fewer than 2 populated shells");
  }
  const auto fit = fit_power_law(pts);
  prof.fitted_exponent = fit.slope;
  prof.intercept = fit.intercept;
  prof.r_squared = fit.r_squared;
  prof.suppression_ratio = near_lo > 0.0 ? far / near_lo : kInfinity;
  return prof;
}

} // namespace bsforge
