// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bsforge/bounds.hpp"
#include "bsforge/fit.hpp"
#include "bsforge/grid_policy.hpp"
#include "bsforge/sweep.hpp"

using namespace bsforge;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string f6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

Field random_field(const GridPtr &g, std::mt19937_64 &rng, bool real) {
  std::normal_distribution<double> n(0.0, 1.0);
  Field f(g);
  for (auto &v : f.values()) {
    v = real ? cplx(n(rng), 0.0) : cplx(n(rng), n(rng));
  }
  return f;
}

struct Context {
  SweepConfig config;
  std::vector<ForgeRun> runs;
  std::vector<SweepRow> rows;
};

Outcome c1_certification(const Context &ctx) {
  Outcome o{true, ""};
  for (const auto &run : ctx.runs) {
    const auto &c = run.certificate;
    const auto rep = verify_certificate(c, 1e-3);
    o.pass = o.pass && rep.residual <= 1e-3 && rep.pointwise_bound && rep.support;
    o.detail += "eps=" + f6(c.eps) + " residual=" + f6(rep.residual) +
                (rep.pointwise_bound ? " |V|<=1/mu" : " |V|>1/mu") +
                (rep.support ? " supp-ok; " : " supp-bad; ");
  }
  return o;
}

Outcome c2_floor(const Context &ctx) {
  Outcome o{true, ""};
  for (const auto &run : ctx.runs) {
    const double em = run.certificate.eps * run.certificate.mu;
    o.pass = o.pass && em >= 0.25;
    o.detail += "eps=" + f6(run.certificate.eps) + " eps*mu=" + f6(em) + "; ";
  }
  return o;
}

Outcome c3_knapp(const Context &ctx) {
  Outcome o{true, ""};
  const double eps = 0.05;
  const auto sym = DispersionSymbol::laplacian();
  std::vector<double> vals;
  for (double M : {2.0, 4.0, 8.0, 16.0}) {
    const auto region = tube_region(eps, M, sym, 1.0);
    const auto grid = grid_for_region(region, sym, 1.0, 2, {8.0, 1.0, 1.0});
    vals.push_back(knapp_lower_bound(eps, M, 1.0 / M, grid, sym, 1.0));
    o.detail += "M=" + f6(M) + ":" + f6(vals.back()) + " ";
  }
  bool mono = true;
  for (std::size_t i = 1; i < vals.size(); ++i) {
    mono = mono && vals[i] >= vals[i - 1];
  }
  const bool at8 = vals[2] >= 0.9;
  bool bounded = std::all_of(vals.begin(), vals.end(), [](double v) { return v > 0 && v <= 1; });
  for (const auto &run : ctx.runs) {
    bounded = bounded && run.certificate.eps * run.certificate.mu <= 1.0;
  }
  o.pass = mono && at8 && bounded;
  o.detail += std::string("| nondecreasing=") + (mono ? "yes" : "no") +
              " >=0.9@M=8=" + (at8 ? "yes" : "no") + " eps*mu<=1=" + (bounded ? "yes" : "no");
  return o;
}

Outcome c4_blowup(const Context &ctx) {
  const double q = 2.5;
  std::vector<std::pair<double, double>> eq;
  std::vector<std::pair<double, double>> pts;
  for (const auto &run : ctx.runs) {
    eq.emplace_back(run.certificate.eps, ls_quotient(run.certificate, q));
    pts.emplace_back(run.certificate.eps, lq_norm(run.certificate.V, q));
  }
  std::sort(eq.begin(), eq.end(), [](auto a, auto b) { return a.first > b.first; });
  bool inc = true;
  for (std::size_t i = 1; i < eq.size(); ++i) {
    inc = inc && eq[i].second > eq[i - 1].second;
  }
  const double target = 1.0 - 3.0 / (2.0 * q);
  const auto fit = fit_power_law(pts);
  const bool slope_ok = std::abs(fit.slope - target) <= 0.2 * std::abs(target);
  Outcome o{inc && slope_ok, ""};
  for (const auto &[e, v] : eq) {
    o.detail += "ls(" + f6(e) + ")=" + f6(v) + " ";
  }
  o.detail += "| slope=" + f6(fit.slope) + " target=" + f6(target) + " +-20%";
  return o;
}

Outcome c5_saturation(const Context &ctx) {
  std::vector<double> v;
  for (const auto &run : ctx.runs) {
    v.push_back(frank_quotient(run.certificate, 2.0));
  }
  const double mn = *std::min_element(v.begin(), v.end());
  const double mx = *std::max_element(v.begin(), v.end());
  Outcome o{mn >= 0.1 && mx / mn <= 5.0, ""};
  for (double x : v) {
    o.detail += f6(x) + " ";
  }
  o.detail += "| min=" + f6(mn) + " max/min=" + f6(mx / mn);
  return o;
}

Outcome c6_dn(const Context &ctx) {
  Outcome o{true, ""};
  double min_ratio = kInfinity;
  for (const auto &run : ctx.runs) {
    const auto &c = run.certificate;
    const auto ys = default_y_set(c.region, c.grid());
    std::vector<std::pair<double, double>> pts;
    for (double L : {1.0, 2.0, 4.0, 8.0}) {
      pts.emplace_back(L, davies_nath_F(c.V, L * std::sqrt(c.z).imag(), {}, ys));
      min_ratio = std::min(min_ratio, dn_quotient(c, L) / L);
    }
    const auto fit = fit_power_law(pts);
    o.pass = o.pass && std::abs(fit.slope + 1.0) <= 0.2;
    o.detail += "eps=" + f6(c.eps) + " slope=" + f6(fit.slope) + "; ";
  }
  o.pass = o.pass && min_ratio > 0.0;
  o.detail += "min dn/L=" + f6(min_ratio);
  return o;
}

Outcome c7_isospectral() {
  const double eps = 0.1;
  const auto sym = DispersionSymbol::laplacian();
  Outcome o{true, ""};
  std::vector<double> diffs;
  // refinement of the frequency lattice: 1.5x points per axis by enlarging the box
  for (double scale : {1.0, 1.5}) {
    GridPolicy pol;
    pol.margin *= scale;
    const auto region = tube_region(eps, 1.0, sym, 1.0);
    const auto grid = grid_for_region(region, sym, 1.0, 2, pol);
    const BirmanSchwingerOperator K(region_indicator(region, grid), sym, 1.0, eps);
    const auto ep = top_eigenpair(K, default_seed(region, sym, 1.0, grid));
    const RescaledTubeOperator Kp(eps, rescaled_grid(*grid, eps));
    PowerOptions opt;
    opt.tol = 1e-7;
    opt.max_iter = 20000;
    const auto epp = Kp.top_eigenpair(Kp.knapp_init(1.0), opt);
    const double d = rel(eps * ep.mu, epp.mu);
    diffs.push_back(d);
    o.pass = o.pass && ep.converged && epp.converged;
    o.detail += "scale=" + f6(scale) + " eps*mu=" + f6(eps * ep.mu) + " mu'=" + f6(epp.mu) +
                " rel=" + f6(d) + " (iters " + std::to_string(epp.iterations) + "); ";
  }
  o.pass = o.pass && diffs[0] <= 0.02 && diffs[1] <= diffs[0];
  return o;
}

Outcome c8_bs(const Context &ctx) {
  Outcome o{true, ""};
  for (const auto &run : ctx.runs) {
    const double r = run.eigenpair.residual;
    o.pass = o.pass && run.bs.kernel_residual <= 10.0 * r && run.bs.inverse_residual <= 10.0 * r;
    o.detail += "eps=" + f6(run.certificate.eps) + " kernel=" + f6(run.bs.kernel_residual) +
                " inverse=" + f6(run.bs.inverse_residual) + " power=" + f6(r) + "; ";
  }
  return o;
}

Outcome c9_kernel() {
  const double eps = 0.02;
  const auto grid = kernel_grid(eps, 2);
  const auto prof = kernel_decay_profile(DispersionSymbol::laplacian(), 1.0, eps, {}, grid);
  const bool e_ok = std::abs(prof.fitted_exponent + 0.5) <= 0.15;
  const bool s_ok = prof.suppression_ratio <= 0.2;
  return {e_ok && s_ok, "exponent=" + f6(prof.fitted_exponent) + " r2=" + f6(prof.r_squared) +
                            " suppression=" + f6(prof.suppression_ratio)};
}

Outcome c10_fractional() {
  SweepConfig cfg;
  cfg.symbol = "fractional";
  cfg.s = 1.0;
  cfg.q = {2.0};
  std::vector<double> r2;
  std::vector<double> r3;
  Outcome o{true, ""};
  for (double eps : cfg.eps) {
    const auto run = forge_for_eps(cfg, eps);
    o.pass = o.pass && verify_certificate(run.certificate, cfg.cert_tol).passed;
    r2.push_back(fractional_check(run.certificate, 2.0, FractionalVariant::ii).ratio);
    r3.push_back(fractional_check(run.certificate, 2.0, FractionalVariant::iii, 4).ratio);
    o.detail += "eps=" + f6(eps) + " (ii)=" + f6(r2.back()) + " (iii)=" + f6(r3.back()) + "; ";
  }
  const double spread = *std::max_element(r2.begin(), r2.end()) / *std::min_element(r2.begin(), r2.end());
  const double min3 = *std::min_element(r3.begin(), r3.end());
  o.pass = o.pass && spread <= 10.0 && min3 > 0.0;
  o.detail += "spread(ii)=" + f6(spread) + " min(iii)=" + f6(min3);
  return o;
}

Outcome c11_hygiene(const Context &ctx) {
  Outcome o{true, ""};
  std::mt19937_64 rng(20240611);
  const auto sym = DispersionSymbol::laplacian();
  const auto grid = build_grid(2, {40.0, 24.0}, {81, 49});
  // Parseval
  {
    const Field f = random_field(grid, rng, false);
    const auto c = forward_transform(f);
    double s = 0.0;
    for (const auto &v : c) {
      s += std::norm(v);
    }
    const double p = rel(field_inner(f, f).real(), s * grid->cell_volume());
    o.pass = o.pass && p <= 1e-12;
    o.detail += "parseval=" + f6(p);
  }
  // resolvent identity
  {
    const cplx z(1.0, 0.1);
    const Field f = random_field(grid, rng, false);
    const Field g = apply_multiplier(resolvent_multiplier(sym, z, grid), f);
    const Field back =
        apply_multiplier(symbol_function(sym, grid, [z](double h) { return h - z; }), g);
    const double r = (back - f).norm() / f.norm();
    o.pass = o.pass && r <= 1e-12;
    o.detail += " resolvent=" + f6(r);
  }
  // self-adjointness and positivity of K
  {
    RegionSpec region;
    region.eps = 0.25;
    const BirmanSchwingerOperator K(region_indicator(region, grid), sym, 1.0, 0.25);
    const Field f = random_field(grid, rng, true);
    const Field g = random_field(grid, rng, true);
    const Field Kf = K.apply(f);
    const Field Kg = K.apply(g);
    const double sa = std::abs(field_inner(f, Kg) - field_inner(Kf, g)) / (Kf.norm() * g.norm());
    const bool pos = field_inner(f, Kf).real() >= 0.0;
    o.pass = o.pass && sa <= 1e-12 && pos;
    o.detail += " self-adjoint=" + f6(sa) + (pos ? " positive" : " NOT positive");
  }
  // determinism
  {
    SweepConfig c = ctx.config;
    c.record_timing = false;
    const auto a = sweep_csv(c, run_sweep(c));
    const auto b = sweep_csv(c, run_sweep(c));
    o.pass = o.pass && a == b;
    o.detail += a == b ? " determinism=identical" : " determinism=DIFFERENT";
  }
  // box doubling
  {
    SweepConfig c = ctx.config;
    c.grid.margin *= 2.0;
    double worst = 0.0;
    bool certified = true;
    for (std::size_t i = 0; i < ctx.rows.size(); ++i) {
      const auto &r0 = ctx.rows[i];
      const auto r1 = evaluate_row(c, forge_for_eps(c, r0.eps));
      certified = certified && r0.certified && r1.certified;
      const auto cmp = [&worst](double a, double b) { worst = std::max(worst, rel(a, b)); };
      cmp(r0.mu, r1.mu);
      cmp(r0.nodal_fraction + 1.0, r1.nodal_fraction + 1.0);
      for (const auto &[k, v] : r0.norm_q) {
        cmp(v, r1.norm_q.at(k));
      }
      for (const auto &[k, v] : r0.ls_quotient) {
        cmp(v, r1.ls_quotient.at(k));
      }
      for (const auto &[k, v] : r0.frank_quotient) {
        cmp(v, r1.frank_quotient.at(k));
      }
      for (const auto &[k, v] : r0.dn_quotient) {
        cmp(v, r1.dn_quotient.at(k));
      }
    }
    o.pass = o.pass && worst < 0.01 && certified;
    o.detail += " box-doubling max change=" + f6(worst) +
                (certified ? " (both certify)" : " (certification lost)");
  }
  return o;
}

} // namespace

int main() {
  Context ctx;
  const auto t0 = std::chrono::steady_clock::now();
  for (double eps : ctx.config.eps) {
    ctx.runs.push_back(forge_for_eps(ctx.config, eps));
    ctx.rows.push_back(evaluate_row(ctx.config, ctx.runs.back()));
  }
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 certification", [&] { return c1_certification(ctx); }},
      {"2 lower bound floor", [&] { return c2_floor(ctx); }},
      {"3 Knapp optimality", [&] { return c3_knapp(ctx); }},
      {"4 blow-up of the q=2.5 quotient", [&] { return c4_blowup(ctx); }},
      {"5 saturation of the q=2 quotient", [&] { return c5_saturation(ctx); }},
      {"6 exponentially weighted quotient", [&] { return c6_dn(ctx); }},
      {"7 isospectrality", [] { return c7_isospectral(); }},
      {"8 Birman-Schwinger correspondence", [&] { return c8_bs(ctx); }},
      {"9 kernel decay", [] { return c9_kernel(); }},
      {"10 fractional sharpness", [] { return c10_fractional(); }},
      {"11 numerical hygiene", [&] { return c11_hygiene(ctx); }},
  };
  int failed = 0;
  for (const auto &[name, fn] : criteria) {
    Outcome o;
    const auto s = std::chrono::steady_clock::now();
    try {
      o = fn();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - s).count();
    std::printf("%s criterion %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(),
                o.detail.c_str(), sec);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d of %zu criteria passed (%.1fs)\n", static_cast<int>(criteria.size()) - failed,
              criteria.size(), total);
  return failed == 0 ? 0 : 1;
}
