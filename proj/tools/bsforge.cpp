#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bsforge/io.hpp"
#include "bsforge/sweep.hpp"

using namespace bsforge;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::vector<double> eps;
  std::vector<double> q;
  std::vector<double> L;
  double grid_scale = 0.0;
  double tol = 0.0;
};

void add_common(CLI::App *app, Common &c) {
  app->add_option("--config", c.config, "YAML sweep configuration")->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output directory");
  app->add_option("--eps", c.eps, "imaginary parts of the target eigenvalue");
  app->add_option("--q", c.q, "Lebesgue exponents");
  app->add_option("--L", c.L, "decay parameters for the weighted quotient");
  app->add_option("--grid-scale", c.grid_scale, "grid refinement factor")->check(CLI::PositiveNumber);
  app->add_option("--tol", c.tol, "certificate residual tolerance")->check(CLI::PositiveNumber);
}

SweepConfig resolve(const Common &c, SweepConfig cfg) {
  if (!c.config.empty()) {
    cfg = load_config(c.config);
  }
  if (!c.out.empty()) {
    cfg.out_dir = c.out;
  }
  if (!c.eps.empty()) {
    cfg.eps = c.eps;
  }
  if (!c.q.empty()) {
    cfg.q = c.q;
  }
  if (!c.L.empty()) {
    cfg.L = c.L;
  }
  if (c.grid_scale > 0.0) {
    cfg.grid.grid_scale = c.grid_scale;
  }
  if (c.tol > 0.0) {
    cfg.cert_tol = c.tol;
  }
  cfg.validate();
  return cfg;
}

std::string out_path(const SweepConfig &cfg, const std::string &name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

int cmd_forge(const Common &c) {
  const auto cfg = resolve(c, {});
  bool ok = true;
  for (double eps : cfg.eps) {
    const auto run = forge_for_eps(cfg, eps);
    const auto rep = verify_certificate(run.certificate, cfg.cert_tol, cfg.q);
    const std::string stem = "certificate_eps" + label(eps);
    save_certificate(run.certificate, out_path(cfg, stem + ".bsfc"));
    write_atomic(out_path(cfg, stem + ".json"), report_json(rep) + "\n");
    std::printf("eps=%g mu=%.10g eps*mu=%.6f residual=%.3e iterations=%d %s\n", eps,
                run.certificate.mu, eps * run.certificate.mu, rep.residual,
                run.certificate.iterations, rep.passed ? "certified" : "NOT certified");
    for (const auto &f : rep.failures) {
      std::printf("  %s\n", f.c_str());
    }
    ok = ok && rep.passed;
  }
  return ok ? 0 : 1;
}

int cmd_verify(const std::string &path, double tol) {
  const auto cert = load_certificate(path);
  const auto rep = verify_certificate(cert, tol > 0.0 ? tol : 1e-3);
  std::cout << report_json(rep) << "\n";
  return rep.passed ? 0 : 1;
}

int cmd_sweep(const Common &c, SweepConfig base) {
  const auto cfg = resolve(c, std::move(base));
  const auto rows = run_sweep(cfg);
  const auto path = out_path(cfg, cfg.csv);
  write_atomic(path, sweep_csv(cfg, rows));
  bool ok = true;
  for (const auto &r : rows) {
    std::printf("eps=%g eps*mu=%.6f residual=%.3e %s\n", r.eps, r.eps_mu, r.residual,
                r.status.c_str());
    ok = ok && r.certified;
  }
  std::printf("wrote %s\n", path.c_str());
  return ok ? 0 : 1;
}

int cmd_knapp(const Common &c, const std::vector<double> &Ms) {
  auto cfg = resolve(c, {});
  const auto sym = cfg.make_symbol();
  const double eps = c.eps.empty() ? 0.05 : c.eps.front();
  std::string csv = "eps,M,c0,lower_bound\n";
  bool ok = true;
  for (double M : Ms) {
    const auto region = tube_region(eps, M, sym, cfg.lambda);
    const auto grid = grid_for_region(region, sym, cfg.lambda, cfg.dimension, cfg.grid);
    const double v = knapp_lower_bound(eps, M, 1.0 / M, grid, sym, cfg.lambda);
    ok = ok && v > 0.0 && v <= 1.0;
    std::printf("eps=%g M=%g c0=%g lower_bound=%.6f\n", eps, M, 1.0 / M, v);
    csv += number(eps) + "," + number(M) + "," + number(1.0 / M) + "," + number(v) + "\n";
  }
  write_atomic(out_path(cfg, "knapp.csv"), csv);
  return ok ? 0 : 1;
}

int cmd_kernel(const Common &c, double width) {
  auto cfg = resolve(c, {});
  const double eps = c.eps.empty() ? 0.02 : c.eps.front();
  const auto grid = kernel_grid(eps, cfg.dimension);
  const auto prof =
      kernel_decay_profile(cfg.make_symbol(), cfg.lambda, eps, ShellCutoff{width}, grid);
  write_atomic(out_path(cfg, "kernel_profile.json"), report_json(prof) + "\n");
  std::printf("eps=%g exponent=%.4f r2=%.4f suppression=%.4f\n", eps, prof.fitted_exponent,
              prof.r_squared, prof.suppression_ratio);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Forge complex potentials with a prescribed eigenvalue and evaluate bounds"};
  app.require_subcommand(1);

  Common forge_opts;
  add_common(app.add_subcommand("forge", "forge and certify one potential per eps"), forge_opts);

  std::string verify_path;
  double verify_tol = 0.0;
  auto *verify = app.add_subcommand("verify", "reload a certificate and re-certify it");
  verify->add_option("path", verify_path, "certificate file")->required()->check(CLI::ExistingFile);
  verify->add_option("--tol", verify_tol, "residual tolerance");

  Common sweep_opts;
  add_common(app.add_subcommand("sweep", "sweep eps and tabulate the quotients"), sweep_opts);

  Common knapp_opts;
  std::vector<double> Ms{2, 4, 8, 16};
  auto *knapp = app.add_subcommand("knapp", "Knapp lower bound for eps*|K| over M");
  add_common(knapp, knapp_opts);
  knapp->add_option("--M", Ms, "tube enlargements");

  Common kernel_opts;
  double width = 0.45;
  auto *kernel = app.add_subcommand("kernel", "radial decay profile of the cut-off kernel");
  add_common(kernel, kernel_opts);
  kernel->add_option("--width", width, "shell cutoff width")->check(CLI::PositiveNumber);

  Common frac_opts;
  double s = 1.0;
  auto *frac = app.add_subcommand("fractional", "sweep for the symbol |xi|^s");
  add_common(frac, frac_opts);
  frac->add_option("--s", s, "symbol exponent")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("forge")) {
      return cmd_forge(forge_opts);
    }
    if (app.got_subcommand("verify")) {
      return cmd_verify(verify_path, verify_tol);
    }
    if (app.got_subcommand("sweep")) {
      return cmd_sweep(sweep_opts, {});
    }
    if (app.got_subcommand("knapp")) {
      return cmd_knapp(knapp_opts, Ms);
    }
    if (app.got_subcommand("kernel")) {
      return cmd_kernel(kernel_opts, width);
    }
    SweepConfig base;
    base.symbol = "fractional";
    base.s = s;
    base.q = {2.0};
    base.csv = "fractional.csv";
    if (!frac_opts.config.empty()) {
      base = load_config(frac_opts.config);
      frac_opts.config.clear();
    }
    return cmd_sweep(frac_opts, base);
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
