#include "bsforge/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bsforge {

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

ForgeRun forge_for_eps(const SweepConfig &config, double eps) {
  const auto symbol = config.make_symbol();
  ForgeRun run;
  run.region = tube_region(eps, config.M_for(eps), symbol, config.lambda);
  run.grid = grid_for_region(run.region, symbol, config.lambda, config.dimension, config.grid);
  const Field seed = default_seed(run.region, symbol, config.lambda, run.grid);
  const BirmanSchwingerOperator K(region_indicator(run.region, run.grid), symbol, config.lambda,
                                  eps);
  PowerOptions opt;
  opt.tol = config.power_tol;
  opt.max_iter = config.max_iter;
  run.eigenpair = top_eigenpair(K, seed, opt);
  if (!run.eigenpair.converged) {
    throw std::runtime_error("power iteration did not converge in " +
                             std::to_string(config.max_iter) + " iterations (residual " +
                             number(run.eigenpair.residual) + ")");
  }
  auto qs = default_q_list(config.dimension);
  qs.insert(qs.end(), config.q.begin(), config.q.end());
  run.certificate =
      forge_potential(symbol, config.lambda, eps, run.region, run.eigenpair, config.tau, qs);
  run.bs = verify_bs_correspondence(run.eigenpair, symbol, config.lambda, eps, run.region);
  return run;
}

SweepRow evaluate_row(const SweepConfig &config, const ForgeRun &run) {
  const auto &cert = run.certificate;
  const int d = config.dimension;
  SweepRow row;
  row.eps = cert.eps;
  row.M = run.region.M;
  row.c0 = config.c0_for(cert.eps);
  row.mu = cert.mu;
  row.eps_mu = cert.eps * cert.mu;
  row.residual = cert.residual;
  row.nodal_fraction = cert.nodal_fraction;
  row.eigen_residual = cert.eigen_residual;
  row.bs_residual = run.bs.kernel_residual;
  row.iterations = cert.iterations;
  for (double q : config.q) {
    row.norm_q[q] = lq_norm(cert.V, q);
    row.ls_quotient[q] = ls_quotient(cert, q);
    if (q >= (d + 1) / 2.0) {
      row.frank_quotient[q] = frank_quotient(cert, q);
    }
  }
  const auto ys = config.full_y_set ? full_y_set(cert.region, cert.grid())
                                    : default_y_set(cert.region, cert.grid());
  const double im_sqrt = std::sqrt(cert.z).imag();
  for (double L : config.L) {
    const double F = davies_nath_F(cert.V, L * im_sqrt, {}, ys);
    row.dn_quotient[L] = std::sqrt(std::abs(cert.z)) / F;
  }
  if (config.symbol == "fractional") {
    const double qs = fractional_q_threshold(d, config.s);
    for (double q : config.q) {
      if (q > (d + 1) / 2.0 && q >= qs && !(config.s == d && q <= qs)) {
        row.fractional_ii[q] = fractional_check(cert, q, FractionalVariant::ii).ratio;
      }
    }
    for (int N : config.fractional_N) {
      row.fractional_iii[N] =
          fractional_check(cert, std::max(config.q.front(), qs + 1e-9), FractionalVariant::iii, N)
              .ratio;
    }
  }
  const auto rep = verify_certificate(cert, config.cert_tol);
  row.certified = rep.passed;
  if (rep.passed) {
    row.status = "ok";
  } else {
    std::string s;
    for (const auto &f : rep.failures) {
      s += (s.empty() ? "" : "; ") + f;
    }
    row.status = s;
  }
  return row;
}

std::vector<SweepRow> run_sweep(const SweepConfig &config) {
  config.validate();
  std::vector<SweepRow> rows;
  for (double eps : config.eps) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepRow row;
    try {
      row = evaluate_row(config, forge_for_eps(config, eps));
    } catch (const std::exception &e) {
      row = SweepRow{};
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.eps = eps;
      row.M = config.M_for(eps);
      row.c0 = config.c0_for(eps);
      row.mu = row.eps_mu = row.residual = row.nodal_fraction = nan;
      row.eigen_residual = row.bs_residual = nan;
      row.certified = false;
      row.status = std::string("failed: ") + e.what();
    }
    const auto t1 = std::chrono::steady_clock::now();
    row.wall_ms = config.record_timing
                      ? std::chrono::duration<double, std::milli>(t1 - t0).count()
                      : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

bool fractional_ii_column(const SweepConfig &c, double q) {
  const int d = c.dimension;
  const double qs = fractional_q_threshold(d, c.s);
  return q > (d + 1) / 2.0 && q >= qs && !(c.s == d && q <= qs);
}

double lookup(const std::map<double, double> &m, double k) {
  const auto it = m.find(k);
  return it == m.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
}

std::string clean(std::string s) {
  for (auto &ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') {
      ch = ch == ',' ? ';' : ' ';
    }
  }
  return s;
}

} // namespace

std::vector<std::string> csv_header(const SweepConfig &c) {
  std::vector<std::string> h{"epsilon", "M", "c0", "mu", "eps_mu", "residual", "nodal_fraction"};
  for (double q : c.q) {
    h.push_back("norm_q_" + label(q));
  }
  for (double q : c.q) {
    h.push_back("ls_quotient_" + label(q));
  }
  for (double q : c.q) {
    if (q >= (c.dimension + 1) / 2.0) {
      h.push_back("frank_quotient_" + label(q));
    }
  }
  for (double L : c.L) {
    h.push_back("dn_quotient_L" + label(L));
  }
  if (c.symbol == "fractional") {
    for (double q : c.q) {
      if (fractional_ii_column(c, q)) {
        h.push_back("fractional_ii_" + label(q));
      }
    }
    for (int N : c.fractional_N) {
      h.push_back("fractional_iii_N" + std::to_string(N));
    }
  }
  h.insert(h.end(), {"eigen_residual", "bs_residual", "iterations", "wall_ms", "status"});
  return h;
}

std::vector<std::string> csv_fields(const SweepConfig &c, const SweepRow &r) {
  std::vector<std::string> f{number(r.eps),      number(r.M),        number(r.c0),
                             number(r.mu),       number(r.eps_mu),   number(r.residual),
                             number(r.nodal_fraction)};
  for (double q : c.q) {
    f.push_back(number(lookup(r.norm_q, q)));
  }
  for (double q : c.q) {
    f.push_back(number(lookup(r.ls_quotient, q)));
  }
  for (double q : c.q) {
    if (q >= (c.dimension + 1) / 2.0) {
      f.push_back(number(lookup(r.frank_quotient, q)));
    }
  }
  for (double L : c.L) {
    f.push_back(number(lookup(r.dn_quotient, L)));
  }
  if (c.symbol == "fractional") {
    for (double q : c.q) {
      if (fractional_ii_column(c, q)) {
        f.push_back(number(lookup(r.fractional_ii, q)));
      }
    }
    for (int N : c.fractional_N) {
      const auto it = r.fractional_iii.find(N);
      f.push_back(number(it == r.fractional_iii.end() ? std::numeric_limits<double>::quiet_NaN()
                                                      : it->second));
    }
  }
  f.push_back(number(r.eigen_residual));
  f.push_back(number(r.bs_residual));
  f.push_back(std::to_string(r.iterations));
  f.push_back(number(r.wall_ms));
  f.push_back(clean(r.status));
  return f;
}

std::string sweep_csv(const SweepConfig &config, const std::vector<SweepRow> &rows) {
  std::ostringstream os;
  const auto join = [&os](const std::vector<std::string> &v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      os << (i ? "," : "") << v[i];
    }
    os << '\n';
  };
  join(csv_header(config));
  for (const auto &r : rows) {
    join(csv_fields(config, r));
  }
  return os.str();
}

} // namespace bsforge
