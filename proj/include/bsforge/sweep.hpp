#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bsforge/bounds.hpp"
#include "bsforge/grid_policy.hpp"

namespace bsforge {

enum class MRule { fixed, log_rule };
enum class C0Rule { inverse_M, fixed };

struct SweepConfig {
  int dimension = 2;
  std::string symbol = "laplacian"; // laplacian | fractional
  double s = 2.0;                   // exponent for fractional
  double lambda = 1.0;
  std::vector<double> eps{0.2, 0.1, 0.05};
  MRule m_rule = MRule::fixed;
  double M = 1.0;
  C0Rule c0_rule = C0Rule::inverse_M;
  double c0 = 1.0;
  std::vector<double> q{1.5, 2.0, 2.5};
  std::vector<double> L{1.0, 2.0, 4.0, 8.0};
  std::vector<int> fractional_N{4};
  GridPolicy grid;
  double power_tol = 1e-10;
  int max_iter = 5000;
  double tau = kDefaultNodalThreshold;
  double cert_tol = 1e-3;
  bool full_y_set = false;
  bool record_timing = true;
  std::string out_dir = ".";
  std::string csv = "sweep.csv";

  DispersionSymbol make_symbol() const;
  double M_for(double eps) const;
  double c0_for(double eps) const;
  /// Throws std::invalid_argument describing the first violated invariant.
  void validate() const;
};

/// Flat YAML mapping; unknown keys are errors.
SweepConfig load_config(const std::string &path);
SweepConfig parse_config(const std::string &text);

/// One forged certificate with its ingredients.
struct ForgeRun {
  GridPtr grid;
  RegionSpec region;
  EigenPair eigenpair;
  Certificate certificate;
  BsCorrespondence bs;
};

ForgeRun forge_for_eps(const SweepConfig &config, double eps);

struct SweepRow {
  double eps = 0.0;
  double M = 0.0;
  double c0 = 0.0;
  double mu = 0.0;
  double eps_mu = 0.0;
  double residual = 0.0;
  double nodal_fraction = 0.0;
  double eigen_residual = 0.0;
  double bs_residual = 0.0;
  int iterations = 0;
  std::map<double, double> norm_q;
  std::map<double, double> ls_quotient;
  std::map<double, double> frank_quotient;
  std::map<double, double> dn_quotient;
  std::map<double, double> fractional_ii;
  std::map<int, double> fractional_iii;
  double wall_ms = 0.0;
  bool certified = false;
  std::string status; // "ok" or the failure reason
};

SweepRow evaluate_row(const SweepConfig &config, const ForgeRun &run);

std::vector<SweepRow> run_sweep(const SweepConfig &config);

std::vector<std::string> csv_header(const SweepConfig &config);
std::vector<std::string> csv_fields(const SweepConfig &config, const SweepRow &row);
std::string sweep_csv(const SweepConfig &config, const std::vector<SweepRow> &rows);

/// Shortest decimal spelling used in column names (2 -> "2", 2.5 -> "2.5").
std::string label(double v);
/// 12 significant digits, scientific.
std::string number(double v);

} // namespace bsforge
