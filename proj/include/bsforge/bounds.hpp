#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "bsforge/forge.hpp"

namespace bsforge {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// (cell_volume * sum |f|^q)^{1/q}; q = infinity gives max |f|.
double lq_norm(const Field &f, double q);

/// dist(z, [0, inf)): |Im z| when Re z >= 0, else |z|.
double dist_to_positive_axis(cplx z);

/// |z|^{q - d/2} / |V|_q^q.
double ls_quotient(const Certificate &cert, double q);

/// dist(z, R+)^{q - (d+1)/2} |z|^{1/2} / |V|_q^q.
double frank_quotient(const Certificate &cert, double q);

enum class DecayWeight { exponential, polynomial };

struct DnMode {
  DecayWeight weight = DecayWeight::exponential;
  int N = 0; // polynomial order
};

/// Region center plus the centers of an 8^d sublattice of the region's bounding box that
/// fall inside the region.
std::vector<std::vector<double>> default_y_set(const RegionSpec &region, const FourierGrid &grid);
/// Every grid point inside the region.
std::vector<std::vector<double>> full_y_set(const RegionSpec &region, const FourierGrid &grid);

/// sup_y cell * sum |V|^{(d+1)/2} w(|x - y|), w = exp(-E r) or (1 + E r)^{-N}.
double davies_nath_F(const Field &V, double E, const DnMode &mode,
                     const std::vector<std::vector<double>> &y_set);

/// |z|^{1/2} / F_V(L Im sqrt z).
double dn_quotient(const Certificate &cert, double L);

struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::map<std::string, double> parameters;
};

enum class FractionalVariant { i, ii, iii };

/// Lower end of the admissible q range for |xi|^s in dimension d (open when s == d).
double fractional_q_threshold(int d, double s);

/// Both sides of the three fractional estimates with constants set to 1.
BoundReport fractional_check(const Certificate &cert, double q, FractionalVariant variant,
                             int N = 4);

struct DecayProfile {
  std::vector<double> radii;
  std::vector<double> envelope;
  double fitted_exponent = 0.0;
  double intercept = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  double r_squared = 0.0;
  double suppression_ratio = 0.0; // envelope(2/eps) / envelope(1/(2 eps))
};

/// Frequency cutoff eta(xi) = eta0((h0(xi) - lambda) / width).
struct ShellCutoff {
  double width = 0.45;
};

DecayProfile kernel_decay_profile(const DispersionSymbol &symbol, double lambda, double eps,
                                  const ShellCutoff &cutoff, const GridPtr &grid);

} // namespace bsforge
