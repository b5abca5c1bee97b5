#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bsforge/spectral_core.hpp"

namespace bsforge {

enum class RegionShape { tube, ball };

/// Indicator geometry. The tube is {|t| < M/eps * a, |x_perp| < (M/eps)^{1/2} * b} where t is
/// the coordinate along `axis` measured from `center`, and (a, b) = (axial_scale,
/// transverse_scale). The ball has radius M/eps * a.
struct RegionSpec {
  RegionShape shape = RegionShape::tube;
  double eps = 0.1;
  double M = 1.0;
  std::vector<double> center; // empty means the origin
  std::vector<double> axis;   // empty means e_1
  double axial_scale = 1.0;
  double transverse_scale = 1.0;

  double axial_half() const;
  double transverse_half() const;
  double ball_radius() const;
  /// Continuum measure of the region in dimension d.
  double measure(int d) const;
  /// Half extent of the region along grid axis j (bounding box).
  double extent(int d, int j) const;

  std::vector<double> center_or_origin(int d) const;
  std::vector<double> axis_or_e1(int d) const;
};

/// Scales that carry the lambda = 1 tube geometry to energy lambda for a radial symbol:
/// axial |grad h0|(r_lambda)/|grad h0|(r_1), transverse r_lambda^{(s-2)/2}.
struct TubeScales {
  double axial = 1.0;
  double transverse = 1.0;
};
TubeScales tube_scales(const DispersionSymbol &symbol, double lambda);

/// Checks that the region fits strictly inside the periodic box.
void require_region_fits(const RegionSpec &region, const FourierGrid &grid);

/// 0/1 field, 1 on grid points strictly inside the region.
Field region_indicator(const RegionSpec &region, const GridPtr &grid);

/// K = chi delta_{lambda,eps}(H0) chi, applied matrix-free.
class BirmanSchwingerOperator {
public:
  BirmanSchwingerOperator(Field chi, const DispersionSymbol &symbol, double lambda, double eps);

  Field apply(const Field &f) const;

  const Field &chi() const { return chi_; }
  const Multiplier &delta() const { return delta_; }
  const GridPtr &grid_ptr() const { return chi_.grid_ptr(); }
  double lambda() const { return lambda_; }
  double eps() const { return eps_; }

  /// Axes j along which both chi and delta are invariant under x_j -> -x_j.
  std::vector<int> reflection_axes() const { return reflection_axes_; }

private:
  Field chi_;
  Multiplier delta_;
  double lambda_;
  double eps_;
  std::vector<int> reflection_axes_;
};

Field apply_K(const Field &chi, const DispersionSymbol &symbol, double lambda, double eps,
              const Field &f);

struct PowerOptions {
  double tol = 1e-10;
  int max_iter = 5000;
  /// Drop imaginary parts every step (K is real).
  bool enforce_real = true;
  /// Iterate separately in each reflection parity sector and keep the best.
  bool use_symmetry = true;
  bool record_history = true;
};

struct EigenPair {
  double mu = 0.0;
  Field phi;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0; // |K phi - mu phi| / mu
  std::vector<double> rayleigh_history;
  /// Parity per reflection axis of the returned sector (+1 / -1), empty without symmetry.
  std::vector<int> parity;
};

/// Power iteration on a positive self-adjoint operator given as a callback.
EigenPair power_iteration(const std::function<Field(const Field &)> &op, const Field &init,
                          const PowerOptions &options, const std::vector<int> &reflection_axes);

EigenPair top_eigenpair(const BirmanSchwingerOperator &K, const Field &init,
                        const PowerOptions &options = {});

EigenPair top_eigenpair(const Field &chi, const DispersionSymbol &symbol, double lambda,
                        double eps, const Field &init, double tol = 1e-10,
                        int max_iter = 5000);

/// Smooth radial bump: 1 on [0,1], 0 on [2, inf), S(2 - u) between.
double bump_eta0(double u);
/// S(t) = g(t) / (g(t) + g(1 - t)), g(t) = exp(-1/t) for t > 0.
double smooth_step(double t);

struct KnappSpec {
  double eps = 0.05;
  double c0 = 0.125;
  std::vector<double> base_point; // empty: r_lambda e_1 (radial), required for tabulated
  double lambda = 1.0;            // ignored for tabulated symbols (read from base_point)
  double axial_scale = 1.0;
  double transverse_scale = 1.0;
};

struct KnappPacket {
  Field field;                       // unit L2 norm
  double unnormalized_norm_sq = 0.0; // W^{-1} sum |fhat|^2
  double lambda = 1.0;
  double max_shell_deviation = 0.0; // max |h0 - lambda| over the Fourier support
  int support_size = 0;
};

/// Fourier bump on the Knapp cap around the base point. Throws when fewer than 8 lattice
/// spacings fit across the cap's support in any direction, or the cap leaves the lattice.
KnappPacket knapp_wavepacket(const KnappSpec &spec, const GridPtr &grid,
                             const DispersionSymbol &symbol);

/// Region T_{eps/M} matched to the Knapp packet with the same scales.
RegionSpec knapp_region(double eps, double M, const TubeScales &scales = {});

/// eps |K f| / |f| for the Knapp packet with cap parameter c0 on the region T_{eps/M}.
double knapp_lower_bound(double eps, double M, double c0, const GridPtr &grid,
                         const DispersionSymbol &symbol, double lambda);

/// Real seed chi * Re(knapp); falls back to a modulated Gaussian if the cap is unresolved.
Field default_seed(const RegionSpec &region, const DispersionSymbol &symbol, double lambda,
                   const GridPtr &grid);

/// K'_eps = chi_1 delta_1(h'_eps) chi_1 with h'_eps(eta) = 2 eta_1 + |eta'|^2 + eps eta_1^2
/// and delta_1(h) = 1 / (h^2 + 1), on the unit tube {|y_1| < M, |y'| < M^{1/2}}.
class RescaledTubeOperator {
public:
  RescaledTubeOperator(double eps, GridPtr grid, double M = 1.0);

  static double symbol_value(double eps, std::span<const double> eta);

  Field apply(const Field &f) const;
  const Field &chi() const { return chi_; }
  double eps() const { return eps_; }
  const GridPtr &grid_ptr() const { return chi_.grid_ptr(); }

  /// Knapp packet at eta = 0 with cap (c0, c0^{1/2}), unit norm.
  Field knapp_init(double c0) const;

  EigenPair top_eigenpair(const Field &init, PowerOptions options) const;

private:
  double eps_;
  Field chi_;
  Multiplier delta_;
  std::vector<int> reflection_axes_;
};

/// Grid for the rescaled operator matched to a physical grid at eps:
/// box (eps L_1, eps^{1/2} L_2, ...), same sizes.
GridPtr rescaled_grid(const FourierGrid &physical, double eps);

} // namespace bsforge
