#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace bsforge {

using cplx = std::complex<double>;

/// Periodic box [-L/2, L/2)^d sampled on an odd number of points per axis.
///
/// Sample i on axis j sits at x = (i - (n_j - 1)/2) * h_j with h_j = L_j / n_j, so the
/// origin is always a sample and the lattice is symmetric under x -> -x. Frequencies are
/// stored in FFT order: index k < (n+1)/2 holds wavenumber k, the rest hold k - n.
class FourierGrid {
public:
  FourierGrid(std::vector<double> box_lengths, std::vector<int> sizes);

  int dimension() const { return static_cast<int>(sizes_.size()); }
  const std::vector<double> &box_lengths() const { return box_lengths_; }
  const std::vector<int> &sizes() const { return sizes_; }
  double spacing(int axis) const { return box_lengths_[axis] / sizes_[axis]; }
  double frequency_spacing(int axis) const;
  double cell_volume() const { return cell_volume_; }
  double volume() const;
  std::size_t point_count() const { return point_count_; }

  /// Row-major stride of `axis` (last axis is contiguous).
  std::size_t stride(int axis) const { return strides_[axis]; }

  double coordinate(int axis, int index) const;
  int wavenumber(int axis, int index) const;
  double frequency(int axis, int index) const;
  double max_frequency(int axis) const;

  std::vector<double> coordinates(int axis) const;
  std::vector<double> frequencies(int axis) const;

  /// Multi-index of a flat row-major offset.
  void unravel(std::size_t flat, std::span<int> index) const;
  /// Physical position of a flat sample.
  void position(std::size_t flat, std::span<double> x) const;
  /// Frequency vector of a flat (FFT-ordered) coefficient.
  void wavevector(std::size_t flat, std::span<double> xi) const;
  /// Flat offset of the coefficient at -xi.
  std::size_t mirror(std::size_t flat) const;
  /// Flat offset of the sample/coefficient reflected along one axis.
  std::size_t reflect(std::size_t flat, int axis) const;

  bool operator==(const FourierGrid &other) const {
    return sizes_ == other.sizes_ && box_lengths_ == other.box_lengths_;
  }

private:
  std::vector<double> box_lengths_;
  std::vector<int> sizes_;
  std::vector<std::size_t> strides_;
  double cell_volume_ = 0.0;
  std::size_t point_count_ = 0;
};

using GridPtr = std::shared_ptr<const FourierGrid>;

/// Validating factory; rejects even sizes, sizes below 3 and non-positive lengths.
GridPtr build_grid(int dimension, std::vector<double> box_lengths, std::vector<int> sizes);

/// Complex grid function sampled in physical space, row-major.
class Field {
public:
  Field() = default;
  explicit Field(GridPtr grid);
  Field(GridPtr grid, std::vector<cplx> values);

  const FourierGrid &grid() const { return *grid_; }
  const GridPtr &grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  cplx &operator[](std::size_t i) { return values_[i]; }
  const cplx &operator[](std::size_t i) const { return values_[i]; }

  /// True when every sample has exactly zero imaginary part.
  bool is_real() const;
  /// Grid-weighted L2 norm.
  double norm() const;
  double max_abs() const;

  Field &operator+=(const Field &other);
  Field &operator-=(const Field &other);
  Field &operator*=(cplx scale);

private:
  GridPtr grid_;
  std::vector<cplx> values_;
};

Field operator+(Field a, const Field &b);
Field operator-(Field a, const Field &b);
Field operator*(cplx s, Field a);
/// Pointwise product.
Field hadamard(const Field &a, const Field &b);
Field real_part(const Field &f);
Field imag_part(const Field &f);

void require_same_grid(const FourierGrid &a, const FourierGrid &b, const char *what);

/// Real-valued, even dispersion relation h0 of a constant-coefficient operator h0(D).
class DispersionSymbol {
public:
  struct Laplacian {};
  struct Fractional {
    double s;
  };
  struct Tabulated {
    GridPtr grid;
    std::vector<double> values; // FFT order on grid
  };

  static DispersionSymbol laplacian();
  static DispersionSymbol fractional(double s);
  /// Values in FFT order on `grid`; must be finite and even under xi -> -xi.
  static DispersionSymbol tabulated(GridPtr grid, std::vector<double> values);

  bool is_laplacian() const { return std::holds_alternative<Laplacian>(kind_); }
  bool is_fractional() const { return std::holds_alternative<Fractional>(kind_); }
  bool is_tabulated() const { return std::holds_alternative<Tabulated>(kind_); }
  bool is_radial() const { return !is_tabulated(); }

  /// Exponent s of |xi|^s (2 for the Laplacian); throws for tabulated symbols.
  double exponent() const;
  const Tabulated &table() const { return std::get<Tabulated>(kind_); }

  /// h0 evaluated at xi; tabulated symbols throw off-lattice.
  double operator()(std::span<const double> xi) const;
  /// h0 on every lattice point of `grid`, FFT order.
  std::vector<double> on_lattice(const FourierGrid &grid) const;

  /// Radius r with h0(r e) = level for radial symbols.
  double radial_level(double level) const;
  /// |grad h0| at radius r for radial symbols.
  double radial_slope(double r) const;

  std::string describe() const;

private:
  using Kind = std::variant<Laplacian, Fractional, Tabulated>;
  explicit DispersionSymbol(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

double eval_symbol(const DispersionSymbol &symbol, std::span<const double> xi);

/// Fourier multiplier sampled on the frequency lattice (FFT order).
class Multiplier {
public:
  Multiplier(GridPtr grid, std::vector<cplx> values);

  const FourierGrid &grid() const { return *grid_; }
  const GridPtr &grid_ptr() const { return grid_; }
  std::span<const cplx> values() const { return values_; }
  const cplx &operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  /// Real-valued and exactly even on the lattice; such multipliers map real fields to real
  /// fields.
  bool real_even() const { return real_even_; }

private:
  GridPtr grid_;
  std::vector<cplx> values_;
  bool real_even_ = false;
};

/// Multiplier of h0(D) itself.
Multiplier symbol_multiplier(const DispersionSymbol &symbol, const GridPtr &grid);

/// eps / ((h0 - lambda)^2 + eps^2).
Multiplier delta_multiplier(const DispersionSymbol &symbol, double lambda, double eps,
                            const GridPtr &grid);

/// 1 / (h0 - z); Im z must be non-zero.
Multiplier resolvent_multiplier(const DispersionSymbol &symbol, cplx z, const GridPtr &grid);

/// Pointwise function of the symbol on the lattice.
template <class Fn>
Multiplier symbol_function(const DispersionSymbol &symbol, const GridPtr &grid, Fn &&fn) {
  const auto h = symbol.on_lattice(*grid);
  std::vector<cplx> values(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    values[k] = fn(h[k]);
  }
  return Multiplier(grid, std::move(values));
}

/// Unitary forward DFT of the physical samples (FFT-ordered coefficients).
std::vector<cplx> forward_transform(const Field &f);
/// Inverse of forward_transform.
Field inverse_transform(const GridPtr &grid, std::vector<cplx> coefficients);

/// F^{-1}(m F f). Real input through a real even multiplier yields a real field; residual
/// imaginary parts above 1e-12 relative are reported as an error.
Field apply_multiplier(const Multiplier &multiplier, const Field &f);

/// cell_volume * sum conj(f) g.
cplx field_inner(const Field &f, const Field &g);

/// Relative level under which imaginary roundoff of a mathematically real result is dropped.
inline constexpr double kRealityTolerance = 1e-12;

} // namespace bsforge
