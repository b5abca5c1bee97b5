#include "bsforge/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"

namespace bsforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

FourierGrid::FourierGrid(std::vector<double> box_lengths, std::vector<int> sizes)
    : box_lengths_(std::move(box_lengths)), sizes_(std::move(sizes)) {
  if (sizes_.empty()) {
    throw std::invalid_argument("grid dimension must be at least 1");
  }
  if (box_lengths_.size() != sizes_.size()) {
    throw std::invalid_argument("grid needs one box length per axis");
  }
  for (std::size_t j = 0; j < sizes_.size(); ++j) {
    if (!(box_lengths_[j] > 0.0) || !std::isfinite(box_lengths_[j])) {
      throw std::invalid_argument("box length on axis " + std::to_string(j) +
                                  " must be positive and finite");
    }
    if (sizes_[j] < 3) {
      throw std::invalid_argument("grid size on axis " + std::to_string(j) +
                                  " must be at least 3");
    }
    if (sizes_[j] % 2 == 0) {
      throw std::invalid_argument(
          "even grid size " + std::to_string(sizes_[j]) + " on axis " + std::to_string(j) +
          ": sizes must be odd so the frequency lattice is symmetric under xi -> -xi");
    }
  }
  const int d = dimension();
  strides_.assign(d, 1);
  for (int j = d - 2; j >= 0; --j) {
    strides_[j] = strides_[j + 1] * static_cast<std::size_t>(sizes_[j + 1]);
  }
  point_count_ = strides_[0] * static_cast<std::size_t>(sizes_[0]);
  cell_volume_ = 1.0;
  for (int j = 0; j < d; ++j) {
    cell_volume_ *= spacing(j);
  }
}

double FourierGrid::frequency_spacing(int axis) const { return kTwoPi / box_lengths_[axis]; }

double FourierGrid::volume() const {
  double v = 1.0;
  for (double l : box_lengths_) {
    v *= l;
  }
  return v;
}

double FourierGrid::coordinate(int axis, int index) const {
  return (index - (sizes_[axis] - 1) / 2) * spacing(axis);
}

int FourierGrid::wavenumber(int axis, int index) const {
  const int n = sizes_[axis];
  return index <= (n - 1) / 2 ? index : index - n;
}

double FourierGrid::frequency(int axis, int index) const {
  return wavenumber(axis, index) * frequency_spacing(axis);
}

double FourierGrid::max_frequency(int axis) const {
  return ((sizes_[axis] - 1) / 2) * frequency_spacing(axis);
}

std::vector<double> FourierGrid::coordinates(int axis) const {
  std::vector<double> out(sizes_[axis]);
  for (int i = 0; i < sizes_[axis]; ++i) {
    out[i] = coordinate(axis, i);
  }
  return out;
}

std::vector<double> FourierGrid::frequencies(int axis) const {
  std::vector<double> out(sizes_[axis]);
  for (int i = 0; i < sizes_[axis]; ++i) {
    out[i] = frequency(axis, i);
  }
  return out;
}

void FourierGrid::unravel(std::size_t flat, std::span<int> index) const {
  for (int j = 0; j < dimension(); ++j) {
    index[j] = static_cast<int>(flat / strides_[j]);
    flat %= strides_[j];
  }
}

void FourierGrid::position(std::size_t flat, std::span<double> x) const {
  for (int j = 0; j < dimension(); ++j) {
    x[j] = coordinate(j, static_cast<int>(flat / strides_[j]));
    flat %= strides_[j];
  }
}

void FourierGrid::wavevector(std::size_t flat, std::span<double> xi) const {
  for (int j = 0; j < dimension(); ++j) {
    xi[j] = frequency(j, static_cast<int>(flat / strides_[j]));
    flat %= strides_[j];
  }
}

std::size_t FourierGrid::mirror(std::size_t flat) const {
  std::size_t out = 0;
  for (int j = 0; j < dimension(); ++j) {
    const auto i = flat / strides_[j];
    flat %= strides_[j];
    const auto n = static_cast<std::size_t>(sizes_[j]);
    out += ((n - i) % n) * strides_[j];
  }
  return out;
}

std::size_t FourierGrid::reflect(std::size_t flat, int axis) const {
  // physical samples: i -> n-1-i
  const auto s = strides_[axis];
  const auto n = static_cast<std::size_t>(sizes_[axis]);
  const auto i = (flat / s) % n;
  return flat - i * s + (n - 1 - i) * s;
}

GridPtr build_grid(int dimension, std::vector<double> box_lengths, std::vector<int> sizes) {
  if (dimension < 1) {
    throw std::invalid_argument("grid dimension must be at least 1");
  }
  if (static_cast<int>(box_lengths.size()) != dimension ||
      static_cast<int>(sizes.size()) != dimension) {
    throw std::invalid_argument("grid needs exactly d box lengths and d sizes");
  }
  return std::make_shared<const FourierGrid>(std::move(box_lengths), std::move(sizes));
}

// ---------------------------------------------------------------------------------------
// Field

Field::Field(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) {
    throw std::invalid_argument("field requires a grid");
  }
  values_.assign(grid_->point_count(), cplx{});
}

Field::Field(GridPtr grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) {
    throw std::invalid_argument("field requires a grid");
  }
  if (values_.size() != grid_->point_count()) {
    throw std::invalid_argument("field length " + std::to_string(values_.size()) +
                                " does not match grid point count " +
                                std::to_string(grid_->point_count()));
  }
}

bool Field::is_real() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const cplx &v) { return v.imag() == 0.0; });
}

double Field::norm() const {
  double s = 0.0;
  for (const auto &v : values_) {
    s += std::norm(v);
  }
  return std::sqrt(s * grid_->cell_volume());
}

double Field::max_abs() const {
  double m = 0.0;
  for (const auto &v : values_) {
    m = std::max(m, std::abs(v));
  }
  return m;
}

void require_same_grid(const FourierGrid &a, const FourierGrid &b, const char *what) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string("grid mismatch in ") + what);
  }
}

Field &Field::operator+=(const Field &other) {
  require_same_grid(*grid_, other.grid(), "field addition");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] += other.values_[i];
  }
  return *this;
}

Field &Field::operator-=(const Field &other) {
  require_same_grid(*grid_, other.grid(), "field subtraction");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] -= other.values_[i];
  }
  return *this;
}

Field &Field::operator*=(cplx scale) {
  for (auto &v : values_) {
    v *= scale;
  }
  return *this;
}

Field operator+(Field a, const Field &b) { return a += b; }
Field operator-(Field a, const Field &b) { return a -= b; }
Field operator*(cplx s, Field a) { return a *= s; }

Field hadamard(const Field &a, const Field &b) {
  require_same_grid(a.grid(), b.grid(), "pointwise product");
  Field out(a.grid_ptr());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = a[i] * b[i];
  }
  return out;
}

Field real_part(const Field &f) {
  Field out(f.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i] = f[i].real();
  }
  return out;
}

Field imag_part(const Field &f) {
  Field out(f.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i] = f[i].imag();
  }
  return out;
}

// ---------------------------------------------------------------------------------------
// DispersionSymbol

DispersionSymbol DispersionSymbol::laplacian() { return DispersionSymbol(Laplacian{}); }

DispersionSymbol DispersionSymbol::fractional(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("fractional exponent s must be positive");
  }
  return DispersionSymbol(Fractional{s});
}

DispersionSymbol DispersionSymbol::tabulated(GridPtr grid, std::vector<double> values) {
  if (!grid) {
    throw std::invalid_argument("tabulated symbol requires a grid");
  }
  if (values.size() != grid->point_count()) {
    throw std::invalid_argument("tabulated symbol needs one value per lattice point");
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) {
      throw std::invalid_argument("tabulated symbol values must be finite");
    }
    if (values[k] != values[grid->mirror(k)]) {
      throw std::invalid_argument(
          "tabulated symbol is not even: h0(xi) != h0(-xi), so h0(D) would not be real");
    }
  }
  return DispersionSymbol(Tabulated{std::move(grid), std::move(values)});
}

double DispersionSymbol::exponent() const {
  if (is_laplacian()) {
    return 2.0;
  }
  if (is_fractional()) {
    return std::get<Fractional>(kind_).s;
  }
  throw std::invalid_argument("tabulated symbol has no homogeneity exponent");
}

double DispersionSymbol::operator()(std::span<const double> xi) const {
  for (double v : xi) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("symbol evaluated at a non-finite frequency");
    }
  }
  if (is_laplacian()) {
    double s = 0.0;
    for (double v : xi) {
      s += v * v;
    }
    return s;
  }
  if (is_fractional()) {
    double s = 0.0;
    for (double v : xi) {
      s += v * v;
    }
    return std::pow(std::sqrt(s), std::get<Fractional>(kind_).s);
  }
  const auto &tab = std::get<Tabulated>(kind_);
  const auto &g = *tab.grid;
  if (static_cast<int>(xi.size()) != g.dimension()) {
    throw std::invalid_argument("frequency dimension does not match tabulated symbol");
  }
  std::size_t flat = 0;
  for (int j = 0; j < g.dimension(); ++j) {
    const double k = xi[j] / g.frequency_spacing(j);
    const double kr = std::round(k);
    const int half = (g.sizes()[j] - 1) / 2;
    if (std::abs(k - kr) > 1e-9 * std::max(1.0, std::abs(k)) || std::abs(kr) > half) {
      throw std::invalid_argument("tabulated symbol queried off its frequency lattice");
    }
    const int ki = static_cast<int>(kr);
    const int index = ki >= 0 ? ki : ki + g.sizes()[j];
    flat += static_cast<std::size_t>(index) * g.stride(j);
  }
  return tab.values[flat];
}

std::vector<double> DispersionSymbol::on_lattice(const FourierGrid &grid) const {
  if (is_tabulated()) {
    const auto &tab = std::get<Tabulated>(kind_);
    require_same_grid(*tab.grid, grid, "tabulated symbol lattice");
    return tab.values;
  }
  const int d = grid.dimension();
  std::vector<std::vector<double>> freq(d);
  for (int j = 0; j < d; ++j) {
    freq[j] = grid.frequencies(j);
  }
  std::vector<double> out(grid.point_count());
  std::vector<int> idx(d);
  const bool lap = is_laplacian();
  const double s = lap ? 2.0 : std::get<Fractional>(kind_).s;
  for (std::size_t k = 0; k < out.size(); ++k) {
    grid.unravel(k, idx);
    double r2 = 0.0;
    for (int j = 0; j < d; ++j) {
      r2 += freq[j][idx[j]] * freq[j][idx[j]];
    }
    out[k] = lap ? r2 : std::pow(std::sqrt(r2), s);
  }
  return out;
}

double DispersionSymbol::radial_level(double level) const {
  if (!is_radial()) {
    throw std::invalid_argument("radial level requested for a tabulated symbol");
  }
  if (!(level > 0.0)) {
    throw std::invalid_argument("radial level requires a positive energy");
  }
  return std::pow(level, 1.0 / exponent());
}

double DispersionSymbol::radial_slope(double r) const {
  const double s = exponent();
  return s * std::pow(r, s - 1.0);
}

std::string DispersionSymbol::describe() const {
  if (is_laplacian()) {
    return "laplacian";
  }
  if (is_fractional()) {
    std::ostringstream os;
    os.precision(17);
    os << "fractional(s=" << std::get<Fractional>(kind_).s << ")";
    return os.str();
  }
  return "tabulated";
}

double eval_symbol(const DispersionSymbol &symbol, std::span<const double> xi) {
  return symbol(xi);
}

// ---------------------------------------------------------------------------------------
// Multipliers

Multiplier::Multiplier(GridPtr grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_ || values_.size() != grid_->point_count()) {
    throw std::invalid_argument("multiplier needs one value per lattice point");
  }
  real_even_ = true;
  for (std::size_t k = 0; k < values_.size() && real_even_; ++k) {
    real_even_ = values_[k].imag() == 0.0 && values_[k] == values_[grid_->mirror(k)];
  }
}

Multiplier symbol_multiplier(const DispersionSymbol &symbol, const GridPtr &grid) {
  return symbol_function(symbol, grid, [](double h) { return cplx(h, 0.0); });
}

Multiplier delta_multiplier(const DispersionSymbol &symbol, double lambda, double eps,
                            const GridPtr &grid) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("delta multiplier requires eps > 0");
  }
  return symbol_function(symbol, grid, [=](double h) {
    const double t = h - lambda;
    return cplx(eps / (t * t + eps * eps), 0.0);
  });
}

Multiplier resolvent_multiplier(const DispersionSymbol &symbol, cplx z, const GridPtr &grid) {
  if (z.imag() == 0.0) {
    throw std::invalid_argument("resolvent multiplier requires Im z != 0 (a real z may sit on "
                                "a lattice pole)");
  }
  return symbol_function(symbol, grid, [=](double h) { return 1.0 / (h - z); });
}

std::vector<cplx> forward_transform(const Field &f) {
  std::vector<cplx> c(f.values().begin(), f.values().end());
  detail::fft_inplace(c, f.grid().sizes(), detail::FftDirection::forward);
  const double scale = 1.0 / std::sqrt(static_cast<double>(c.size()));
  for (auto &v : c) {
    v *= scale;
  }
  return c;
}

Field inverse_transform(const GridPtr &grid, std::vector<cplx> coefficients) {
  if (coefficients.size() != grid->point_count()) {
    throw std::invalid_argument("coefficient count does not match grid");
  }
  detail::fft_inplace(coefficients, grid->sizes(), detail::FftDirection::backward);
  const double scale = 1.0 / std::sqrt(static_cast<double>(coefficients.size()));
  for (auto &v : coefficients) {
    v *= scale;
  }
  return Field(grid, std::move(coefficients));
}

Field apply_multiplier(const Multiplier &multiplier, const Field &f) {
  require_same_grid(multiplier.grid(), f.grid(), "apply_multiplier");
  const bool real_in = multiplier.real_even() && f.is_real();
  std::vector<cplx> c(f.values().begin(), f.values().end());
  detail::fft_inplace(c, f.grid().sizes(), detail::FftDirection::forward);
  const double scale = 1.0 / static_cast<double>(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    c[k] *= multiplier[k] * scale;
  }
  detail::fft_inplace(c, f.grid().sizes(), detail::FftDirection::backward);
  if (real_in) {
    // roundoff scale of the product, not of the (possibly much smaller) output
    double max_m = 0.0;
    for (const auto &v : multiplier.values()) {
      max_m = std::max(max_m, std::abs(v));
    }
    double max_abs = max_m * f.max_abs();
    double max_imag = 0.0;
    for (const auto &v : c) {
      max_abs = std::max(max_abs, std::abs(v));
      max_imag = std::max(max_imag, std::abs(v.imag()));
    }
    if (max_imag > kRealityTolerance * max_abs) {
      throw std::runtime_error("real even multiplier produced an imaginary part above "
                               "roundoff; the multiplier or transform is inconsistent");
    }
    for (auto &v : c) {
      v = cplx(v.real(), 0.0);
    }
  }
  return Field(f.grid_ptr(), std::move(c));
}

cplx field_inner(const Field &f, const Field &g) {
  require_same_grid(f.grid(), g.grid(), "field_inner");
  cplx s{};
  for (std::size_t i = 0; i < f.size(); ++i) {
    s += std::conj(f[i]) * g[i];
  }
  return s * f.grid().cell_volume();
}

} // namespace bsforge
