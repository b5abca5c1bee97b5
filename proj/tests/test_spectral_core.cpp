#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bsforge/spectral_core.hpp"
#include "doctest.h"

using namespace bsforge;
using std::numbers::pi;

namespace {

Field random_field(const GridPtr &g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Field f(g);
  for (auto &v : f.values()) {
    v = cplx(n(rng), n(rng));
  }
  return f;
}

// plane wave exp(i xi . x) for the lattice frequency with index (k0, k1)
Field mode(const GridPtr &g, int k0, int k1) {
  Field f(g);
  std::vector<double> x(2);
  const double xi0 = g->frequency(0, k0);
  const double xi1 = g->frequency(1, k1);
  for (std::size_t k = 0; k < f.size(); ++k) {
    g->position(k, x);
    f[k] = std::exp(cplx(0.0, xi0 * x[0] + xi1 * x[1]));
  }
  return f;
}

// O(n^2) unitary DFT over flat indices of a row-major 2d array
std::vector<cplx> naive_dft(const Field &f) {
  const auto &g = f.grid();
  const int n0 = g.sizes()[0];
  const int n1 = g.sizes()[1];
  std::vector<cplx> out(f.size());
  for (int a = 0; a < n0; ++a) {
    for (int b = 0; b < n1; ++b) {
      cplx s = 0.0;
      for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n1; ++j) {
          const double ph = -2.0 * pi * (double(a) * i / n0 + double(b) * j / n1);
          s += f[i * n1 + j] * std::exp(cplx(0.0, ph));
        }
      }
      out[a * n1 + b] = s / std::sqrt(double(n0 * n1));
    }
  }
  return out;
}

} // namespace

TEST_CASE("grid frequencies follow 2 pi k / L") {
  const auto g = build_grid(1, {2 * pi}, {5});
  auto f = g->frequencies(0);
  std::sort(f.begin(), f.end());
  const std::vector<double> want{-2, -1, 0, 1, 2};
  for (int i = 0; i < 5; ++i) {
    CHECK(f[i] == doctest::Approx(want[i]).epsilon(1e-14));
  }
  CHECK(g->frequency(0, 0) == 0.0);

  const auto g2 = build_grid(2, {4 * pi, 2 * pi}, {5, 3});
  auto f0 = g2->frequencies(0);
  std::sort(f0.begin(), f0.end());
  const std::vector<double> want0{-1, -0.5, 0, 0.5, 1};
  for (int i = 0; i < 5; ++i) {
    CHECK(f0[i] == doctest::Approx(want0[i]).epsilon(1e-14));
  }
  CHECK(g2->point_count() == 15);
  CHECK(g2->cell_volume() == doctest::Approx(4 * pi * 2 * pi / 15));
}

TEST_CASE("grid rejects even sizes and bad lengths") {
  CHECK_THROWS_WITH_AS(build_grid(1, {2 * pi}, {4}), doctest::Contains("even"),
                       std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1, {-1.0}, {5}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(2, {1.0}, {5, 5}), std::invalid_argument);
}

TEST_CASE("lattice is symmetric about the origin") {
  const auto g = build_grid(2, {3.0, 5.0}, {7, 9});
  std::vector<double> x(2);
  std::vector<double> y(2);
  for (std::size_t k = 0; k < g->point_count(); ++k) {
    g->position(k, x);
    g->position(g->reflect(g->reflect(k, 0), 1), y);
    CHECK(x[0] == -y[0]);
    CHECK(x[1] == -y[1]);
  }
  std::vector<double> xi(2);
  std::vector<double> eta(2);
  for (std::size_t k = 0; k < g->point_count(); ++k) {
    g->wavevector(k, xi);
    g->wavevector(g->mirror(k), eta);
    CHECK(xi[0] == -eta[0]);
    CHECK(xi[1] == -eta[1]);
  }
  g->position((g->point_count() - 1) / 2, x);
  CHECK(x[0] == 0.0);
  CHECK(x[1] == 0.0);
}

TEST_CASE("symbol evaluation") {
  const std::vector<double> a{1.0, 0.0};
  const std::vector<double> b{3.0, 4.0};
  const std::vector<double> c{4.0, 0.0};
  CHECK(eval_symbol(DispersionSymbol::laplacian(), a) == 1.0);
  CHECK(eval_symbol(DispersionSymbol::fractional(1.0), b) == doctest::Approx(5.0));
  CHECK(eval_symbol(DispersionSymbol::fractional(0.5), c) == doctest::Approx(2.0));
  CHECK_THROWS_AS(DispersionSymbol::fractional(0.0), std::invalid_argument);
  CHECK(DispersionSymbol::fractional(1.5).radial_level(8.0) == doctest::Approx(4.0));
}

TEST_CASE("tabulated symbol must be even and finite") {
  const auto g = build_grid(1, {2 * pi}, {5});
  CHECK_NOTHROW(DispersionSymbol::tabulated(g, {0, 1, 4, 4, 1}));
  CHECK_THROWS_AS(DispersionSymbol::tabulated(g, {0, 1, 4, 3, 1}), std::invalid_argument);
  CHECK_THROWS_AS(DispersionSymbol::tabulated(g, {0, 1, NAN, NAN, 1}), std::invalid_argument);
  const auto t = DispersionSymbol::tabulated(g, {0, 1, 4, 4, 1});
  const std::vector<double> on{-2.0};
  const std::vector<double> off{0.5};
  CHECK(t(on) == 4.0);
  CHECK_THROWS(t(off));
}

TEST_CASE("delta multiplier values") {
  const auto g = build_grid(1, {2 * pi}, {9});
  const auto sym = DispersionSymbol::laplacian();
  const auto d = delta_multiplier(sym, 1.0, 0.1, g);
  // index 1 is xi = 1 (on shell), index 0 is xi = 0
  CHECK(d[1].real() == doctest::Approx(10.0));
  CHECK(d[0].real() == doctest::Approx(0.1 / 1.01));
  const auto h = delta_multiplier(sym, 4.0, 3.0, g); // |h - lambda| = eps at xi = 1
  CHECK(h[1].real() == doctest::Approx(1.0 / 6.0));
  CHECK(d.real_even());
  for (std::size_t k = 0; k < d.size(); ++k) {
    CHECK(d[k] == d[g->mirror(k)]);
  }
}

TEST_CASE("resolvent multiplier") {
  const auto g = build_grid(2, {4 * pi, 6 * pi}, {9, 11});
  const auto sym = DispersionSymbol::laplacian();
  const cplx z(1.0, 0.1);
  const auto r = resolvent_multiplier(sym, z, g);
  const auto d = delta_multiplier(sym, 1.0, 0.1, g);
  for (std::size_t k = 0; k < r.size(); ++k) {
    CHECK(r[k].imag() == doctest::Approx(d[k].real()).epsilon(1e-13));
  }
  const auto on = resolvent_multiplier(sym, cplx(1.0, 0.25), build_grid(1, {2 * pi}, {5}));
  CHECK(std::abs(on[1] - cplx(0.0, 4.0)) < 1e-12);
  CHECK_THROWS_AS(resolvent_multiplier(sym, cplx(1.0, 0.0), g), std::invalid_argument);
}

TEST_CASE("multiplier action") {
  const auto g = build_grid(2, {4 * pi, 6 * pi}, {9, 11});
  const auto f = random_field(g, 1);
  const auto id = symbol_function(DispersionSymbol::laplacian(), g, [](double) { return 1.0; });
  CHECK((apply_multiplier(id, f) - f).norm() < 1e-13 * f.norm());

  const auto sym = DispersionSymbol::laplacian();
  const auto m = symbol_multiplier(sym, g);
  const auto e = mode(g, 2, 9); // negative frequency on axis 1
  const auto out = apply_multiplier(m, e);
  std::vector<double> xi(2);
  xi[0] = g->frequency(0, 2);
  xi[1] = g->frequency(1, 9);
  const double want = xi[0] * xi[0] + xi[1] * xi[1];
  CHECK((out - cplx(want) * e).norm() < 1e-12 * want * e.norm());

  const cplx z(1.0, 0.1);
  const auto back = symbol_function(sym, g, [z](double h) { return cplx(h) - z; });
  const auto round = apply_multiplier(back, apply_multiplier(resolvent_multiplier(sym, z, g), f));
  CHECK((round - f).norm() < 1e-12 * f.norm());
}

TEST_CASE("real even multiplier keeps fields real") {
  const auto g = build_grid(2, {5.0, 7.0}, {9, 13});
  Field f = real_part(random_field(g, 2));
  const auto d = delta_multiplier(DispersionSymbol::laplacian(), 1.0, 0.2, g);
  CHECK(apply_multiplier(d, f).is_real());
}

TEST_CASE("transform matches a direct DFT and preserves inner products") {
  const auto g = build_grid(2, {3.0, 4.0}, {5, 7});
  const auto f = random_field(g, 3);
  const auto fast = forward_transform(f);
  const auto slow = naive_dft(f);
  double err = 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < fast.size(); ++k) {
    err += std::norm(fast[k] - slow[k]);
    sum += std::norm(slow[k]);
  }
  CHECK(std::sqrt(err / sum) < 1e-13);

  double spec = 0.0;
  for (const auto &c : fast) {
    spec += std::norm(c);
  }
  const double phys = field_inner(f, f).real();
  CHECK(std::abs(phys - g->cell_volume() * spec) < 1e-12 * phys);
  CHECK((inverse_transform(g, fast) - f).norm() < 1e-13 * f.norm());
}

TEST_CASE("field inner product") {
  const auto g = build_grid(2, {2 * pi, 4 * pi}, {7, 9});
  Field one(g);
  for (auto &v : one.values()) {
    v = 1.0;
  }
  CHECK(field_inner(one, one).real() == doctest::Approx(8 * pi * pi));
  CHECK(std::abs(field_inner(mode(g, 1, 2), mode(g, 3, 2))) < 1e-12);
  const auto a = random_field(g, 4);
  const auto b = random_field(g, 5);
  CHECK(std::abs(field_inner(a, b) - std::conj(field_inner(b, a))) < 1e-12);
  const auto other = build_grid(2, {2 * pi, 4 * pi}, {7, 11});
  CHECK_THROWS(field_inner(a, Field(other)));
}
