#include <cmath>
#include <numbers>

#include "bsforge/bounds.hpp"
#include "bsforge/sweep.hpp"
#include "doctest.h"

using namespace bsforge;
using std::numbers::pi;

namespace {

Field constant(const GridPtr &g, cplx c) {
  Field f(g);
  for (auto &v : f.values()) {
    v = c;
  }
  return f;
}

// certificate carrying only what the quotients read
Certificate synthetic(const GridPtr &g, const Field &V, cplx z,
                      DispersionSymbol sym = DispersionSymbol::laplacian()) {
  Certificate c;
  c.symbol = std::move(sym);
  c.z = z;
  c.lambda = z.real();
  c.eps = z.imag();
  c.region.eps = 0.25;
  c.psi = Field(g);
  c.V = V;
  return c;
}

} // namespace

TEST_CASE("Lebesgue norms") {
  const auto g = build_grid(2, {20.0, 10.0}, {201, 101});
  RegionSpec tube;
  tube.eps = 0.25;
  const auto chi = region_indicator(tube, g);
  CHECK(std::abs(lq_norm(chi, 2.0) - std::sqrt(32.0)) <= std::sqrt(32.0 + 2.4) - std::sqrt(32.0));
  const double W = g->volume();
  for (double q : {1.0, 1.5, 2.0, 3.7}) {
    CHECK(lq_norm(constant(g, cplx(0.0, -3.0)), q) == doctest::Approx(3.0 * std::pow(W, 1.0 / q)));
  }
  Field f = constant(g, 1.0);
  f[17] = cplx(3.0, 4.0);
  CHECK(lq_norm(f, kInfinity) == 5.0);
}

TEST_CASE("distance to the positive half-line") {
  CHECK(dist_to_positive_axis(cplx(1.0, 0.1)) == doctest::Approx(0.1));
  CHECK(dist_to_positive_axis(cplx(-1.0, 0.0)) == doctest::Approx(1.0));
  CHECK(dist_to_positive_axis(cplx(-3.0, 4.0)) == doctest::Approx(5.0));
  CHECK(std::sqrt(cplx(1.0, 0.01)).imag() == doctest::Approx(0.005).epsilon(1e-4));
  CHECK(std::sqrt(cplx(1.0, 0.01)).imag() < 0.005);
}

TEST_CASE("Lieb-Thirring type quotient arithmetic") {
  const auto g = build_grid(2, {10.0, 10.0}, {11, 11});
  // |V|_2 = 0.5 for a constant of modulus 0.05 on a box of area 100
  const auto c = synthetic(g, constant(g, cplx(0.03, 0.04)), cplx(1.0, 0.1));
  CHECK(lq_norm(c.V, 2.0) == doctest::Approx(0.5));
  CHECK(ls_quotient(c, 2.0) == doctest::Approx(std::abs(cplx(1.0, 0.1)) / 0.25));
  CHECK(ls_quotient(c, 2.0) == doctest::Approx(4.020).epsilon(1e-4));
  CHECK_THROWS_AS(ls_quotient(c, 1.0), std::invalid_argument);
  CHECK(frank_quotient(c, 2.0) == doctest::Approx(std::sqrt(0.1 * std::abs(c.z)) / 0.25));
  CHECK_THROWS_AS(frank_quotient(c, 1.4), std::invalid_argument);
}

TEST_CASE("Davies-Nath functional") {
  const auto g = build_grid(2, {20.0, 20.0}, {201, 201});
  RegionSpec ball;
  ball.shape = RegionShape::ball;
  ball.eps = 0.25; // radius 4
  Field V = region_indicator(ball, g);
  V *= cplx(2.0);
  const std::vector<std::vector<double>> ys{{0.0, 0.0}, {1.0, -2.0}, {7.0, 7.0}};
  const double want = std::pow(2.0, 1.5) * pi * 16.0;
  const double got = davies_nath_F(V, 0.0, {}, ys);
  CHECK(std::abs(got - want) <= std::pow(2.0, 1.5) * 8.0 * pi * 0.1);
  CHECK(got == doctest::Approx(std::pow(lq_norm(V, 1.5), 1.5)).epsilon(1e-12));
  CHECK(davies_nath_F(V, 0.0, {}, {{5.0, 5.0}}) == doctest::Approx(got).epsilon(1e-12));
  CHECK(davies_nath_F(V, 0.0, {DecayWeight::polynomial, 0}, ys) ==
        doctest::Approx(got).epsilon(1e-12));
  double prev = got;
  for (double E : {0.1, 0.3, 1.0, 3.0}) {
    const double F = davies_nath_F(V, E, {}, ys);
    CHECK(F <= prev);
    prev = F;
  }
  CHECK_THROWS_AS(davies_nath_F(V, -1.0, {}, ys), std::invalid_argument);
  CHECK_THROWS_AS(davies_nath_F(V, 1.0, {}, {}), std::invalid_argument);
}

TEST_CASE("fractional estimates specialize correctly") {
  const auto g = build_grid(2, {10.0, 10.0}, {11, 11});
  const cplx z(1.0, 0.1);
  const auto lap = synthetic(g, constant(g, 0.05), z);
  const auto i = fractional_check(lap, 1.5, FractionalVariant::i);
  CHECK(i.lhs == doctest::Approx(std::pow(std::abs(z), 1.5 - 1.0)));
  CHECK(i.lhs / i.rhs == doctest::Approx(ls_quotient(lap, 1.5)));
  const auto ii = fractional_check(lap, 2.0, FractionalVariant::ii);
  CHECK(ii.ratio == doctest::Approx(frank_quotient(lap, 2.0)).epsilon(1e-12));
  const auto iii = fractional_check(lap, 2.0, FractionalVariant::iii, 0);
  CHECK(iii.rhs == doctest::Approx(std::pow(lq_norm(lap.V, 1.5), 1.5)));

  CHECK(fractional_q_threshold(2, 1.0) == 2.0);
  CHECK(fractional_q_threshold(2, 3.0) == 1.0);
  const auto frac = synthetic(g, constant(g, 0.05), z, DispersionSymbol::fractional(1.0));
  CHECK_THROWS_WITH_AS(fractional_check(frac, 1.5, FractionalVariant::i),
                       doctest::Contains("admissible"), std::invalid_argument);
  CHECK_NOTHROW(fractional_check(frac, 2.5, FractionalVariant::ii));
}

TEST_CASE("kernel profile rejects cutoffs that reach the origin or the lattice edge") {
  const auto sym = DispersionSymbol::laplacian();
  const auto g = kernel_grid(0.1, 2);
  CHECK_THROWS_WITH_AS(kernel_decay_profile(sym, 1.0, 0.1, ShellCutoff{2.0}, g),
                       doctest::Contains("xi = 0"), std::invalid_argument);
  const auto coarse = build_grid(2, {161.0, 161.0}, {161, 161});
  CHECK_THROWS_AS(kernel_decay_profile(sym, 8.0, 0.1, ShellCutoff{2.0}, coarse),
                  std::invalid_argument);
  CHECK_THROWS_AS(kernel_decay_profile(sym, 1.0, 0.1, ShellCutoff{0.0}, g), std::invalid_argument);
}

TEST_CASE("kernel envelope decays at a half power") {
  const double eps = 0.05;
  const auto prof =
      kernel_decay_profile(DispersionSymbol::laplacian(), 1.0, eps, {}, kernel_grid(eps, 2));
  CHECK(prof.radii.size() == prof.envelope.size());
  CHECK(prof.fitted_exponent == doctest::Approx(-0.5).epsilon(0.3));
  CHECK(prof.suppression_ratio < 1.0);
}

TEST_CASE("quotients are invariant under the energy scaling") {
  SweepConfig one;
  one.eps = {0.1};
  SweepConfig four = one;
  four.lambda = 4.0;
  four.eps = {0.4};
  const auto a = forge_for_eps(one, 0.1).certificate;
  const auto b = forge_for_eps(four, 0.4).certificate;
  CHECK(b.z == cplx(4.0, 0.4));
  for (double q : {2.0, 2.5}) {
    CHECK(ls_quotient(b, q) == doctest::Approx(ls_quotient(a, q)).epsilon(0.05));
    CHECK(frank_quotient(b, q) == doctest::Approx(frank_quotient(a, q)).epsilon(0.05));
  }
  CHECK(b.eps * b.mu == doctest::Approx(a.eps * a.mu).epsilon(0.05));
}
