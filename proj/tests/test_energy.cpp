#include "doctest.h"

#include "hofer/energy.hpp"

#include <cmath>
#include <numbers>

using namespace hofer;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexPolynomial mono(int k, Complex c = 1.0) { return ComplexPolynomial::monomial(k, c); }

PuncturedCurve zk(int k) { return PuncturedCurve::polynomial(PolynomialMap({mono(k), ComplexPolynomial()})); }

PuncturedCurve z_z2() { return PuncturedCurve::polynomial(PolynomialMap({mono(1), mono(2)})); }

}  // namespace

TEST_CASE("trivial-cylinder energies") {
  const EndModel model(2, 1.0);
  const AcsField st = standard_cylindrical_acs(model);
  for (int k = 1; k <= 3; ++k) {
    const EnergyValue om = e_omega(zk(k), st);
    CHECK(std::abs(om.value) < 1e-9);
    const BathtubSolution lam = e_lambda(zk(k), st);
    CHECK(lam.value == doctest::Approx(2 * kPi * k).epsilon(1e-8));
    CHECK(lam.converged);
    double width = lam.tail_width;
    for (const auto& [a, b] : lam.selected_set) width += b - a;
    CHECK(std::abs(width - lam.tail_width - 1.0) <= lam.bin_width);
  }
}

TEST_CASE("E_omega against the level-circle boundary integral") {
  // (z, z^2): the level |z| = 1 is |zeta| = c with c^2 + c^4 = 1; the boundary
  // integral of lambda is 2 pi (1 + c^4) and the orbit action 2 pi
  const EndModel model(2, 1.0);
  const AcsField st = standard_cylindrical_acs(model);
  const double c2 = 0.5 * (std::sqrt(5.0) - 1.0);
  const double expected = 2 * kPi * c2 * c2;
  const EnergyValue om = e_omega(z_z2(), st);
  CHECK(om.value == doctest::Approx(expected).epsilon(1e-8));
  CHECK(om.error < 1e-6);
  EnergyOptions fine;
  fine.nt = 128;
  CHECK(std::abs(e_omega(z_z2(), st, fine).value - om.value) <= om.error + 1e-12);
}

TEST_CASE("bathtub solver") {
  RMasses m;
  m.bin_width = 0.25;
  m.mass = {0.1, 0.5, 0.2, 0.4, 0.05, 0.0};
  m.tail_density = 1.2;
  const BathtubSolution sol = solve_bathtub(m);
  // densities 0.4 2.0 0.8 1.6 0.2 0: bins 1 and 3 first, then the tail (1.2) beats
  // bin 2 (0.8) for the remaining width 0.5
  CHECK(sol.value == doctest::Approx(0.5 + 0.4 + 0.5 * 1.2));
  CHECK(sol.tail_width == doctest::Approx(0.5));
  CHECK(sol.level == doctest::Approx(1.2));
  // without the tail: all four densest bins, total width 1
  RMasses flat = m;
  flat.tail_density = 0.0;
  const BathtubSolution s2 = solve_bathtub(flat);
  CHECK(s2.value == doctest::Approx(0.5 + 0.4 + 0.2 + 0.1));
  CHECK(s2.level == doctest::Approx(0.4));
  RMasses empty;
  empty.bin_width = 0.1;
  empty.mass.assign(5, 0.0);
  CHECK(solve_bathtub(empty).degenerate);
  CHECK(solve_bathtub(empty).value == 0.0);
}

TEST_CASE("bathtub refinement is monotone and Cauchy") {
  const EndModel model(2, 1.0);
  const AcsField st = standard_cylindrical_acs(model);
  const PuncturedCurve two =
      PuncturedCurve::polynomial(PolynomialMap({ComplexPolynomial(CVec{-0.09, 0.0, 1.0}), ComplexPolynomial()}));
  const BathtubSolution sol = e_lambda(two, st);
  REQUIRE(sol.history.size() >= 2);
  for (std::size_t i = 1; i < sol.history.size(); ++i) CHECK(sol.history[i] >= sol.history[i - 1] - 1e-12);
  CHECK(sol.converged);
  const std::size_t n = sol.history.size();
  CHECK(std::abs(sol.history[n - 1] - sol.history[n - 2]) <= 1e-6 * sol.value);
}

TEST_CASE("E_lambda of a two-zero planar curve is the enclosed flux") {
  // u = (f, 0) holomorphic: sigma(u_s)^2 + lambda(u_s)^2 = |grad a|^2 with a = log|f|
  // harmonic off the zeros, so the mass per unit r is the flux 2 pi (#zeros enclosed)
  const EndModel model(2, 1.0);
  const AcsField st = standard_cylindrical_acs(model);
  const PuncturedCurve two =
      PuncturedCurve::polynomial(PolynomialMap({ComplexPolynomial(CVec{-0.09, 0.0, 1.0}), ComplexPolynomial()}));
  const BathtubSolution sol = e_lambda(two, st);
  CHECK(sol.value >= 4 * kPi - 1e-9);
  CHECK(std::abs(sol.value - 4 * kPi) <= sol.row_error);
  CHECK(sol.row_error < 0.02 * sol.value);
}

TEST_CASE("test functions never beat the bathtub optimum") {
  const EndModel model(2, 1.0);
  const AcsField st = standard_cylindrical_acs(model);
  const PuncturedCurve c = z_z2();
  const BathtubSolution sol = e_lambda(c, st);
  numerics::Stream s(31);
  // random bumps are wider than 0.6 and live in [-13, 0]; one shared rule serves all of them
  const LambdaQuadrature quad(c, st, -13.5, 0.6);
  int violations = 0;
  for (int i = 0; i < 20; ++i) {
    const TestFunction phi = random_test_function(s);
    validate_test_function(phi);
    if (quad.integrate(phi.phi) > sol.value + 1e-9) ++violations;
  }
  CHECK(violations == 0);
  const double smooth = e_lambda_lower_bound(c, st, smoothed_indicator(sol, 0.02));
  CHECK(smooth <= sol.value + 1e-9);
  CHECK(smooth >= sol.value * (1 - 1e-3));
  TestFunction bad;
  bad.phi = [](double) { return 0.5; };
  bad.lo = -1.0;
  bad.hi = 0.0;
  CHECK_THROWS_AS(validate_test_function(bad), Error);
}

TEST_CASE("symplectic area") {
  const EndModel model(2, 1.0);
  for (double a : {0.5, 1.0, 2.0, 4.0}) {
    const SympValue v = e_symp_a(zk(1), a, model);
    CHECK(v.value == doctest::Approx(kPi * (1 - std::exp(-2 * a))).epsilon(1e-9));
    CHECK(v.shift == 0.0);
  }
  CHECK(std::abs(e_symp_a(zk(1), 0.0, model).value) < 1e-10);
  for (int k = 1; k <= 4; ++k) CHECK(e_symp_limit(zk(k)).value == doctest::Approx(k * kPi).epsilon(1e-10));
  CHECK(e_symp_a(zk(3), 12.0, model).value == doctest::Approx(3 * kPi).epsilon(1e-9));
  const PuncturedCurve constant = PuncturedCurve::polynomial(PolynomialMap({ComplexPolynomial(CVec{0.5}), ComplexPolynomial()}));
  CHECK(e_symp_limit(constant).value == 0.0);
}

TEST_CASE("Stokes cross-check") {
  const EndModel model(2, 1.0);
  const AcsField st = standard_cylindrical_acs(model);
  for (int k = 1; k <= 3; ++k) {
    const StokesResult r = stokes_crosscheck(zk(k), st, 3.0);
    CHECK(r.boundary == doctest::Approx(2 * kPi * k).epsilon(1e-10));
    CHECK(std::abs(r.interior) < 1e-10);
    CHECK(r.residual < 1e-6);
  }
  const StokesResult r = stokes_crosscheck(z_z2(), st, 4.0);
  CHECK(r.residual < 1e-3);
  CHECK(r.interior > 0.0);
}

TEST_CASE("energy report assembly") {
  const EndModel model(2, 1.0);
  const AcsField st = standard_cylindrical_acs(model);
  double prev = -1.0;
  for (double a : {0.5, 1.0, 2.0}) {
    const EnergyReport rep = energy_report(z_z2(), st, a);
    CHECK(rep.e_total_a == rep.e_symp_a + rep.e_omega + rep.e_lambda);
    CHECK(rep.e_omega >= -1e-9);
    CHECK(rep.e_lambda >= -1e-9);
    CHECK(rep.e_total_a >= prev - 1e-8);
    prev = rep.e_total_a;
  }
  const EnergyReport z = energy_report(zk(1), st, 2.0);
  CHECK(z.e_total_a == doctest::Approx(2 * kPi + kPi * (1 - std::exp(-4.0))).epsilon(1e-8));
}
