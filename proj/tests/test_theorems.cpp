#include "doctest.h"

#include "hofer/theorems.hpp"

#include <cmath>
#include <numbers>
#include <set>

using namespace hofer;

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> c = default_catalog(EndModel(2, 1.0));
  return c;
}

const CatalogEntry& entry(const std::string& id) {
  for (const auto& e : catalog())
    if (e.id == id) return e;
  FAIL("no catalog entry " << id);
  throw 0;
}

double value_of(const CheckRecord& rec, const std::string& name) {
  for (const auto& [n, v] : rec.values)
    if (n == name) return v.value;
  FAIL("no value " << name);
  return 0.0;
}

// (z^m (1 + c1 z), c2 z^n) with small random coefficients
CatalogEntry random_planarish(numerics::Stream& s, const AcsField& st) {
  const int m = 1 + static_cast<int>(s.uniform() * 3);
  const int n = m + 1 + static_cast<int>(s.uniform() * 2);
  const Complex c1(s.uniform(-0.3, 0.3), s.uniform(-0.3, 0.3));
  const Complex c2(s.uniform(-0.5, 0.5), s.uniform(-0.5, 0.5));
  CVec first(m + 2, 0.0);
  first[m] = 1.0;
  first[m + 1] = c1;
  CVec second(n + 1, 0.0);
  second[n] = c2;
  PolynomialMap map({ComplexPolynomial(first), ComplexPolynomial(second)});
  return {"random", "random", PuncturedCurve::polynomial(map), st};
}

}  // namespace

TEST_CASE("catalog shape") {
  const auto& c = catalog();
  CHECK(c.size() >= 20);
  std::set<std::string> ids;
  int pushforwards = 0;
  for (const auto& e : c) {
    ids.insert(e.id);
    if (e.family == "pushforward") ++pushforwards;
  }
  CHECK(ids.size() == c.size());
  CHECK(pushforwards >= 5);
  for (int k = 1; k <= 5; ++k) CHECK(total_multiplicity(entry("zk_" + std::to_string(k)).curve) == k);
  CHECK(total_multiplicity(entry("two_zeros").curve) == 2);
  CHECK(total_multiplicity(entry("z2_z3").curve) == 2);
  CHECK(total_multiplicity(entry("misses_p").curve) == 0);
}

TEST_CASE("monotonicity sweep") {
  std::vector<CatalogEntry> family;
  for (const auto& e : catalog())
    if (e.id == "zk_1" || e.id == "zk_3" || e.id == "z_z2" || e.id == "two_zeros" || e.id == "misses_p" ||
        e.id == "quadratic_zk_2")
      family.push_back(e);
  const std::vector<double> radii{0.2, 0.4, 0.8};
  const MonotonicityReport rep = monotonicity_sweep(family, radii);
  REQUIRE(rep.skipped.size() == 1);
  CHECK(rep.skipped[0] == "misses_p");
  for (const auto& row : rep.rows) {
    REQUIRE(row.status == "ok");
    CHECK(row.ratio >= kPi * row.r * row.r * (1 - 1e-6));
    if (row.curve == "zk_1" || row.curve == "zk_3")
      CHECK(row.ratio == doctest::Approx(kPi * row.r * row.r).epsilon(1e-9));
  }
  for (std::size_t i = 0; i < radii.size(); ++i)
    CHECK(rep.hbar[i] == doctest::Approx(kPi * radii[i] * radii[i]).epsilon(1e-7));
  CHECK(rep.fit_exponent == doctest::Approx(2.0).epsilon(1e-6));
  const MonotonicityRow outside = check_monotonicity(entry("zk_1"), 1.5);
  CHECK(outside.status == "outside_domain");
}

TEST_CASE("monotonicity holds on random curves through p") {
  const AcsField st = standard_cylindrical_acs(EndModel(2, 1.0));
  numerics::Stream s(2024);
  for (int i = 0; i < 12; ++i) {
    const CatalogEntry e = random_planarish(s, st);
    const double r = std::min(0.5, 0.9 * boundary_clearance(e.curve));
    const MonotonicityRow row = check_monotonicity(e, r);
    REQUIRE(row.status == "ok");
    CHECK(row.ratio >= kPi * r * r * (1 - 1e-6));
  }
}

TEST_CASE("corollary") {
  const MonotonicityReport rep = monotonicity_sweep(catalog(), {0.5, 1.0});
  for (const auto& id : {"zk_1", "zk_4"}) {
    const CheckRecord c = check_corollary(entry(id), rep);
    CHECK(c.status == "pass");
    CHECK(c.note == "extremal");
    CHECK(value_of(c, "working_radius") == 1.0);
  }
  const CheckRecord zz = check_corollary(entry("z_z2"), rep);
  CHECK(zz.status == "pass");
  CHECK(value_of(zz, "slack") > 0.1);
  CHECK(check_corollary(entry("misses_p"), rep).note == "curve misses p: k = 0");
}

TEST_CASE("energy bound on the simple trivial cylinder") {
  const CatalogEntry& e = entry("zk_1");
  const PositivityConstants c = estimate_constants(e.j, 1.0, 7);
  const BoundCheck b = check_energy_bound(e, c, 2.0);
  // closed forms: E_symp,2 = pi (1 - e^-4), E_omega = 0, E_lambda = action = 2 pi
  const double symp = kPi * (1 - std::exp(-4.0));
  CHECK(b.e_symp_a == doctest::Approx(symp).epsilon(1e-9));
  CHECK(b.lhs == doctest::Approx(symp + 2 * kPi).epsilon(1e-7));
  CHECK(b.rhs == doctest::Approx((c.c4 + 1) * symp - 4 * c.c2 * 2 * kPi).epsilon(1e-7));
  CHECK(b.margin > 0.0);
  const double closed = 2 * kPi / (c.c4 * symp - 4 * c.c2 * 2 * kPi);
  CHECK(b.breaking_factor == doctest::Approx(closed).epsilon(1e-6));
  CHECK(b.breaking_factor_closed == doctest::Approx(closed).epsilon(1e-6));
  CHECK(b.ok());
  // at the breaking factor the margin vanishes
  PositivityConstants scaled = c;
  scaled.c2 *= b.breaking_factor;
  scaled.c4 *= b.breaking_factor;
  const BoundCheck at = check_energy_bound(e, scaled, 2.0);
  CHECK(std::abs(at.margin) < 1e-6 * at.lhs);
}

TEST_CASE("structure checks") {
  const EndModel model(2, 1.0);
  for (const AcsField& j : {standard_cylindrical_acs(model),
                            pushforward_acs(PolynomialDiffeo::quadratic(2), model),
                            pushforward_acs(PolynomialDiffeo::cubic(2), model)}) {
    const CheckRecord rec = check_structure(j, 11);
    CHECK(rec.status == "pass");
    CHECK(value_of(rec, "j_squared_residual") < 1e-8);
    CHECK(value_of(rec, "flow_invariance_residual") < 1e-8);
  }
}

TEST_CASE("pullback positivity, convergence and Stokes on catalog curves") {
  for (const auto& id : {"zk_2", "z_z2", "quadratic_z2_z3", "cubic_zk_1"}) {
    const CatalogEntry& e = entry(id);
    const CheckRecord pos = check_pullback_positivity(e, 40);
    CHECK(pos.status == "pass");
    CHECK(value_of(pos, "min_omega_density") >= -1e-9);
    CHECK(value_of(pos, "min_sigma_lambda_density") >= -1e-9);
    CHECK(check_convergence(e).status == "pass");
    const CheckRecord st = check_stokes(e, {3.0});
    CHECK(st.status == "pass");
  }
  const CheckRecord conv = check_convergence(entry("zk_3"));
  CHECK(value_of(conv, "orbit_multiplicity") == 3);
  CHECK(value_of(conv, "period_t") == doctest::Approx(6 * kPi).epsilon(1e-8));
  CHECK(check_convergence(entry("misses_p")).status == "skipped");
  CHECK(check_stokes(entry("misses_p"), {3.0}).status == "skipped");
}

TEST_CASE("finiteness equivalences") {
  const CheckRecord z = check_finiteness_equivalences(entry("zk_1"));
  CHECK(z.status == "pass");
  CHECK(value_of(z, "e_symp_limit") == doctest::Approx(kPi).epsilon(1e-9));
  CHECK(check_finiteness_equivalences(entry("misses_p")).status == "not_applicable");
  const AcsField st = standard_cylindrical_acs(EndModel(2, 1.0));
  const CatalogEntry constant{
      "constant", "constant",
      PuncturedCurve::polynomial(PolynomialMap({ComplexPolynomial(CVec{0.5}), ComplexPolynomial()})), st};
  CHECK(check_finiteness_equivalences(constant).status == "excluded");
}
