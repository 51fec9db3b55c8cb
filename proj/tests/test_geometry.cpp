#include "doctest.h"

#include "hofer/geometry.hpp"
#include "hofer/numerics.hpp"

#include <cmath>
#include <numbers>

using namespace hofer;

namespace {

constexpr double kPi = std::numbers::pi;

Vec e1(int dim) {
  Vec v = Vec::Zero(dim);
  v[0] = 1.0;
  return v;
}

Vec random_unit(numerics::Stream& s, int dim) { return s.unit_vector(dim); }

}  // namespace

TEST_CASE("chart maps") {
  const EndModel model(2, 1.0);
  const ChartPoint p = chart_to_cylinder(model, {1.0 / std::exp(1.0), 0.0});
  CHECK(p.r == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK((p.v - e1(4)).norm() < 1e-15);

  const ChartPoint q = chart_to_cylinder(model, {0.0, Complex(0.0, 0.5)});
  CHECK(q.r == doctest::Approx(-std::log(2.0)));
  CHECK(std::abs(q.v[3] - 1.0) < 1e-15);

  CHECK_THROWS_AS(chart_to_cylinder(model, {0.0, 0.0}), Error);
  CHECK_THROWS_AS(chart_to_cylinder(model, {1.0, 0.0}), Error);

  numerics::Stream s(1);
  for (int k = 0; k < 1000; ++k) {
    const Vec x = 0.999 * s.uniform() * s.unit_vector(4);
    const CVec z = to_complex(x);
    const CVec back = cylinder_to_chart(model, chart_to_cylinder(model, z));
    CHECK((to_real(back) - x).norm() < 1e-12);
  }

  const CVec z = cylinder_to_chart(model, ChartPoint{-1.0, e1(4)});
  CHECK(std::abs(z[0] - std::exp(-1.0)) < 1e-15);
  double prev = 1.0;
  for (double r = 0.0; r > -30.0; r -= 1.0) {
    const double m = cylinder_to_chart_real(model, ChartPoint{r, e1(4)}).norm();
    CHECK(m <= prev);
    prev = m;
  }
}

TEST_CASE("standard structure") {
  const EndModel model(2, 1.0);
  const AcsField j = standard_cylindrical_acs(model);
  numerics::Stream s(2);
  for (int k = 0; k < 1000; ++k) {
    const ChartPoint p{-10.0 * s.uniform(), random_unit(s, 4)};
    const Mat m = j.eval(p);
    CHECK((m * m + Mat::Identity(4, 4)).norm() < 1e-12);
    for (double shift : {-5.0, -1.0, -0.1})
      CHECK((j.eval(ChartPoint{p.r + shift, p.v}) - m).norm() == 0.0);
  }
  // J(d/dr) at e1 is the rotation field i v
  const TangentVector r = reeb_limit_field(j, e1(4));
  CHECK(std::abs(r.dr) < 1e-15);
  CHECK((r.sphere - (Vec(4) << 0, 1, 0, 0).finished()).norm() < 1e-15);
}

TEST_CASE("pushforward structures") {
  const EndModel model(2, 1.0);
  numerics::Stream s(3);
  const AcsField id = pushforward_acs(PolynomialDiffeo::identity(2), model);
  const AcsField st = standard_cylindrical_acs(model);
  for (const auto& phi : {PolynomialDiffeo::quadratic(2), PolynomialDiffeo::cubic(2)}) {
    const AcsField j = pushforward_acs(phi, model);
    for (int k = 0; k < 300; ++k) {
      const ChartPoint p{-8.0 * s.uniform() - 0.01, random_unit(s, 4)};
      const Mat m = j.eval(p);
      CHECK((m * m + Mat::Identity(4, 4)).norm() < 1e-9);
      CHECK((id.eval(p) - st.eval(p)).norm() < 1e-12);
    }
  }
  // inverse round trip and an analytic Jacobian check
  const auto phi = PolynomialDiffeo::quadratic(2, 0.2);
  for (int k = 0; k < 100; ++k) {
    const CVec w = to_complex(0.9 * s.uniform() * s.unit_vector(4));
    CHECK((to_real(phi.inverse(phi(w))) - to_real(w)).norm() < 1e-13);
    const Mat jac = phi.jacobian(w);
    for (int c = 0; c < 4; ++c) {
      Vec dir = Vec::Zero(4);
      dir[c] = 1.0;
      const double h = 1e-6;
      const Vec fd = (to_real(phi(to_complex(to_real(w) + h * dir))) -
                      to_real(phi(to_complex(to_real(w) - h * dir)))) / (2 * h);
      CHECK((fd - jac.col(c)).norm() < 1e-8);
    }
  }
  DiffeoTerm linear;
  linear.component = 0;
  linear.coeff = 1.0;
  linear.holo_powers = {1, 0};
  CHECK_THROWS_AS(PolynomialDiffeo(2, {linear}, "bad"), Error);
  // a fold: w + w conj(w)^... singular inside the ball
  DiffeoTerm fold;
  fold.component = 0;
  fold.coeff = -3.0;
  fold.holo_powers = {1, 0};
  fold.anti_powers = {1, 0};
  CHECK_THROWS_AS(pushforward_acs(PolynomialDiffeo(2, {fold}, "fold"), model), Error);
}

TEST_CASE("frame splitting") {
  const EndModel model(2, 1.0);
  numerics::Stream s(4);
  const AcsField st = standard_cylindrical_acs(model);
  const AcsField q = pushforward_acs(PolynomialDiffeo::quadratic(2), model);
  for (const AcsField* j : {&st, &q}) {
    for (int k = 0; k < 300; ++k) {
      const ChartPoint p{-6.0 * s.uniform() - 0.01, random_unit(s, 4)};
      const FrameSplitting f = splitting_at(*j, p);
      CHECK(std::abs(f.lambda_of(f.reeb) - 1.0) < 1e-10);
      CHECK(std::abs(f.lambda_of(f.radial)) < 1e-10);
      CHECK(std::abs(f.sigma_of(f.radial) - 1.0) < 1e-10);
      CHECK(std::abs(f.sigma_of(f.reeb)) < 1e-10);
      CHECK((f.pi_xi * f.pi_xi - f.pi_xi).norm() < 1e-10);
      CHECK((f.pi_xi * f.radial).norm() < 1e-10);
      CHECK((f.pi_xi * f.reeb).norm() < 1e-10);
      Eigen::JacobiSVD<Mat> svd(f.pi_xi);
      CHECK(svd.singularValues()[1] > 1e-6);
      CHECK(svd.singularValues()[2] < 1e-10);
      const Vec x = s.unit_vector(4);
      const Vec rebuilt = f.sigma_of(x) * f.radial + f.lambda_of(x) * f.reeb + f.pi_xi * x;
      CHECK((rebuilt - x).norm() < 1e-9);
      // xi is J-invariant and tangent to the level set
      const Mat jm = j->eval(p);
      for (int c = 0; c < 2; ++c) {
        const Vec xi = f.xi_basis.col(c);
        CHECK(std::abs(p.v.dot(xi)) < 1e-10);
        CHECK((f.pi_xi * (jm * xi) - jm * xi).norm() < 1e-9);
      }
    }
  }
  // deep pushforward frame is close to the standard frame
  for (int k = 0; k < 50; ++k) {
    const ChartPoint p{-6.0, random_unit(s, 4)};
    const FrameSplitting a = splitting_at(q, p);
    const FrameSplitting b = splitting_at(st, p);
    CHECK((a.reeb - b.reeb).norm() < 1e-3);
    CHECK((a.lambda - b.lambda).norm() < 1e-3);
    CHECK((a.pi_xi - b.pi_xi).norm() < 1e-3);
  }
  // a structure with J(d/dr) = d/dr direction is rejected
  Mat bad = Mat::Zero(4, 4);
  bad(0, 0) = 1.0;
  CHECK_THROWS_AS(splitting_from_matrix(bad, ChartPoint{-1.0, e1(4)}), Error);
}

TEST_CASE("reeb flow and actions") {
  const EndModel model(2, 1.0);
  const AcsField st = standard_cylindrical_acs(model);
  numerics::Stream s(5);
  const Vec v0 = e1(4);
  CHECK((reeb_flow(st, v0, 0.0) - v0).norm() == 0.0);
  for (int k = 0; k < 20; ++k) {
    const Vec v = s.unit_vector(4);
    const double t = s.uniform(-10.0, 10.0);
    // closed form: multiplication by e^{it}
    const CVec zc = to_complex(v);
    CVec rotated(zc.size());
    for (std::size_t c = 0; c < zc.size(); ++c) rotated[c] = std::polar(1.0, t) * zc[c];
    const Vec flowed = reeb_flow(st, v, t);
    CHECK((flowed - to_real(rotated)).norm() < 1e-9);
    CHECK(std::abs(flowed.norm() - 1.0) < 1e-14);
  }
  const double period = simple_period(st, v0);
  CHECK(period == doctest::Approx(2 * kPi).epsilon(1e-10));
  CHECK((reeb_flow(st, v0, period) - v0).norm() < 1e-9);

  // period constancy over a smooth family and random starts
  for (int k = 0; k < 20; ++k) {
    const double p = simple_period(st, s.unit_vector(4));
    CHECK(std::abs(p - period) < 1e-8);
  }

  const ReebOrbit simple = reeb_orbit_through(st, v0, 1);
  CHECK(simple.action == doctest::Approx(2 * kPi).epsilon(1e-6));
  for (int k = 2; k <= 5; ++k) {
    const ReebOrbit cover = reeb_orbit_through(st, v0, k);
    CHECK(std::abs(cover.action - k * simple.action) < 1e-8);
  }
  ReebOrbit constant;
  constant.period = 1.0;
  constant.loop = [v0](double) { return v0; };
  CHECK(std::abs(orbit_action(st, constant)) < 1e-15);
  ReebOrbit open;
  open.period = 1.0;
  open.loop = [&](double t) { return reeb_flow(st, v0, t); };
  CHECK_THROWS_AS(orbit_action(st, open), Error);

  // the pushforward has the same limit field
  const AcsField q = pushforward_acs(PolynomialDiffeo::quadratic(2), model);
  for (int k = 0; k < 100; ++k) {
    const Vec v = s.unit_vector(4);
    CHECK((reeb_limit_field(q, v).sphere - reeb_limit_field(st, v).sphere).norm() == 0.0);
    CHECK(std::abs(reeb_limit_field(st, v).dr) < 1e-10);
  }
}

TEST_CASE("decay fits") {
  const EndModel model(2, 1.0);
  const std::vector<double> depths{-8, -7, -6, -5, -4, -3, -2, -1};
  const DecayEstimate st = acc1_decay_estimate(standard_cylindrical_acs(model), depths, 0);
  CHECK(st.exactly_cylindrical);
  const DecayEstimate q = acc1_decay_estimate(pushforward_acs(PolynomialDiffeo::quadratic(2), model), depths, 0);
  CHECK(q.delta >= 0.9);
  CHECK(q.delta <= 1.1);
  CHECK_FALSE(q.non_decaying);
  const DecayEstimate c = acc1_decay_estimate(pushforward_acs(PolynomialDiffeo::cubic(2), model), depths, 0);
  CHECK(c.delta >= 1.8);
  CHECK(c.delta <= 2.2);
  const DecayEstimate q1 = acc1_decay_estimate(pushforward_acs(PolynomialDiffeo::quadratic(2), model), depths, 1, 16);
  CHECK(q1.delta == doctest::Approx(1.0).epsilon(0.1));
  const std::vector<double> shallow{-1.5, -0.5};
  CHECK_THROWS_AS(acc1_decay_estimate(standard_cylindrical_acs(model), shallow, 0), Error);
}
