#include "doctest.h"

#include "hofer/forms.hpp"
#include "hofer/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace hofer;

namespace {

ChartPoint random_point(numerics::Stream& s, double lo, double hi) {
  return ChartPoint{s.uniform(lo, hi), s.unit_vector(4)};
}

}  // namespace

TEST_CASE("form algebra") {
  const EndModel model(2, 1.0);
  const AcsField st = standard_cylindrical_acs(model);
  const AcsField q = pushforward_acs(PolynomialDiffeo::quadratic(2), model);
  numerics::Stream s(11);
  for (const AcsField* j : {&st, &q}) {
    const std::vector<OneForm> ones{lambda_form(*j), sigma_form(*j), lambda_inf_form(*j), dr_form(model)};
    const std::vector<TwoForm> twos{d_lambda_inf_form(*j), omega_form(*j), sigma_lambda_form(*j),
                                    dr_lambda_inf_form(*j), omega_prime_form(model)};
    for (int k = 0; k < 100; ++k) {
      const ChartPoint p = random_point(s, -6.0, -0.1);
      const Vec x = s.normal() * s.unit_vector(4);
      const Vec y = s.normal() * s.unit_vector(4);
      const Vec z = s.normal() * s.unit_vector(4);
      const double a = s.normal();
      for (const OneForm& f : ones)
        CHECK(std::abs(f(p, a * x + y) - a * f(p, x) - f(p, y)) < 1e-10);
      for (const TwoForm& f : twos) {
        CHECK(std::abs(f(p, x, y) + f(p, y, x)) < 1e-10);
        CHECK(std::abs(f(p, a * x + z, y) - a * f(p, x, y) - f(p, z, y)) < 1e-10);
      }
    }
  }
}

TEST_CASE("exact and finite-difference d lambda agree") {
  const EndModel model(2, 1.0);
  const AcsField st = standard_cylindrical_acs(model);
  const TwoForm exact = d_lambda_inf_form(st);
  const TwoForm fd = d_lambda_inf_form_fd(st);
  numerics::Stream s(12);
  for (int k = 0; k < 100; ++k) {
    const ChartPoint p = random_point(s, -5.0, 0.0);
    const Vec x = s.unit_vector(4);
    const Vec y = s.unit_vector(4);
    CHECK(std::abs(exact(p, x, y) - fd(p, x, y)) < 1e-7);
  }
}

TEST_CASE("limit structure identities") {
  const EndModel model(2, 1.0);
  const AcsField st = standard_cylindrical_acs(model);
  const TwoForm dl = d_lambda_inf_form(st);
  const TwoForm om_inf = omega_inf_form(st);
  numerics::Stream s(13);
  for (int k = 0; k < 200; ++k) {
    const ChartPoint p = random_point(s, -5.0, 0.0);
    const Vec rinf = reeb_limit_field(st, p.v).sphere;
    const Vec y = s.unit_vector(4);
    CHECK(std::abs(dl(p, rinf, y)) < 1e-7);
    CHECK(std::abs(om_inf(p, p.v, y)) < 1e-12);
    CHECK(std::abs(om_inf(p, rinf, y)) < 1e-12);
    const FrameSplitting f = limit_splitting_at(st, p);
    const Vec xi = f.pi_xi * s.unit_vector(4);
    if (xi.norm() > 1e-3) CHECK(dl(p, xi, st.limit_eval(p) * xi) > 0.0);
  }
  // flow invariance of lambda_inf and omega_inf
  const OneForm l = lambda_inf_form(st);
  for (int k = 0; k < 50; ++k) {
    const Vec v = s.unit_vector(4);
    const double t = s.uniform(-4.0, 4.0);
    Vec w = s.unit_vector(4);
    w -= v.dot(w) * v;
    Vec w2 = s.unit_vector(4);
    w2 -= v.dot(w2) * v;
    const double h = 1e-6;
    auto push = [&](const Vec& dir) {
      const Vec plus = (v + h * dir).normalized();
      const Vec minus = (v - h * dir).normalized();
      return Vec((reeb_flow(st, plus, t) - reeb_flow(st, minus, t)) / (2 * h));
    };
    const Vec image = reeb_flow(st, v, t);
    const ChartPoint p0{0.0, v};
    const ChartPoint pt{0.0, image};
    CHECK(std::abs(l(pt, push(w)) - l(p0, w)) < 1e-8);
    CHECK(std::abs(om_inf(pt, push(w), push(w2)) - om_inf(p0, w, w2)) < 1e-8);
  }
}

TEST_CASE("omega from the limit") {
  const EndModel model(2, 1.0);
  const AcsField q = pushforward_acs(PolynomialDiffeo::quadratic(2), model);
  const TwoForm om_inf = omega_inf_form(q);
  numerics::Stream s(14);
  for (int k = 0; k < 200; ++k) {
    const ChartPoint p = random_point(s, -6.0, -0.5);
    const Mat jm = q.eval(p);
    const Vec x = s.unit_vector(4);
    const Vec y = s.unit_vector(4);
    CHECK(std::abs(omega_from_limit(q, om_inf, p, p.v, y)) < 1e-12);
    CHECK(std::abs(omega_from_limit(q, om_inf, p, jm * p.v, y)) < 1e-9);
    CHECK(std::abs(omega_from_limit(q, om_inf, p, jm * x, jm * y) - omega_from_limit(q, om_inf, p, x, y)) < 1e-9);
    const FrameSplitting f = splitting_at(q, p);
    const Vec xi = f.pi_xi * x;
    if (xi.norm() > 1e-3) CHECK(omega_from_limit(q, om_inf, p, xi, jm * xi) > 0.0);
  }
}

TEST_CASE("J-positivity infima") {
  const EndModel model(2, 1.0);
  const AcsField st = standard_cylindrical_acs(model);
  PositivityOptions opts;
  opts.samples = 4000;
  const TwoForm dl = d_lambda_inf_form(st);
  const TwoForm drl = dr_lambda_inf_form(st);
  const TwoForm sum{"sum", [&](const ChartPoint& p) -> Mat { return dl.matrix(p) + drl.matrix(p); }};
  CHECK(j_positivity_infimum(sum, st, 1.0, 7, opts) > 0.1);
  const double drl_inf = j_positivity_infimum(drl, st, 1.0, 7, opts);
  CHECK(drl_inf >= -1e-9);
  CHECK(drl_inf < 1e-6);
  CHECK(j_positivity_infimum(scaled(omega_form(st), -1.0), st, 1.0, 7, opts) < 0.0);
  CHECK(j_positivity_infimum(sum, st, 1.0, 7, opts) == j_positivity_infimum(sum, st, 1.0, 7, opts));
}

TEST_CASE("max ratio oracle") {
  // generalized-eigenvalue sup checked against the semidefinite characterization
  numerics::Stream s(15);
  for (int k = 0; k < 20; ++k) {
    Mat a = Mat::Zero(4, 4);
    Mat g = Mat::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int c = 0; c < 4; ++c) {
        a(i, c) = s.normal();
        g(i, c) = s.normal();
      }
    a = 0.5 * (a + a.transpose()).eval();
    const Mat b = g.transpose() * g + 0.1 * Mat::Identity(4, 4);
    const double exact = max_ratio(a, b, true);
    // lambda bounds |q_a| / q_b iff lambda b - a and lambda b + a are both PSD
    auto min_eig = [](const Mat& m) {
      Eigen::SelfAdjointEigenSolver<Mat> e(m, Eigen::EigenvaluesOnly);
      return e.eigenvalues()[0];
    };
    CHECK(min_eig(exact * b - a) > -1e-9);
    CHECK(min_eig(exact * b + a) > -1e-9);
    const double below = 0.999 * exact;
    CHECK(std::min(min_eig(below * b - a), min_eig(below * b + a)) < 0.0);
    double sampled = 0.0;
    for (int n = 0; n < 2000; ++n) {
      const Vec x = s.unit_vector(4);
      sampled = std::max(sampled, std::abs(x.dot(a * x)) / x.dot(b * x));
    }
    CHECK(sampled <= exact * (1 + 1e-12));
  }
  Mat neg = -Mat::Identity(4, 4);
  CHECK_THROWS_AS(max_ratio(Mat::Identity(4, 4), neg, false), Error);
}

TEST_CASE("positivity constants") {
  const EndModel model(2, 1.0);
  const AcsField st = standard_cylindrical_acs(model);
  PositivityOptions opts;
  opts.samples = 3000;
  const PositivityConstants cs = estimate_constants(st, 2.0, 42, opts);
  CHECK(cs.exactly_cylindrical);
  CHECK(cs.c2_raw == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(cs.c2 >= 1.0);
  CHECK(cs.c3 > 0.0);
  CHECK(cs.c4 > 0.0);
  CHECK(count_comparison_violations(st, cs, 20000, 99) == 0);

  const AcsField q = pushforward_acs(PolynomialDiffeo::quadratic(2), model);
  const PositivityConstants q4 = estimate_constants(q, 4.0, 42, opts);
  const PositivityConstants q8 = estimate_constants(q, 8.0, 42, opts);
  CHECK(q4.c2 >= 1.0);
  CHECK(q8.c2 <= q4.c2 + 1e-3);
  CHECK(count_comparison_violations(q, q4, 20000, 99) == 0);
  const PositivityConstants again = estimate_constants(q, 4.0, 42, opts);
  CHECK(again.c2 == q4.c2);
  CHECK(again.c3 == q4.c3);
  CHECK(again.c1 == q4.c1);
  const PositivityConstants qs = estimate_constants(q, 0.5, 42, opts);
  CHECK(count_comparison_violations(q, qs, 20000, 98) == 0);
}
