#include "hofer/curves.hpp"

#include "hofer/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hofer {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

struct PuncturedCurve::Impl {
  Variant variant = Variant::polynomial;
  std::string name;
  // disk variants
  PolynomialMap base;
  std::optional<PolynomialDiffeo> phi;
  double radius = 1.0;
  // cylinder variant
  EndModel model;
  JetFn jet;
  std::optional<Complex> puncture;
  Complex seed = 0.0;
  double scale = 0.0;
};

PuncturedCurve::PuncturedCurve(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

PuncturedCurve PuncturedCurve::polynomial(PolynomialMap map, double domain_radius, std::string name) {
  if (!(domain_radius > 0.0)) throw Error(ErrorKind::validation, "domain radius must be positive");
  auto impl = std::make_shared<Impl>();
  impl->variant = Variant::polynomial;
  impl->name = std::move(name);
  impl->base = std::move(map);
  impl->radius = domain_radius;
  return PuncturedCurve(std::move(impl));
}

PuncturedCurve PuncturedCurve::pushforward(PolynomialDiffeo phi, PolynomialMap base,
                                           double domain_radius, std::string name) {
  if (phi.complex_dim() != base.complex_dim())
    throw Error(ErrorKind::validation, "Phi and the curve disagree on N");
  auto impl = std::make_shared<Impl>();
  impl->variant = phi.is_identity() ? Variant::polynomial : Variant::pushforward;
  impl->name = std::move(name);
  impl->base = std::move(base);
  if (!phi.is_identity()) impl->phi = std::move(phi);
  impl->radius = domain_radius;
  return PuncturedCurve(std::move(impl));
}

namespace {

// Richardson-refined centered difference of a vector-valued function
template <class F>
Vec vector_derivative(const F& f, double x, double h) {
  const Vec d1 = (f(x + h) - f(x - h)) / (2.0 * h);
  const Vec d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

PuncturedCurve PuncturedCurve::cylinder(const EndModel& model, ScalarFn a, SphereFn u, std::string name) {
  auto jet = [a, u](double s, double t) {
    const double h = 1e-4;
    auto euler = [&](double ss, double tt) {
      Vec x(u(ss, tt).size() + 1);
      x[0] = a(ss, tt);
      x.tail(x.size() - 1) = u(ss, tt);
      return x;
    };
    const Vec ds = vector_derivative([&](double x) { return euler(x, t); }, s, h);
    const Vec dt = vector_derivative([&](double x) { return euler(s, x); }, t, h);
    CylinderJet j;
    j.point = ChartPoint{a(s, t), u(s, t)};
    const int dim = static_cast<int>(j.point.v.size());
    j.xs = ds[0] * j.point.v + ds.tail(dim);
    j.xt = dt[0] * j.point.v + dt.tail(dim);
    return j;
  };
  return cylinder_from_jets(model, jet, std::move(name));
}

PuncturedCurve PuncturedCurve::cylinder_from_jets(const EndModel& model, JetFn jet, std::string name) {
  auto impl = std::make_shared<Impl>();
  impl->variant = Variant::cylinder;
  impl->name = std::move(name);
  impl->model = model;
  impl->jet = std::move(jet);
  return PuncturedCurve(std::move(impl));
}

PuncturedCurve::Variant PuncturedCurve::variant() const { return impl_->variant; }
const std::string& PuncturedCurve::name() const { return impl_->name; }

int PuncturedCurve::complex_dim() const {
  return is_disk() ? impl_->base.complex_dim() : impl_->model.complex_dim;
}

double PuncturedCurve::domain_radius() const { return impl_->radius; }
const PolynomialMap& PuncturedCurve::base() const { return impl_->base; }
const PolynomialDiffeo* PuncturedCurve::diffeo() const { return impl_->phi ? &*impl_->phi : nullptr; }

CVec PuncturedCurve::map(Complex zeta) const {
  if (!is_disk()) throw Error(ErrorKind::validation, "map() needs a disk curve");
  const CVec z = impl_->base(zeta);
  return impl_->phi ? (*impl_->phi)(z) : z;
}

std::pair<Vec, Vec> PuncturedCurve::partials(Complex zeta) const {
  if (!is_disk()) throw Error(ErrorKind::validation, "partials() needs a disk curve");
  const CVec d = impl_->base.derivative(zeta);
  CVec di(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) di[k] = Complex(0.0, 1.0) * d[k];
  Vec zx = to_real(d);
  Vec zy = to_real(di);
  if (impl_->phi) {
    const Mat a = impl_->phi->jacobian(impl_->base(zeta));
    zx = a * zx;
    zy = a * zy;
  }
  return {zx, zy};
}

const EndModel& PuncturedCurve::model() const { return impl_->model; }

CylinderJet PuncturedCurve::jet(double s, double t) const {
  if (is_disk()) throw Error(ErrorKind::validation, "jet() needs a cylinder curve");
  return impl_->jet(s, t);
}

double PuncturedCurve::a(double s, double t) const { return jet(s, t).point.r; }
Vec PuncturedCurve::u(double s, double t) const { return jet(s, t).point.v; }
std::optional<Complex> PuncturedCurve::puncture() const { return impl_->puncture; }
Complex PuncturedCurve::chart_center() const { return impl_->seed; }
double PuncturedCurve::cylinder_scale() const { return impl_->scale; }

PuncturedCurve PuncturedCurve::reparametrized(double s0, double t0) const {
  if (is_disk()) throw Error(ErrorKind::validation, "reparametrization needs a cylinder curve");
  auto impl = std::make_shared<Impl>(*impl_);
  const JetFn inner = impl_->jet;
  impl->jet = [inner, s0, t0](double s, double t) { return inner(s + s0, t + t0); };
  return PuncturedCurve(std::move(impl));
}

// ---------------------------------------------------------------------------
// Multiplicity

int projected_winding(const PuncturedCurve& curve, Complex center, double radius, std::uint64_t seed) {
  numerics::Stream s(seed);
  const int n = curve.complex_dim();
  CVec ell(n);
  for (int k = 0; k < n; ++k) ell[k] = Complex(s.normal(), s.normal());
  auto f = [&](double theta) {
    const CVec z = curve.map(center + std::polar(radius, theta));
    Complex acc = 0.0;
    for (int k = 0; k < n; ++k) acc += ell[k] * z[k];
    return acc;
  };
  for (int steps = 1024; steps <= (1 << 18); steps *= 4) {
    double total = 0.0;
    bool coarse = false;
    Complex prev = f(0.0);
    for (int i = 1; i <= steps; ++i) {
      const Complex next = f(kTwoPi * i / steps);
      if (next == Complex(0.0) || prev == Complex(0.0))
        throw Error(ErrorKind::geometry, "projection vanishes on the winding circle");
      const double d = std::arg(next / prev);
      if (std::abs(d) > 0.5) coarse = true;
      total += d;
      prev = next;
    }
    if (!coarse) return static_cast<int>(std::lround(total / kTwoPi));
  }
  throw Error(ErrorKind::geometry, "winding number did not resolve");
}

std::vector<MultiplicityRecord> multiplicity_at_point(const PuncturedCurve& curve, std::uint64_t seed) {
  if (!curve.is_disk()) throw Error(ErrorKind::validation, "multiplicity needs a disk curve");
  const PolynomialMap& map = curve.base();
  if (map.is_zero()) throw Error(ErrorKind::validation, "curve vanishes identically");
  const auto& comps = map.components();
  const ComplexPolynomial* first = nullptr;
  for (const auto& c : comps)
    if (!c.is_zero()) {
      first = &c;
      break;
    }
  const double radius = curve.domain_radius();

  // generic projection for the winding oracle and its roots for the circle radius
  numerics::Stream s(seed);
  CVec ell(comps.size());
  for (auto& l : ell) l = Complex(s.normal(), s.normal());
  std::size_t len = 0;
  for (const auto& c : comps) len = std::max(len, c.coeffs().size());
  CVec proj(len, 0.0);
  for (std::size_t m = 0; m < comps.size(); ++m)
    for (std::size_t i = 0; i < comps[m].coeffs().size(); ++i) proj[i] += ell[m] * comps[m].coeffs()[i];
  const auto proj_roots = ComplexPolynomial(proj).roots();

  std::vector<MultiplicityRecord> out;
  for (const auto& root : first->roots()) {
    const Complex z0 = root.value;
    bool common = true;
    for (const auto& c : comps) {
      double scale = 0.0;
      for (const Complex& a : c.coeffs()) scale = std::max(scale, std::abs(a));
      scale *= std::pow(std::max(1.0, std::abs(z0)), std::max(0, c.degree()));
      if (std::abs(c(z0)) > 1e-10 * std::max(1.0, scale)) common = false;
    }
    if (!common) continue;
    if (std::abs(std::abs(z0) - radius) < 1e-9)
      throw Error(ErrorKind::ill_posed_domain, "zero on the domain boundary");
    if (std::abs(z0) > radius) continue;
    MultiplicityRecord rec;
    rec.puncture = z0;
    rec.order = std::numeric_limits<int>::max();
    for (const auto& c : comps)
      if (!c.is_zero()) rec.order = std::min(rec.order, c.vanishing_order(z0));
    double circle = std::min(0.1, 0.5 * (radius - std::abs(z0)));
    for (const auto& pr : proj_roots) {
      const double d = std::abs(pr.value - z0);
      if (d > 1e-6) circle = std::min(circle, 0.5 * d);
    }
    rec.winding_check = projected_winding(curve, z0, circle, seed);
    out.push_back(rec);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cylinder reparametrization

PuncturedCurve end_chart(const PuncturedCurve& curve, Complex q, double c, const EndModel& model,
                         bool is_puncture) {
  if (!curve.is_disk()) throw Error(ErrorKind::validation, "end_chart needs a disk curve");
  const PolynomialMap shifted = curve.base().shifted(q);
  const std::optional<PolynomialDiffeo> phi =
      curve.diffeo() ? std::optional<PolynomialDiffeo>(*curve.diffeo()) : std::nullopt;
  auto jet = [shifted, phi, c, model](double s, double t) {
    const Complex w = c * std::exp(kTwoPi * s) * std::polar(1.0, kTwoPi * t);
    const Complex dw_ds = kTwoPi * w;
    const CVec zc = shifted(w);
    const CVec dz = shifted.derivative(w);
    CVec zs(dz.size());
    CVec zt(dz.size());
    for (std::size_t k = 0; k < dz.size(); ++k) {
      zs[k] = dz[k] * dw_ds;
      zt[k] = dz[k] * Complex(0.0, 1.0) * dw_ds;
    }
    Vec x = to_real(zc);
    Vec xs = to_real(zs);
    Vec xt = to_real(zt);
    if (phi) {
      const Mat a = phi->jacobian(zc);
      x = to_real((*phi)(zc));
      xs = a * xs;
      xt = a * xt;
    }
    const double n = x.norm();
    if (n == 0.0) throw Error(ErrorKind::domain, "evaluation at the puncture");
    CylinderJet j;
    j.point = ChartPoint{std::log(n) - std::log(model.chart_radius), x / n};
    j.xs = xs / n;
    j.xt = xt / n;
    return j;
  };
  PuncturedCurve out = PuncturedCurve::cylinder_from_jets(model, jet, curve.name());
  auto impl = std::make_shared<PuncturedCurve::Impl>(*out.impl_);
  if (is_puncture) impl->puncture = q;
  impl->scale = c;
  impl->seed = q;
  return PuncturedCurve(std::move(impl));
}

PuncturedCurve to_cylinder(const PuncturedCurve& curve, Complex q, const EndModel& model) {
  if (!curve.is_disk()) throw Error(ErrorKind::validation, "to_cylinder needs a disk curve");
  if (curve.complex_dim() != model.complex_dim)
    throw Error(ErrorKind::validation, "curve and end model disagree on N");
  const auto records = multiplicity_at_point(curve);
  double c_max = curve.domain_radius() - std::abs(q);
  bool found = false;
  for (const auto& r : records) {
    const double d = std::abs(r.puncture - q);
    if (d < 1e-9) {
      found = true;
    } else {
      c_max = std::min(c_max, 0.999 * d);
    }
  }
  if (!found) throw Error(ErrorKind::validation, "q is not a puncture of the curve");

  const PolynomialMap shifted = curve.base().shifted(q);
  const std::optional<PolynomialDiffeo> phi =
      curve.diffeo() ? std::optional<PolynomialDiffeo>(*curve.diffeo()) : std::nullopt;
  auto image = [shifted, phi](Complex w) {
    const CVec z = shifted(w);
    return phi ? (*phi)(z) : z;
  };
  const double eps = model.chart_radius;
  auto excess = [&](double c) {
    double m = 0.0;
    for (int i = 0; i < 512; ++i) m = std::max(m, to_real(image(std::polar(c, kTwoPi * i / 512))).norm());
    return m - eps;
  };
  double c = c_max;
  if (excess(c_max) > 1e-14 * eps) {
    double lo = 0.0;
    double hi = c_max;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid) > 0.0 ? hi : lo) = mid;
    }
    c = lo;
  }
  if (!(c > 0.0)) throw Error(ErrorKind::geometry, "no cylinder scale keeps the image in the chart ball");

  return end_chart(curve, q, c, model, true);
}

double cr_residual(const PuncturedCurve& cylinder, const AcsField& j, const CylinderGrid& grid) {
  double worst = 0.0;
  for (int i = 0; i < grid.ns; ++i) {
    const double s = grid.s_min + (i + 0.5) * (grid.s_max - grid.s_min) / grid.ns;
    for (int k = 0; k < grid.nt; ++k) {
      const double t = (k + 0.5) / grid.nt;
      const CylinderJet jet = cylinder.jet(s, t);
      worst = std::max(worst, (jet.xt - j.eval(jet.point) * jet.xs).norm());
    }
  }
  return worst;
}

double pullback_density(const PuncturedCurve& cylinder, const TwoForm& form, double s, double t) {
  return pullback_density(form, cylinder.jet(s, t));
}

// ---------------------------------------------------------------------------
// Asymptotics

AsymptoticOrbit asymptotic_orbit(const PuncturedCurve& cylinder, const AcsField& j,
                                 std::span<const double> s_depths) {
  std::vector<double> depths(s_depths.begin(), s_depths.end());
  std::sort(depths.begin(), depths.end());
  if (depths.size() < 3 || depths.back() > -2.0)
    throw Error(ErrorKind::validation, "need at least 3 depths, all s <= -2");
  const int nt = 64;
  auto mean_a = [&](double s) {
    numerics::CompensatedSum sum;
    for (int k = 0; k < nt; ++k) sum.add(cylinder.a(s, static_cast<double>(k) / nt));
    return sum.value() / nt;
  };
  std::vector<double> means;
  for (double s : depths) means.push_back(mean_a(s));
  const numerics::LineFit fit = numerics::fit_line(depths, means);
  const double period_t = fit.slope;
  for (std::size_t i = 0; i + 1 < depths.size(); ++i) {
    const double slope = (means[i + 1] - means[i]) / (depths[i + 1] - depths[i]);
    if (std::abs(slope - period_t) > 0.05 * std::abs(period_t))
      throw Error(ErrorKind::not_converged, "slopes of a(s, .) disagree between depths");
  }
  if (!(std::abs(period_t) > 0.0)) throw Error(ErrorKind::not_converged, "a(s, .) does not grow");

  AsymptoticOrbit out;
  out.period_t = period_t;
  out.depths = depths;
  const double s_ref = depths.front() - 3.0;
  const double period = std::abs(period_t);
  const Vec start = cylinder.u(s_ref, 0.0);
  const double simple = simple_period(j, start, 4.0 * period + 50.0);
  out.orbit.period = period;
  out.orbit.multiplicity = std::max(1, static_cast<int>(std::lround(period / simple)));
  out.orbit.loop = [cylinder, s_ref, period](double tau) { return cylinder.u(s_ref, tau / period); };
  out.orbit.action = orbit_action(j, out.orbit);

  // the limit loop must be a trajectory of the limit Reeb field
  for (int k = 0; k < 32; ++k) {
    const double tau = period * k / 32.0;
    const double h = 1e-5 * period;
    const Vec d = vector_derivative([&](double x) { return out.orbit.loop(x); }, tau, h);
    const Vec r = reeb_limit_field(j, out.orbit.loop(tau)).sphere;
    out.reeb_residual = std::max(out.reeb_residual, (d - r).norm());
  }

  std::vector<double> xs;
  std::vector<double> ys;
  for (double s : depths) {
    double sup = 0.0;
    for (int k = 0; k < nt; ++k) {
      const double t = static_cast<double>(k) / nt;
      sup = std::max(sup, (cylinder.u(s, t) - cylinder.u(s_ref, t)).norm());
    }
    out.residuals.push_back(sup);
    if (sup > 1e-13) {
      xs.push_back(s);
      ys.push_back(std::log(sup));
    }
  }
  if (xs.size() >= 2) {
    const numerics::LineFit decay = numerics::fit_line(xs, ys);
    out.decay_rate_s = decay.slope;
    out.decay_rate = decay.slope / period;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Areas

double disk_area_density(const PuncturedCurve& curve, Complex zeta) {
  const auto [zx, zy] = curve.partials(zeta);
  return omega_standard(zx, zy);
}

double boundary_clearance(const PuncturedCurve& curve, int samples) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i)
    m = std::min(m, to_real(curve.map(std::polar(curve.domain_radius(), kTwoPi * i / samples))).norm());
  return m;
}

AreaResult preimage_area(const PuncturedCurve& curve, double radius) {
  if (!curve.is_disk()) throw Error(ErrorKind::validation, "area needs a disk curve");
  std::vector<Complex> seeds;
  for (const auto& rec : multiplicity_at_point(curve)) seeds.push_back(rec.puncture);
  if (seeds.empty()) seeds.push_back(0.0);
  const double dom = curve.domain_radius();
  const double r2 = radius * radius;

  AreaResult out;
  for (std::size_t js = 0; js < seeds.size(); ++js) {
    const Complex q = seeds[js];
    // ray integral over the Voronoi cell of q intersected with the domain disk
    auto ray = [&](double theta) {
      const Complex e = std::polar(1.0, theta);
      const double b = (std::conj(q) * e).real();
      double rho_max = -b + std::sqrt(std::max(0.0, b * b - std::norm(q) + dom * dom));
      for (std::size_t m = 0; m < seeds.size(); ++m) {
        if (m == js) continue;
        const Complex d = seeds[m] - q;
        const double proj = (e * std::conj(d)).real();
        if (proj > 0.0) rho_max = std::min(rho_max, std::norm(d) / (2.0 * proj));
      }
      if (!(rho_max > 0.0)) return 0.0;
      auto g = [&](double rho) { return to_real(curve.map(q + rho * e)).squaredNorm() - r2; };
      auto integrand = [&](double rho) { return disk_area_density(curve, q + rho * e) * rho; };
      const int samples = 96;
      double total = 0.0;
      double prev_x = 0.0;
      double prev_g = g(0.0);
      double inside_from = prev_g < 0.0 ? 0.0 : -1.0;
      for (int i = 1; i <= samples; ++i) {
        const double x = rho_max * i / samples;
        const double gx = g(x);
        if ((prev_g < 0.0) != (gx < 0.0)) {
          const double root = numerics::find_root(g, prev_x, x, 1e-15);
          if (gx < 0.0) {
            inside_from = root;
          } else {
            total += numerics::integrate_gl(integrand, inside_from, root, 2, 16);
            inside_from = -1.0;
          }
        }
        prev_x = x;
        prev_g = gx;
      }
      if (inside_from >= 0.0) total += numerics::integrate_gl(integrand, inside_from, rho_max, 2, 16);
      return total;
    };
    const auto res = numerics::integrate_adaptive(ray, 0.0, kTwoPi, 1e-13, 1e-11, 12);
    out.value += res.value;
    out.error += res.error;
  }
  return out;
}

}  // namespace hofer
