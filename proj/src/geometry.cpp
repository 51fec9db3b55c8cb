#include "hofer/geometry.hpp"

#include "hofer/numerics.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

namespace hofer {

EndModel::EndModel(int n, double eps, EndSign end_sign)
    : complex_dim(n), chart_radius(eps), sign(end_sign) {
  if (n < 1 || 2 * n > kMaxRealDim)
    throw Error(ErrorKind::domain, "complex dimension must be in [1, 4]");
  if (!(eps > 0.0)) throw Error(ErrorKind::domain, "chart radius must be positive");
}

void validate(const EndModel& model, const ChartPoint& p) {
  if (p.v.size() != model.real_dim())
    throw Error(ErrorKind::domain, "sphere point has the wrong dimension");
  if (std::abs(p.v.norm() - 1.0) > 1e-12)
    throw Error(ErrorKind::domain, "sphere point is not a unit vector");
  if (model.sign == EndSign::negative ? p.r > 0.0 : p.r < 0.0)
    throw Error(ErrorKind::domain, "r has the wrong sign for this end");
}

TangentVector TangentVector::from_ambient(const ChartPoint& base, const Vec& x) {
  TangentVector t;
  t.base = base;
  t.dr = base.v.dot(x);
  t.sphere = x - t.dr * base.v;
  return t;
}

ChartPoint chart_to_cylinder(const EndModel& model, const CVec& z) {
  if (static_cast<int>(z.size()) != model.complex_dim)
    throw Error(ErrorKind::domain, "point has the wrong dimension");
  const Vec x = to_real(z);
  const double norm = x.norm();
  if (norm == 0.0) throw Error(ErrorKind::domain, "the puncture is not in the chart");
  if (norm >= model.chart_radius) throw Error(ErrorKind::domain, "point is outside the chart ball");
  return ChartPoint{std::log(norm) - std::log(model.chart_radius), x / norm};
}

Vec cylinder_to_chart_real(const EndModel& model, const ChartPoint& p) {
  return model.chart_radius * std::exp(p.r) * p.v;
}

CVec cylinder_to_chart(const EndModel& model, const ChartPoint& p) {
  return to_complex(cylinder_to_chart_real(model, p));
}

// ---------------------------------------------------------------------------
// Polynomial diffeomorphisms

int DiffeoTerm::total_degree() const {
  int d = 0;
  for (int p : holo_powers) d += p;
  for (int p : anti_powers) d += p;
  return d;
}

PolynomialDiffeo::PolynomialDiffeo(int complex_dim, std::vector<DiffeoTerm> terms,
                                   std::string name)
    : complex_dim_(complex_dim), terms_(std::move(terms)), name_(std::move(name)) {
  for (DiffeoTerm& t : terms_) {
    if (t.component < 0 || t.component >= complex_dim_)
      throw Error(ErrorKind::invalid_diffeomorphism, "term targets a missing component");
    t.holo_powers.resize(complex_dim_, 0);
    t.anti_powers.resize(complex_dim_, 0);
    for (int j = 0; j < complex_dim_; ++j)
      if (t.holo_powers[j] < 0 || t.anti_powers[j] < 0)
        throw Error(ErrorKind::invalid_diffeomorphism, "negative exponent");
    if (t.total_degree() < 2)
      throw Error(ErrorKind::invalid_diffeomorphism,
                  "perturbation terms must have degree >= 2 (Phi(0) = 0, dPhi(0) = Id)");
  }
  std::erase_if(terms_, [](const DiffeoTerm& t) { return t.coeff == Complex(0.0); });
}

PolynomialDiffeo PolynomialDiffeo::identity(int complex_dim) {
  return PolynomialDiffeo(complex_dim, {}, "identity");
}

namespace {

PolynomialDiffeo conjugate_power(int complex_dim, int power, double coeff, const char* name) {
  DiffeoTerm t;
  t.component = 0;
  t.coeff = coeff;
  t.anti_powers.assign(complex_dim, 0);
  t.anti_powers[0] = power;
  return PolynomialDiffeo(complex_dim, {t}, name);
}

Complex ipow(Complex z, int p) {
  Complex out = 1.0;
  for (int i = 0; i < p; ++i) out *= z;
  return out;
}

}  // namespace

PolynomialDiffeo PolynomialDiffeo::quadratic(int complex_dim, double coeff) {
  return conjugate_power(complex_dim, 2, coeff, "quadratic");
}

PolynomialDiffeo PolynomialDiffeo::cubic(int complex_dim, double coeff) {
  return conjugate_power(complex_dim, 3, coeff, "cubic");
}

PolynomialDiffeo PolynomialDiffeo::named(const std::string& name, int complex_dim, double coeff) {
  if (name == "identity" || name == "none") return identity(complex_dim);
  if (name == "quadratic") return quadratic(complex_dim, coeff);
  if (name == "cubic") return cubic(complex_dim, coeff);
  throw Error(ErrorKind::config, "unknown diffeomorphism '" + name + "'");
}

CVec PolynomialDiffeo::operator()(const CVec& w) const {
  CVec out = w;
  for (const DiffeoTerm& t : terms_) {
    Complex m = t.coeff;
    for (int j = 0; j < complex_dim_; ++j)
      m *= ipow(w[j], t.holo_powers[j]) * ipow(std::conj(w[j]), t.anti_powers[j]);
    out[t.component] += m;
  }
  return out;
}

Mat PolynomialDiffeo::jacobian(const CVec& w) const {
  const int n = complex_dim_;
  Mat jac = Mat::Identity(2 * n, 2 * n);
  for (const DiffeoTerm& t : terms_) {
    for (int j = 0; j < n; ++j) {
      // Wirtinger derivatives of the monomial with respect to w_j and conj(w_j)
      Complex dw = 0.0;
      Complex dwbar = 0.0;
      Complex rest = t.coeff;
      for (int i = 0; i < n; ++i)
        if (i != j) rest *= ipow(w[i], t.holo_powers[i]) * ipow(std::conj(w[i]), t.anti_powers[i]);
      const int a = t.holo_powers[j];
      const int b = t.anti_powers[j];
      if (a > 0) dw = rest * static_cast<double>(a) * ipow(w[j], a - 1) * ipow(std::conj(w[j]), b);
      if (b > 0) dwbar = rest * static_cast<double>(b) * ipow(w[j], a) * ipow(std::conj(w[j]), b - 1);
      const Complex dx = dw + dwbar;
      const Complex dy = Complex(0.0, 1.0) * (dw - dwbar);
      const int row = 2 * t.component;
      jac(row, 2 * j) += dx.real();
      jac(row + 1, 2 * j) += dx.imag();
      jac(row, 2 * j + 1) += dy.real();
      jac(row + 1, 2 * j + 1) += dy.imag();
    }
  }
  return jac;
}

CVec PolynomialDiffeo::inverse(const CVec& z) const {
  if (is_identity()) return z;
  const Vec target = to_real(z);
  Vec w = target;
  const double scale = std::max(1.0, target.norm());
  for (int iter = 0; iter < 60; ++iter) {
    const CVec wc = to_complex(w);
    const Vec residual = to_real((*this)(wc)) - target;
    if (residual.norm() < 1e-15 * scale) return wc;
    const Mat jac = jacobian(wc);
    const double det = jac.determinant();
    if (std::abs(det) < 1e-8)
      throw Error(ErrorKind::invalid_diffeomorphism, "dPhi is singular at a sampled point");
    const Vec step = jac.partialPivLu().solve(residual);
    w -= step;
    if (step.norm() < 1e-16 * scale) return to_complex(w);
  }
  const CVec wc = to_complex(w);
  if ((to_real((*this)(wc)) - target).norm() < 1e-12 * scale) return wc;
  throw Error(ErrorKind::invalid_diffeomorphism, "Newton inverse of Phi did not converge");
}

// ---------------------------------------------------------------------------
// Almost complex structures

struct AcsField::State {
  Kind kind = Kind::custom;
  EndModel model;
  std::string name;
  Evaluator eval;
  Evaluator limit;
  bool limit_is_standard = false;
  std::optional<PolynomialDiffeo> diffeo;
  std::vector<DecayConstants> decay;
};

AcsField::AcsField(std::shared_ptr<const State> state) : state_(std::move(state)) {}

AcsField AcsField::custom(const EndModel& model, Evaluator eval, Evaluator limit,
                          std::string name, bool limit_is_standard) {
  auto s = std::make_shared<State>();
  s->kind = Kind::custom;
  s->model = model;
  s->name = std::move(name);
  s->eval = std::move(eval);
  s->limit = std::move(limit);
  s->limit_is_standard = limit_is_standard;
  return AcsField(std::move(s));
}

AcsField::Kind AcsField::kind() const { return state_->kind; }
const EndModel& AcsField::model() const { return state_->model; }
const std::string& AcsField::name() const { return state_->name; }
Mat AcsField::eval(const ChartPoint& p) const { return state_->eval(p); }
Mat AcsField::limit_eval(const ChartPoint& p) const { return state_->limit(p); }
bool AcsField::limit_is_standard() const { return state_->limit_is_standard; }

const PolynomialDiffeo* AcsField::diffeo() const {
  return state_->diffeo ? &*state_->diffeo : nullptr;
}

const std::vector<DecayConstants>& AcsField::decay_constants() const { return state_->decay; }

AcsField AcsField::with_decay_constants(std::vector<DecayConstants> constants) const {
  auto s = std::make_shared<State>(*state_);
  s->decay = std::move(constants);
  return AcsField(std::move(s));
}

AcsField AcsField::limit() const {
  if (state_->limit_is_standard) return standard_cylindrical_acs(state_->model);
  return custom(state_->model, state_->limit, state_->limit, state_->name + "-limit", false);
}

AcsField standard_cylindrical_acs(const EndModel& model) {
  auto s = std::make_shared<AcsField::State>();
  s->kind = AcsField::Kind::standard_cylindrical;
  s->model = model;
  s->name = "standard";
  const Mat i = complex_structure(model.complex_dim);
  s->eval = [i](const ChartPoint&) { return i; };
  s->limit = s->eval;
  s->limit_is_standard = true;
  return AcsField(std::move(s));
}

AcsField pushforward_acs(const PolynomialDiffeo& phi, const EndModel& model) {
  if (phi.complex_dim() != model.complex_dim)
    throw Error(ErrorKind::invalid_diffeomorphism, "Phi and the end model disagree on N");
  // sampled non-degeneracy check of dPhi on the chart ball
  numerics::Stream stream(0x5eedULL);
  for (int k = 0; k < 256; ++k) {
    const double radius = model.chart_radius * std::pow(stream.uniform(), 1.0 / model.real_dim());
    const Vec x = radius * stream.unit_vector(model.real_dim());
    // dPhi(0) = Id, so a sign change of det dPhi means a fold inside the ball
    if (phi.jacobian(to_complex(x)).determinant() < 1e-8)
      throw Error(ErrorKind::invalid_diffeomorphism, "dPhi is singular at a sampled point");
  }
  auto s = std::make_shared<AcsField::State>();
  s->kind = phi.is_identity() ? AcsField::Kind::standard_cylindrical : AcsField::Kind::pushforward;
  s->model = model;
  s->name = phi.name();
  s->diffeo = phi;
  const Mat i = complex_structure(model.complex_dim);
  const EndModel m = model;
  if (phi.is_identity()) {
    s->eval = [i](const ChartPoint&) { return i; };
  } else {
    s->eval = [phi, i, m](const ChartPoint& p) -> Mat {
      const CVec w = phi.inverse(cylinder_to_chart(m, p));
      const Mat a = phi.jacobian(w);
      const Mat ai = a * i;
      // J = A i A^{-1}, computed as the solution of J A = A i
      return a.transpose().partialPivLu().solve(ai.transpose()).transpose();
    };
  }
  s->limit = [i](const ChartPoint&) { return i; };
  s->limit_is_standard = true;
  return AcsField(std::move(s));
}

// ---------------------------------------------------------------------------
// Splitting

FrameSplitting splitting_from_matrix(const Mat& j, const ChartPoint& p) {
  const int dim = static_cast<int>(p.v.size());
  FrameSplitting f;
  f.base = p;
  f.radial = p.v;
  f.reeb = j * p.v;
  if (std::abs(p.v.dot(f.reeb)) > 0.9 * f.reeb.norm())
    throw Error(ErrorKind::not_almost_cylindrical, "J(d/dr) is far from tangent to the level set");

  // xi = T(level) cap J T(level) = {x : v.x = 0 and v.(J^{-1} x) = 0}
  const Mat jinv = j.partialPivLu().inverse();
  Eigen::Matrix<double, 2, Eigen::Dynamic, 0, 2, kMaxRealDim> c(2, dim);
  c.row(0) = p.v.transpose();
  c.row(1) = p.v.transpose() * jinv;
  Eigen::JacobiSVD<Mat> svd(Mat(c), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv[k] > kSplittingRankCutoff * sv[0]) ++rank;
  if (dim - rank != dim - 2)
    throw Error(ErrorKind::degenerate_splitting, "xi does not have dimension 2N-2");
  f.xi_basis = svd.matrixV().rightCols(dim - 2);

  Mat basis(dim, dim);
  basis.col(0) = f.radial;
  basis.col(1) = f.reeb;
  if (dim > 2) basis.rightCols(dim - 2) = f.xi_basis;
  const auto lu = basis.partialPivLu();
  if (std::abs(lu.determinant()) < 1e-12)
    throw Error(ErrorKind::degenerate_splitting, "frame (d/dr, R, xi) is singular");
  const Mat dual = lu.inverse();
  f.sigma = dual.row(0).transpose();
  f.lambda = dual.row(1).transpose();
  if (dim > 2)
    f.pi_xi = f.xi_basis * dual.bottomRows(dim - 2);
  else
    f.pi_xi = Mat::Zero(dim, dim);
  return f;
}

FrameSplitting splitting_at(const AcsField& j, const ChartPoint& p) {
  return splitting_from_matrix(j.eval(p), p);
}

FrameSplitting limit_splitting_at(const AcsField& j, const ChartPoint& p) {
  return splitting_from_matrix(j.limit_eval(p), p);
}

// ---------------------------------------------------------------------------
// Reeb dynamics

TangentVector reeb_limit_field(const AcsField& j, const Vec& v) {
  const ChartPoint p{0.0, v};
  const TangentVector r = TangentVector::from_ambient(p, j.limit_eval(p) * v);
  if (std::abs(r.dr) > 1e-10)
    throw Error(ErrorKind::acc3_violation, "limit Reeb field has a dr component");
  return r;
}

namespace {

Vec reeb_rhs(const AcsField& j, const Vec& v) {
  const Vec r = j.limit_eval(ChartPoint{0.0, v}) * v;
  return r - v.dot(r) * v;
}

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Vec reeb_flow(const AcsField& j, const Vec& v, double t, const FlowOptions& options) {
  Vec y = v / v.norm();
  if (t == 0.0) return y;
  const double direction = t > 0.0 ? 1.0 : -1.0;
  const double total = std::abs(t);
  double done = 0.0;
  double h = std::min(0.05, total);
  Vec k1 = reeb_rhs(j, y);
  while (done < total) {
    if (done + h > total) h = total - done;
    const double hs = direction * h;
    const Vec k2 = reeb_rhs(j, y + hs * (a21 * k1));
    const Vec k3 = reeb_rhs(j, y + hs * (a31 * k1 + a32 * k2));
    const Vec k4 = reeb_rhs(j, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 = reeb_rhs(j, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 = reeb_rhs(j, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec y5 = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec k7 = reeb_rhs(j, y5);
    const Vec err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err_norm = err.lpNorm<Eigen::Infinity>();
    // error per unit time keeps the global error near abs_tol over O(1) times
    const double tol = options.abs_tol * std::max(h, 1e-3);
    if (err_norm <= tol) {
      done += h;
      y = y5 / y5.norm();
      k1 = (y5.norm() == 1.0) ? k7 : reeb_rhs(j, y);
    }
    const double factor = err_norm == 0.0 ? 5.0 : 0.9 * std::pow(tol / err_norm, 0.2);
    h *= std::clamp(factor, 0.2, 5.0);
    if (h < options.min_step && done < total)
      throw Error(ErrorKind::integration_failure, "Reeb flow step size underflow");
  }
  return y;
}

double simple_period(const AcsField& j, const Vec& v, double t_max) {
  const Vec start = v / v.norm();
  auto g = [&](const Vec& y) { return (y - start).dot(reeb_rhs(j, y)); };
  const double dt = 0.05;
  Vec y = start;
  double t = 0.0;
  double g_prev = 0.0;
  bool left = false;
  while (t < t_max) {
    y = reeb_flow(j, y, dt);
    t += dt;
    const double dist = (y - start).norm();
    if (dist > 0.1) left = true;
    const double g_now = g(y);
    if (left && g_prev < 0.0 && g_now >= 0.0 && dist < 0.2) {
      const double root = numerics::find_root(
          [&](double s) { return g(reeb_flow(j, start, s)); }, t - dt, t, 1e-15);
      if ((reeb_flow(j, start, root) - start).norm() < 1e-6) return root;
    }
    g_prev = g_now;
  }
  throw Error(ErrorKind::not_closed, "no return of the Reeb flow within the search window");
}

ReebOrbit reeb_orbit_through(const AcsField& j, const Vec& v, int multiplicity) {
  if (multiplicity < 1) throw Error(ErrorKind::validation, "orbit multiplicity must be >= 1");
  const Vec start = v / v.norm();
  const double simple = simple_period(j, start);
  ReebOrbit orbit;
  orbit.period = simple * multiplicity;
  orbit.multiplicity = multiplicity;
  orbit.loop = [j, start, simple](double t) {
    const double reduced = t - simple * std::floor(t / simple);
    return reeb_flow(j, start, reduced);
  };
  orbit.action = orbit_action(j, orbit);
  return orbit;
}

double orbit_action(const AcsField& j, const ReebOrbit& orbit, int samples) {
  if (!(orbit.period > 0.0)) throw Error(ErrorKind::validation, "orbit period must be positive");
  const Vec first = orbit.loop(0.0);
  const Vec last = orbit.loop(orbit.period);
  if ((first - last).norm() > 1e-9) throw Error(ErrorKind::not_closed, "loop does not close");

  const int m = samples;
  const int dim = static_cast<int>(first.size());
  std::vector<Vec> pts(m);
  for (int k = 0; k < m; ++k) pts[k] = orbit.loop(orbit.period * k / m);

  // spectral derivative of the periodic samples (direct DFT, m is small)
  std::vector<Vec> deriv(m, Vec::Zero(dim));
  const double two_pi = 2.0 * std::numbers::pi;
  for (int d = 0; d < dim; ++d) {
    std::vector<Complex> coeff(m);
    for (int k = 0; k < m; ++k) {
      Complex acc = 0.0;
      for (int n = 0; n < m; ++n) acc += pts[n][d] * std::polar(1.0, -two_pi * ((static_cast<long>(k) * n) % m) / m);
      coeff[k] = acc;
    }
    for (int k = 0; k < m; ++k) {
      int freq = k <= m / 2 ? k : k - m;
      if (2 * k == m) freq = 0;
      coeff[k] *= Complex(0.0, two_pi * freq / orbit.period);
    }
    for (int n = 0; n < m; ++n) {
      Complex acc = 0.0;
      for (int k = 0; k < m; ++k) acc += coeff[k] * std::polar(1.0, two_pi * ((static_cast<long>(k) * n) % m) / m);
      deriv[n][d] = acc.real() / m;
    }
  }
  numerics::CompensatedSum sum;
  for (int k = 0; k < m; ++k) {
    const FrameSplitting f = limit_splitting_at(j, ChartPoint{0.0, pts[k]});
    sum.add(f.lambda.dot(deriv[k]));
  }
  return sum.value() * orbit.period / m;
}

// ---------------------------------------------------------------------------
// ACC1 decay

namespace {

double op_norm(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()[0];
}

// orthonormal basis of the tangent space of R x S at p: d/dr then sphere directions
std::vector<std::pair<double, Vec>> tangent_frame(const Vec& v) {
  const int dim = static_cast<int>(v.size());
  std::vector<std::pair<double, Vec>> frame;
  frame.emplace_back(1.0, Vec::Zero(dim));
  Mat proj = Mat::Identity(dim, dim) - v * v.transpose();
  Eigen::JacobiSVD<Mat> svd(proj, Eigen::ComputeFullU);
  for (int k = 0; k < dim - 1; ++k) frame.emplace_back(0.0, Vec(svd.matrixU().col(k)));
  return frame;
}

ChartPoint displace(const ChartPoint& p, const std::pair<double, Vec>& dir, double h) {
  if (dir.first != 0.0) return ChartPoint{p.r + h * dir.first, p.v};
  const Vec moved = p.v + h * dir.second;
  return ChartPoint{p.r, moved / moved.norm()};
}

Mat difference(const AcsField& j, const ChartPoint& p) { return j.eval(p) - j.limit_eval(p); }

double order_norm(const AcsField& j, const ChartPoint& p, int order) {
  const Mat d0 = difference(j, p);
  double total = op_norm(d0);
  if (order < 1) return total;
  const auto frame = tangent_frame(p.v);
  const double h1 = 1e-5;
  double grad = 0.0;
  for (const auto& e : frame) {
    const Mat de = (difference(j, displace(p, e, h1)) - difference(j, displace(p, e, -h1))) / (2 * h1);
    grad += de.squaredNorm();
  }
  total += std::sqrt(grad);
  if (order < 2) return total;
  const double h2 = 1e-3;
  double hess = 0.0;
  for (std::size_t a = 0; a < frame.size(); ++a) {
    for (std::size_t b = 0; b < frame.size(); ++b) {
      auto at = [&](double sa, double sb) {
        return difference(j, displace(displace(p, frame[a], sa * h2), frame[b], sb * h2));
      };
      const Mat dab = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h2 * h2);
      hess += dab.squaredNorm();
    }
  }
  return total + std::sqrt(hess);
}

}  // namespace

DecayEstimate acc1_decay_estimate(const AcsField& j, std::span<const double> r_samples,
                                  int order, int directions, std::uint64_t seed) {
  if (order < 0 || order > 2) throw Error(ErrorKind::validation, "decay order must be 0, 1 or 2");
  const int deep = static_cast<int>(std::count_if(r_samples.begin(), r_samples.end(),
                                                  [](double r) { return r < -1.0; }));
  if (deep < 4) throw Error(ErrorKind::validation, "need at least 4 sample depths r < -1");

  const int dim = j.model().real_dim();
  numerics::Stream stream(seed);
  std::vector<Vec> dirs;
  for (int k = 0; k < directions; ++k) dirs.push_back(stream.unit_vector(dim));

  DecayEstimate out;
  out.order = order;
  std::vector<double> xs;
  std::vector<double> ys;
  bool all_tiny = true;
  for (double r : r_samples) {
    double sup = 0.0;
    for (const Vec& v : dirs) sup = std::max(sup, order_norm(j, ChartPoint{r, v}, order));
    out.depths.push_back(r);
    out.norms.push_back(sup);
    if (sup >= 1e-13) all_tiny = false;
    if (r <= -2.0 && sup > 0.0) {
      xs.push_back(r);
      ys.push_back(std::log(sup));
    }
  }
  if (all_tiny) {
    out.exactly_cylindrical = true;
    out.c = 0.0;
    out.delta = 0.0;
    return out;
  }
  if (xs.size() < 2) throw Error(ErrorKind::validation, "too few depths r <= -2 for a decay fit");
  const numerics::LineFit fit = numerics::fit_line(xs, ys);
  out.delta = fit.slope;
  out.c = std::exp(fit.intercept);
  out.non_decaying = fit.slope <= 0.0;
  out.weak_decay = fit.slope < 0.05;
  return out;
}

}  // namespace hofer
