#include "hofer/forms.hpp"

#include "hofer/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace hofer {

Mat omega_standard_matrix(int complex_dim) { return -complex_structure(complex_dim); }

OneForm dr_form(const EndModel&) {
  return {"dr", [](const ChartPoint& p) { return p.v; }};
}

OneForm lambda_form(const AcsField& j) {
  return {"lambda", [j](const ChartPoint& p) { return splitting_at(j, p).lambda; }};
}

OneForm sigma_form(const AcsField& j) {
  return {"sigma", [j](const ChartPoint& p) { return splitting_at(j, p).sigma; }};
}

OneForm lambda_inf_form(const AcsField& j) {
  return {"lambda_inf", [j](const ChartPoint& p) { return limit_splitting_at(j, p).lambda; }};
}

namespace {

Mat sphere_projection(const Vec& v) {
  const int dim = static_cast<int>(v.size());
  return Mat::Identity(dim, dim) - v * v.transpose();
}

Mat sym(const Mat& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

TwoForm exterior_derivative_fd(const OneForm& alpha, int real_dim, double h) {
  auto matrix = [alpha, real_dim, h](const ChartPoint& p) -> Mat {
    // surface F(a, b) = (r + a x_r + b y_r, normalize(v + a x_w + b y_w));
    // d alpha(x, y) = d/da alpha(F_b) - d/db alpha(F_a) at the origin
    auto point = [&](const Vec& u, double r) { return ChartPoint{r, u / u.norm()}; };
    auto tangent = [&](const Vec& u, const Vec& dir) {
      const double dr = p.v.dot(dir);
      const Vec w = dir - dr * p.v;
      const double nu = u.norm();
      const Vec n = u / nu;
      return Vec(dr * n + (w - n * n.dot(w)) / nu);
    };
    Mat m = Mat::Zero(real_dim, real_dim);
    for (int a = 0; a < real_dim; ++a) {
      for (int b = a + 1; b < real_dim; ++b) {
        Vec x = Vec::Zero(real_dim);
        Vec y = Vec::Zero(real_dim);
        x[a] = 1.0;
        y[b] = 1.0;
        const double xr = p.v.dot(x);
        const double yr = p.v.dot(y);
        const Vec xw = x - xr * p.v;
        const Vec yw = y - yr * p.v;
        auto g_b = [&](double s) {
          const Vec u = p.v + s * xw;
          return alpha(point(u, p.r + s * xr), tangent(u, y));
        };
        auto g_a = [&](double s) {
          const Vec u = p.v + s * yw;
          return alpha(point(u, p.r + s * yr), tangent(u, x));
        };
        const double value = numerics::derivative(g_b, 0.0, h) - numerics::derivative(g_a, 0.0, h);
        m(a, b) = value;
        m(b, a) = -value;
      }
    }
    return m;
  };
  return {"d" + alpha.name, matrix};
}

TwoForm d_lambda_inf_form_fd(const AcsField& j) {
  TwoForm f = exterior_derivative_fd(lambda_inf_form(j), j.model().real_dim());
  f.name = "d_lambda_inf_fd";
  return f;
}

TwoForm d_lambda_inf_form(const AcsField& j) {
  if (!j.limit_is_standard()) {
    TwoForm f = d_lambda_inf_form_fd(j);
    f.name = "d_lambda_inf";
    return f;
  }
  // lambda_inf = <i v, .> restricted to the sphere, so d lambda_inf = 2 omega_st on T S
  const Mat omega = omega_standard_matrix(j.model().complex_dim);
  return {"d_lambda_inf", [omega](const ChartPoint& p) -> Mat {
            const Mat proj = sphere_projection(p.v);
            return 2.0 * proj * omega * proj;
          }};
}

TwoForm omega_inf_form(const AcsField& j) {
  TwoForm f = d_lambda_inf_form(j);
  f.name = "omega_inf";
  return f;
}

namespace {

Mat omega_matrix(const Mat& jm, const FrameSplitting& f, const Mat& w) {
  const Mat jp = jm * f.pi_xi;
  return 0.5 * (f.pi_xi.transpose() * w * f.pi_xi + jp.transpose() * w * jp);
}

}  // namespace

double omega_from_limit(const AcsField& j, const TwoForm& omega_inf, const ChartPoint& p,
                        const Vec& x, const Vec& y) {
  const FrameSplitting f = splitting_at(j, p);
  const Mat jm = j.eval(p);
  const Mat w = omega_inf.matrix(p);
  const Vec px = f.pi_xi * x;
  const Vec py = f.pi_xi * y;
  return 0.5 * (px.dot(w * py) + (jm * px).dot(w * (jm * py)));
}

TwoForm omega_form(const AcsField& j, const TwoForm& omega_inf) {
  return {"omega", [j, omega_inf](const ChartPoint& p) {
            return omega_matrix(j.eval(p), splitting_at(j, p), omega_inf.matrix(p));
          }};
}

TwoForm omega_form(const AcsField& j) { return omega_form(j, omega_inf_form(j)); }

TwoForm sigma_lambda_form(const AcsField& j) {
  return {"sigma_lambda", [j](const ChartPoint& p) -> Mat {
            const FrameSplitting f = splitting_at(j, p);
            return f.sigma * f.lambda.transpose() - f.lambda * f.sigma.transpose();
          }};
}

TwoForm dr_lambda_inf_form(const AcsField& j) {
  return {"dr_lambda_inf", [j](const ChartPoint& p) -> Mat {
            const Vec l = limit_splitting_at(j, p).lambda;
            return p.v * l.transpose() - l * p.v.transpose();
          }};
}

TwoForm omega_prime_form(const EndModel& model) {
  const Mat omega = omega_standard_matrix(model.complex_dim);
  const double eps2 = model.chart_radius * model.chart_radius;
  return {"omega_prime", [omega, eps2](const ChartPoint& p) -> Mat {
            return eps2 * std::exp(2.0 * p.r) * omega;
          }};
}

TwoForm scaled(const TwoForm& form, double factor) {
  return {form.name, [form, factor](const ChartPoint& p) -> Mat { return factor * form.matrix(p); }};
}

double pullback_density(const TwoForm& form, const CylinderJet& jet) {
  return form(jet.point, jet.xs, jet.xt);
}

double omega_density_formula(const AcsField& j, const TwoForm& omega_inf, const CylinderJet& jet) {
  const FrameSplitting f = splitting_at(j, jet.point);
  const Vec px = f.pi_xi * jet.xs;
  const Mat jm = j.eval(jet.point);
  return omega_from_limit(j, omega_inf, jet.point, px, jm * px);
}

double sigma_lambda_density_formula(const AcsField& j, const CylinderJet& jet) {
  const FrameSplitting f = splitting_at(j, jet.point);
  const double s = f.sigma_of(jet.xs);
  const double l = f.lambda_of(jet.xs);
  return s * s + l * l;
}

// ---------------------------------------------------------------------------
// Positivity

namespace {

constexpr int kChunk = 1024;

struct Candidate {
  double value;
  ChartPoint point;
};

ChartPoint random_point(numerics::Stream& s, int dim, double r_hi, double span) {
  const double u = s.uniform();
  return ChartPoint{r_hi - span * u, s.unit_vector(dim)};
}

// keeps the `keep` smallest candidates, ties broken by insertion order
void keep_worst(std::vector<Candidate>& worst, Candidate c, int keep) {
  worst.push_back(std::move(c));
  std::stable_sort(worst.begin(), worst.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  if (static_cast<int>(worst.size()) > keep) worst.resize(keep);
}

// Local random search on the point; `score` is minimized.
Candidate descend(const std::function<double(const ChartPoint&)>& score, Candidate start,
                  double r_lo, double r_hi, numerics::Stream& s) {
  double step = 0.25;
  const int dim = static_cast<int>(start.point.v.size());
  for (int iter = 0; iter < 80; ++iter) {
    ChartPoint trial = start.point;
    trial.r = std::clamp(trial.r + step * (2.0 * s.uniform() - 1.0), r_lo, r_hi);
    Vec v = trial.v + step * s.unit_vector(dim);
    trial.v = v / v.norm();
    const double value = score(trial);
    if (value < start.value) {
      start = {value, trial};
    } else if (iter % 8 == 7) {
      step *= 0.5;
    }
  }
  return start;
}

}  // namespace

double j_positivity_infimum(const TwoForm& form, const AcsField& j, double depth,
                            std::uint64_t seed, const PositivityOptions& options) {
  const int dim = j.model().real_dim();
  const double r_hi = -depth;
  const double r_lo = -depth - options.span;
  const int chunks = (options.samples + kChunk - 1) / kChunk;
  std::vector<std::vector<Candidate>> per_chunk(chunks);
  numerics::parallel_for(chunks, [&](int c) {
    numerics::Stream s = numerics::Stream::substream(seed, static_cast<std::uint64_t>(c));
    const int begin = c * kChunk;
    const int end = std::min(options.samples, begin + kChunk);
    for (int i = begin; i < end; ++i) {
      const ChartPoint p = random_point(s, dim, r_hi, options.span);
      const Vec x = s.unit_vector(dim);
      const double value = x.dot(form.matrix(p) * (j.eval(p) * x));
      keep_worst(per_chunk[c], {value, p}, options.refine);
    }
  });
  std::vector<Candidate> worst;
  for (auto& chunk : per_chunk)
    for (auto& c : chunk) keep_worst(worst, c, options.refine);

  auto exact = [&](const ChartPoint& p) {
    const Mat q = sym(form.matrix(p) * j.eval(p));
    Eigen::SelfAdjointEigenSolver<Mat> eig(q, Eigen::EigenvaluesOnly);
    return eig.eigenvalues()[0];
  };
  double best = worst.empty() ? std::numeric_limits<double>::infinity() : worst.front().value;
  numerics::Stream s = numerics::Stream::substream(seed, 0xdecafULL);
  for (Candidate c : worst) {
    c.value = exact(c.point);
    c = descend(exact, c, r_lo, r_hi, s);
    best = std::min(best, c.value);
  }
  return best;
}

double max_ratio(const Mat& a, const Mat& b, bool absolute) {
  Eigen::SelfAdjointEigenSolver<Mat> eb(b);
  const auto& mu = eb.eigenvalues();
  const double bmax = mu[mu.size() - 1];
  const double anorm = a.norm();
  if (bmax <= 0.0) {
    if (anorm < 1e-14) return 0.0;
    throw Error(ErrorKind::region_too_shallow, "comparison form is not positive");
  }
  if (mu[0] < -1e-10 * bmax)
    throw Error(ErrorKind::region_too_shallow, "comparison form is negative on a J-complex plane");
  std::vector<int> range;
  std::vector<int> null;
  for (int k = 0; k < mu.size(); ++k) (mu[k] > 1e-9 * bmax ? range : null).push_back(k);
  const Mat& u = eb.eigenvectors();
  for (int k : null) {
    if ((a * u.col(k)).norm() > 1e-8 * std::max(anorm, 1e-300) && anorm > 1e-14)
      throw Error(ErrorKind::region_too_shallow, "comparison form degenerates where the bounded form does not");
  }
  const int n = static_cast<int>(range.size());
  Mat w(a.rows(), n);
  for (int i = 0; i < n; ++i) w.col(i) = u.col(range[i]) / std::sqrt(mu[range[i]]);
  const Mat reduced = sym(w.transpose() * a * w);
  Eigen::SelfAdjointEigenSolver<Mat> er(reduced, Eigen::EigenvaluesOnly);
  const auto& ev = er.eigenvalues();
  const double hi = ev[n - 1];
  return absolute ? std::max(hi, -ev[0]) : hi;
}

double cutoff_weight(const PositivityConstants& c, double r) {
  const double e = c.c1 * std::exp(c.kappa1 * r);
  return e / (1.0 + e);
}

double ComparisonRatios::max() const {
  return std::max({omega_vs_dlambda, sigma_lambda_vs_dr_lambda, dr_lambda_vs_omega, dlambda_vs_omega});
}

namespace {

struct PointMatrices {
  Mat j;
  Mat dlambda;
  Mat dr_lambda;
  Mat omega;
  Mat sigma_lambda;
};

PointMatrices point_matrices(const AcsField& j, const ChartPoint& p) {
  PointMatrices m;
  m.j = j.eval(p);
  const FrameSplitting f = splitting_from_matrix(m.j, p);
  const FrameSplitting fl = limit_splitting_at(j, p);
  const int n = j.model().complex_dim;
  Mat dl;
  if (j.limit_is_standard()) {
    const Mat proj = sphere_projection(p.v);
    dl = 2.0 * proj * omega_standard_matrix(n) * proj;
  } else {
    dl = d_lambda_inf_form(j).matrix(p);
  }
  m.dlambda = dl;
  m.dr_lambda = p.v * fl.lambda.transpose() - fl.lambda * p.v.transpose();
  m.omega = omega_matrix(m.j, f, dl);
  m.sigma_lambda = f.sigma * f.lambda.transpose() - f.lambda * f.sigma.transpose();
  return m;
}

ComparisonRatios ratios_from(const PointMatrices& m, double f, double g) {
  ComparisonRatios out;
  const Mat& j = m.j;
  out.omega_vs_dlambda = max_ratio(sym(m.omega * j), sym((m.dlambda + f * m.dr_lambda) * j), false);
  out.sigma_lambda_vs_dr_lambda =
      max_ratio(sym(m.sigma_lambda * j), sym((m.dr_lambda + f * m.dlambda) * j), false);
  out.dr_lambda_vs_omega = max_ratio(sym(m.dr_lambda * j), sym((g * m.omega + m.sigma_lambda) * j), true);
  out.dlambda_vs_omega = max_ratio(sym(m.dlambda * j), sym((m.omega + g * m.sigma_lambda) * j), true);
  return out;
}

}  // namespace

ComparisonRatios comparison_ratios(const AcsField& j, const ChartPoint& p, double c1, double kappa1) {
  const double e = c1 * std::exp(kappa1 * p.r);
  return ratios_from(point_matrices(j, p), e / (1.0 + e), std::exp(kappa1 * p.r));
}

PositivityConstants estimate_constants(const AcsField& j, double depth, std::uint64_t seed,
                                       const PositivityOptions& options) {
  if (!(depth > 0.0)) throw Error(ErrorKind::validation, "depth R must be positive");
  PositivityConstants out;
  out.depth = depth;
  out.seed = seed;
  out.samples = options.samples;
  out.span = options.span;

  const std::vector<double> depths{-8, -7, -6, -5, -4, -3, -2, -1};
  const DecayEstimate decay = acc1_decay_estimate(j, depths, 0, 32, seed);
  out.exactly_cylindrical = decay.exactly_cylindrical;
  if (decay.exactly_cylindrical) {
    out.c1 = 1e-12;
    out.kappa1 = 1.0;
  } else {
    out.c1 = kSafetyFactor * decay.c;
    out.kappa1 = std::max(decay.delta, 1e-3);
  }

  // sample points once; matrices do not depend on the constants
  const int dim = j.model().real_dim();
  const int chunks = (options.samples + kChunk - 1) / kChunk;
  std::vector<std::vector<ChartPoint>> pts(chunks);
  std::vector<std::vector<PointMatrices>> mats(chunks);
  numerics::parallel_for(chunks, [&](int c) {
    numerics::Stream s = numerics::Stream::substream(seed, static_cast<std::uint64_t>(c));
    const int begin = c * kChunk;
    const int end = std::min(options.samples, begin + kChunk);
    for (int i = begin; i < end; ++i) {
      // include the shallow edge r = -R where the comparison is hardest
      ChartPoint p = random_point(s, dim, -depth, options.span);
      if (i % 16 == 0) p.r = -depth;
      pts[c].push_back(p);
      mats[c].push_back(point_matrices(j, p));
    }
  });

  // C2 over sampled points; enlarge C1 if the comparison forms are not yet positive
  std::vector<Candidate> worst;
  for (int attempt = 0;; ++attempt) {
    try {
      std::vector<std::vector<Candidate>> per_chunk(chunks);
      numerics::parallel_for(chunks, [&](int c) {
        for (std::size_t i = 0; i < pts[c].size(); ++i) {
          const double e = out.c1 * std::exp(out.kappa1 * pts[c][i].r);
          const double value = ratios_from(mats[c][i], e / (1.0 + e), std::exp(out.kappa1 * pts[c][i].r)).max();
          keep_worst(per_chunk[c], {-value, pts[c][i]}, options.refine);
        }
      });
      worst.clear();
      for (auto& chunk : per_chunk)
        for (auto& c : chunk) keep_worst(worst, c, options.refine);
      break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::region_too_shallow || attempt >= 40) throw;
      out.c1 *= 2.0;
    }
  }
  numerics::Stream s = numerics::Stream::substream(seed, 0xc2ULL);
  double raw = worst.empty() ? 1.0 : -worst.front().value;
  auto score = [&](const ChartPoint& p) { return -comparison_ratios(j, p, out.c1, out.kappa1).max(); };
  for (Candidate c : worst) {
    c = descend(score, c, -depth - options.span, -depth, s);
    raw = std::max(raw, -c.value);
  }
  out.c2_raw = std::max(1.0, raw);
  out.c2 = kSafetyFactor * out.c2_raw;

  // C3: comparison with omega' on J-complex planes over [-2R, 0]
  const TwoForm omega_prime = omega_prime_form(j.model());
  const double tau_slope = 2.0 / depth;
  auto c3_at = [&](const ChartPoint& p) {
    const PointMatrices m = point_matrices(j, p);
    const Mat b = sym(omega_prime.matrix(p) * m.j);
    const double boundary = tau_slope * max_ratio(sym(m.dr_lambda * m.j), b, true) +
                            max_ratio(sym(m.dlambda * m.j), b, true);
    return std::max({boundary, max_ratio(sym(m.omega * m.j), b, true),
                     max_ratio(sym(m.sigma_lambda * m.j), b, true)});
  };
  const int c3_samples = std::max(64, options.samples / 8);
  std::vector<double> c3_values(c3_samples);
  numerics::parallel_for(c3_samples, [&](int i) {
    numerics::Stream si = numerics::Stream::substream(seed ^ 0xc3c3ULL, static_cast<std::uint64_t>(i));
    ChartPoint p = random_point(si, dim, 0.0, 2.0 * depth);
    if (i % 4 == 0) p.r = -2.0 * depth;
    c3_values[i] = c3_at(p);
  });
  double c3 = 0.0;
  for (double v : c3_values) c3 = std::max(c3, v);
  out.c3 = kSafetyFactor * c3;
  out.c4 = 8.0 * out.c3 * (out.c2 + 1.0);
  return out;
}

int count_comparison_violations(const AcsField& j, const PositivityConstants& c, int samples,
                                std::uint64_t seed) {
  const int dim = j.model().real_dim();
  const int chunks = (samples + kChunk - 1) / kChunk;
  std::vector<int> counts(chunks, 0);
  numerics::parallel_for(chunks, [&](int k) {
    numerics::Stream s = numerics::Stream::substream(seed, static_cast<std::uint64_t>(k));
    const int begin = k * kChunk;
    const int end = std::min(samples, begin + kChunk);
    for (int i = begin; i < end; ++i) {
      const ChartPoint p = random_point(s, dim, -c.depth, c.span);
      const Vec x = s.unit_vector(dim);
      const PointMatrices m = point_matrices(j, p);
      const Vec jx = m.j * x;
      auto q = [&](const Mat& a) { return x.dot(a * jx); };
      const double f = cutoff_weight(c, p.r);
      const double g = std::exp(c.kappa1 * p.r);
      const double slack = 1e-12;
      const double om = q(m.omega);
      const double dl = q(m.dlambda);
      const double dr = q(m.dr_lambda);
      const double sl = q(m.sigma_lambda);
      if (om > c.c2 * (dl + f * dr) + slack) ++counts[k];
      if (sl > c.c2 * (dr + f * dl) + slack) ++counts[k];
      if (std::abs(dr) > c.c2 * (g * om + sl) + slack) ++counts[k];
      if (std::abs(dl) > c.c2 * (om + g * sl) + slack) ++counts[k];
    }
  });
  int total = 0;
  for (int n : counts) total += n;
  return total;
}

}  // namespace hofer
