#pragma once

// Differential forms on the end, evaluated pointwise. A 1-form is a covector
// field and a 2-form an antisymmetric matrix field, both acting on
// Euler-coordinate tangent vectors (see geometry.hpp).

#include "hofer/geometry.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace hofer {

struct OneForm {
  std::string name;
  std::function<Vec(const ChartPoint&)> covector;

  double operator()(const ChartPoint& p, const Vec& x) const { return covector(p).dot(x); }
  double operator()(const TangentVector& x) const { return (*this)(x.base, x.ambient()); }
};

struct TwoForm {
  std::string name;
  std::function<Mat(const ChartPoint&)> matrix;

  double operator()(const ChartPoint& p, const Vec& x, const Vec& y) const {
    return x.dot(matrix(p) * y);
  }
  double operator()(const TangentVector& x, const TangentVector& y) const {
    return (*this)(x.base, x.ambient(), y.ambient());
  }
};

/// Matrix of the standard symplectic form: omega_standard(a, b) = a^T M b.
Mat omega_standard_matrix(int complex_dim);

OneForm dr_form(const EndModel& model);
OneForm lambda_form(const AcsField& j);
OneForm sigma_form(const AcsField& j);
OneForm lambda_inf_form(const AcsField& j);

/// Exact formula when the limit is the standard structure, otherwise the
/// finite-difference exterior derivative of lambda_inf_form.
TwoForm d_lambda_inf_form(const AcsField& j);
TwoForm d_lambda_inf_form_fd(const AcsField& j);

/// Exterior derivative by centered differences (step h, Richardson-refined).
TwoForm exterior_derivative_fd(const OneForm& alpha, int real_dim, double h = 1e-5);

/// omega_{-inf}; the ends here are of contact type, so this is d lambda_{-inf}.
TwoForm omega_inf_form(const AcsField& j);

/// omega(x, y) = 1/2 [w(pi x, pi y) + w(J pi x, J pi y)] with w = omega_inf.
double omega_from_limit(const AcsField& j, const TwoForm& omega_inf, const ChartPoint& p,
                        const Vec& x, const Vec& y);
TwoForm omega_form(const AcsField& j, const TwoForm& omega_inf);
TwoForm omega_form(const AcsField& j);

TwoForm sigma_lambda_form(const AcsField& j);
TwoForm dr_lambda_inf_form(const AcsField& j);
/// The chart symplectic form omega_st in Euler coordinates: eps^2 e^{2r} omega_st.
TwoForm omega_prime_form(const EndModel& model);

TwoForm scaled(const TwoForm& form, double factor);

/// Tangent data of a curve in cylinder coordinates at one domain point.
struct CylinderJet {
  ChartPoint point;
  Vec xs;  // Euler-coordinate u_s (dr component a_s)
  Vec xt;
};

/// Delta(u_s, u_t).
double pullback_density(const TwoForm& form, const CylinderJet& jet);
/// omega(pi u_s, J pi u_s): equals the omega density on J-holomorphic jets.
double omega_density_formula(const AcsField& j, const TwoForm& omega_inf, const CylinderJet& jet);
/// sigma(u_s)^2 + lambda(u_s)^2: equals the sigma^lambda density on J-holomorphic jets.
double sigma_lambda_density_formula(const AcsField& j, const CylinderJet& jet);

struct PositivityOptions {
  int samples = 10000;
  double span = 6.0;  // points are drawn from [-R - span, -R]
  int refine = 10;
};

/// min Delta(x, Jx) over unit x at points with r <= -R; Monte Carlo then
/// exact per-point minimization and point descent from the worst samples.
double j_positivity_infimum(const TwoForm& form, const AcsField& j, double depth,
                            std::uint64_t seed, const PositivityOptions& options = {});

/// sup over unit x of q_a(x) / q_b(x) for symmetric a, b with b >= 0
/// (|q_a| when `absolute`). Throws region_too_shallow when unbounded.
double max_ratio(const Mat& a, const Mat& b, bool absolute);

struct PositivityConstants {
  double c1 = 0.0;
  double kappa1 = 0.0;
  double c2 = 1.0;
  double c2_raw = 1.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double depth = 0.0;
  std::uint64_t seed = 0;
  int samples = 0;
  double span = 0.0;
  bool exactly_cylindrical = false;
};

inline constexpr double kSafetyFactor = 1.1;

/// e^{...} weights of the comparison inequalities at depth r.
double cutoff_weight(const PositivityConstants& c, double r);

/// Ratios of the four comparison inequalities at p (sup over J-complex planes).
struct ComparisonRatios {
  double omega_vs_dlambda = 0.0;
  double sigma_lambda_vs_dr_lambda = 0.0;
  double dr_lambda_vs_omega = 0.0;
  double dlambda_vs_omega = 0.0;
  double max() const;
};
ComparisonRatios comparison_ratios(const AcsField& j, const ChartPoint& p, double c1, double kappa1);

PositivityConstants estimate_constants(const AcsField& j, double depth, std::uint64_t seed,
                                       const PositivityOptions& options = {});

/// Counts violations of the four inequalities (with constants c) on fresh
/// random (point, vector) samples.
int count_comparison_violations(const AcsField& j, const PositivityConstants& c, int samples,
                                std::uint64_t seed);

}  // namespace hofer
