#pragma once

// Cylindrical-end geometry of a punctured ball in C^N.
//
// Points of the end R^- x S^{2N-1} are (r, v) with v a unit vector of R^{2N}.
// Tangent vectors are carried in "Euler coordinates": the tangent vector with
// dr-component a and sphere component w (w . v = 0) is stored as the ambient
// vector X = a v + w. Under the chart z = eps e^r v this is dz / |z|, so an
// almost complex structure J pulled back from C^N has the same matrix in both
// descriptions, and the translation-invariant metric dr^2 + g_sphere is the
// Euclidean norm of X.

#include "hofer/types.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hofer {

enum class EndSign { negative, positive };

struct EndModel {
  int complex_dim = 2;
  double chart_radius = 1.0;
  EndSign sign = EndSign::negative;

  EndModel() = default;
  EndModel(int n, double eps, EndSign end_sign = EndSign::negative);

  int real_dim() const { return 2 * complex_dim; }
};

struct ChartPoint {
  double r = 0.0;
  Vec v;
};

/// Throws ErrorKind::domain unless |v| = 1 and r has the end's sign.
void validate(const EndModel& model, const ChartPoint& p);

struct TangentVector {
  ChartPoint base;
  double dr = 0.0;
  Vec sphere;

  Vec ambient() const { return dr * base.v + sphere; }
  static TangentVector from_ambient(const ChartPoint& base, const Vec& x);
};

/// psi(z) = (log|z| - log eps, z/|z|). Requires 0 < |z| < eps.
ChartPoint chart_to_cylinder(const EndModel& model, const CVec& z);
/// Inverse of chart_to_cylinder: eps e^r v.
CVec cylinder_to_chart(const EndModel& model, const ChartPoint& p);
Vec cylinder_to_chart_real(const EndModel& model, const ChartPoint& p);

/// One additive term coeff * prod_j w_j^holo[j] * conj(w_j)^anti[j] in
/// output component `component`.
struct DiffeoTerm {
  int component = 0;
  Complex coeff = 0.0;
  std::vector<int> holo_powers;
  std::vector<int> anti_powers;

  int total_degree() const;
};

/// Phi(w) = w + sum of terms, every term of total degree >= 2 so that
/// Phi(0) = 0 and dPhi(0) = Id.
class PolynomialDiffeo {
 public:
  PolynomialDiffeo(int complex_dim, std::vector<DiffeoTerm> terms, std::string name);

  static PolynomialDiffeo identity(int complex_dim);
  /// w + (c conj(w_1)^2, 0, ...)
  static PolynomialDiffeo quadratic(int complex_dim, double coeff = 0.1);
  /// w + (c conj(w_1)^3, 0, ...)
  static PolynomialDiffeo cubic(int complex_dim, double coeff = 0.1);
  /// Built-in by name: identity | quadratic | cubic.
  static PolynomialDiffeo named(const std::string& name, int complex_dim, double coeff);

  int complex_dim() const { return complex_dim_; }
  const std::string& name() const { return name_; }
  const std::vector<DiffeoTerm>& terms() const { return terms_; }
  bool is_identity() const { return terms_.empty(); }

  CVec operator()(const CVec& w) const;
  /// Real 2N x 2N Jacobian in the interleaved layout.
  Mat jacobian(const CVec& w) const;
  /// Newton inverse; throws ErrorKind::invalid_diffeomorphism on failure.
  CVec inverse(const CVec& z) const;

 private:
  int complex_dim_;
  std::vector<DiffeoTerm> terms_;
  std::string name_;
};

struct DecayConstants {
  int order = 0;
  double c = 0.0;
  double delta = 0.0;
};

/// Almost complex structure on the end, evaluated as a 2N x 2N matrix acting
/// on Euler-coordinate tangent vectors. Immutable; copies share state.
class AcsField {
 public:
  enum class Kind { standard_cylindrical, pushforward, custom };
  using Evaluator = std::function<Mat(const ChartPoint&)>;

  /// User-supplied field; `limit` must be translation invariant.
  static AcsField custom(const EndModel& model, Evaluator eval, Evaluator limit,
                         std::string name = "custom", bool limit_is_standard = false);

  Kind kind() const;
  const EndModel& model() const;
  const std::string& name() const;
  Mat eval(const ChartPoint& p) const;
  Mat limit_eval(const ChartPoint& p) const;
  /// True when the translation-invariant limit is the standard structure i.
  bool limit_is_standard() const;
  /// The limit J_{-inf} as a field in its own right.
  AcsField limit() const;
  const PolynomialDiffeo* diffeo() const;
  const std::vector<DecayConstants>& decay_constants() const;
  AcsField with_decay_constants(std::vector<DecayConstants> constants) const;

 private:
  struct State;
  explicit AcsField(std::shared_ptr<const State> state);
  std::shared_ptr<const State> state_;

  friend AcsField standard_cylindrical_acs(const EndModel& model);
  friend AcsField pushforward_acs(const PolynomialDiffeo& phi, const EndModel& model);
};

/// psi-pushforward of the standard complex structure; translation invariant.
AcsField standard_cylindrical_acs(const EndModel& model);
/// J = (psi o Phi)_* i; limit is the standard cylindrical structure.
AcsField pushforward_acs(const PolynomialDiffeo& phi, const EndModel& model);

/// Per-point frame (d/dr, R, xi) with its dual covectors.
struct FrameSplitting {
  ChartPoint base;
  Vec radial;     // d/dr in Euler coordinates (= v)
  Vec reeb;       // R = J(d/dr)
  Mat xi_basis;   // 2N x (2N-2), orthonormal
  Vec lambda;     // lambda(x) = lambda.dot(x)
  Vec sigma;
  Mat pi_xi;      // projection onto xi along span{d/dr, R}

  TangentVector reeb_vector() const { return TangentVector::from_ambient(base, reeb); }
  double lambda_of(const Vec& x) const { return lambda.dot(x); }
  double sigma_of(const Vec& x) const { return sigma.dot(x); }
};

/// Relative singular-value cutoff used to detect the dimension of xi.
inline constexpr double kSplittingRankCutoff = 1e-8;

FrameSplitting splitting_from_matrix(const Mat& j, const ChartPoint& p);
FrameSplitting splitting_at(const AcsField& j, const ChartPoint& p);
FrameSplitting limit_splitting_at(const AcsField& j, const ChartPoint& p);

/// R_{-inf}(v) = J_{-inf}(d/dr); dr-component must vanish (ACC3).
TangentVector reeb_limit_field(const AcsField& j, const Vec& v);

struct FlowOptions {
  double abs_tol = 1e-10;
  double min_step = 1e-14;
};

/// Flow of R_{-inf} on the sphere (Dormand-Prince 5(4), renormalized).
Vec reeb_flow(const AcsField& j, const Vec& v, double t, const FlowOptions& options = {});

/// First return time of the Reeb flow through v, searched up to t_max.
double simple_period(const AcsField& j, const Vec& v, double t_max = 50.0);

struct ReebOrbit {
  double period = 0.0;
  int multiplicity = 1;
  std::function<Vec(double)> loop;  // on [0, period]
  double action = 0.0;
};

/// The k-fold Reeb orbit through v (period detected from the flow).
ReebOrbit reeb_orbit_through(const AcsField& j, const Vec& v, int multiplicity = 1);

/// Integral of lambda_{-inf} along the loop (spectral quadrature).
double orbit_action(const AcsField& j, const ReebOrbit& orbit, int samples = 256);

struct DecayEstimate {
  int order = 0;
  double c = 0.0;
  double delta = 0.0;
  bool exactly_cylindrical = false;
  bool non_decaying = false;  // fitted delta <= 0
  bool weak_decay = false;    // fitted delta close to 0
  std::vector<double> depths;
  std::vector<double> norms;
};

/// Fits sup_v |(J - J_{-inf})|_l ~ C e^{delta r} over the sampled depths
/// (only r <= -2 enter the fit). Order l <= 2 via finite differences.
DecayEstimate acc1_decay_estimate(const AcsField& j, std::span<const double> r_samples,
                                  int order = 0, int directions = 64,
                                  std::uint64_t seed = 12345);

}  // namespace hofer
