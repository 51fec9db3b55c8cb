#pragma once

#include "hofer/forms.hpp"
#include "hofer/geometry.hpp"
#include "hofer/polynomial.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hofer {

/// A punctured curve. Disk variants (polynomial map into C^N, optionally
/// composed with a diffeomorphism Phi) live on |zeta| < domain_radius; the
/// cylinder variant is a map (a, u) of the half-cylinder s <= 0, t in R/Z.
class PuncturedCurve {
 public:
  enum class Variant { polynomial, pushforward, cylinder };
  using ScalarFn = std::function<double(double, double)>;
  using SphereFn = std::function<Vec(double, double)>;
  using JetFn = std::function<CylinderJet(double, double)>;

  /// Empty handle; only assignment is meaningful.
  PuncturedCurve() = default;

  static PuncturedCurve polynomial(PolynomialMap map, double domain_radius = 1.0,
                                   std::string name = "");
  static PuncturedCurve pushforward(PolynomialDiffeo phi, PolynomialMap base,
                                    double domain_radius = 1.0, std::string name = "");
  /// Cylinder map given by procedures; partials by centered differences.
  static PuncturedCurve cylinder(const EndModel& model, ScalarFn a, SphereFn u,
                                 std::string name = "");
  /// Cylinder map with analytic jets.
  static PuncturedCurve cylinder_from_jets(const EndModel& model, JetFn jet, std::string name = "");

  Variant variant() const;
  const std::string& name() const;
  int complex_dim() const;
  bool is_disk() const { return variant() != Variant::cylinder; }

  // disk variants
  double domain_radius() const;
  const PolynomialMap& base() const;
  const PolynomialDiffeo* diffeo() const;
  CVec map(Complex zeta) const;
  /// Real partial derivatives (d/dx, d/dy) of the map at zeta = x + iy.
  std::pair<Vec, Vec> partials(Complex zeta) const;

  // cylinder variant
  const EndModel& model() const;
  CylinderJet jet(double s, double t) const;
  double a(double s, double t) const;
  Vec u(double s, double t) const;
  /// Domain point the cylinder end is centred on and the scale c in
  /// zeta = q + c e^{2 pi (s + i t)} (cylinders built by to_cylinder).
  std::optional<Complex> puncture() const;
  Complex chart_center() const;
  double cylinder_scale() const;
  /// Precomposition with (s, t) -> (s + s0, t + t0).
  PuncturedCurve reparametrized(double s0, double t0) const;

 private:
  struct Impl;
  explicit PuncturedCurve(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
  friend PuncturedCurve end_chart(const PuncturedCurve&, Complex, double, const EndModel&, bool);
};

struct MultiplicityRecord {
  Complex puncture;
  int order = 0;
  int winding_check = 0;
};

/// Common zeros of a disk curve with their orders and winding-number checks.
/// Throws ill_posed_domain when a zero lies on the domain boundary.
std::vector<MultiplicityRecord> multiplicity_at_point(const PuncturedCurve& curve,
                                                      std::uint64_t seed = 7);

/// Winding number of a generic complex projection of the map on the circle
/// |zeta - center| = radius.
int projected_winding(const PuncturedCurve& curve, Complex center, double radius,
                      std::uint64_t seed = 7);

/// (a, u)(s, t) = psi(curve(q + c e^{2 pi (s + i t)})), c the largest scale
/// with the image in the closed chart ball and no other zero enclosed.
PuncturedCurve to_cylinder(const PuncturedCurve& curve, Complex q, const EndModel& model);

/// Polar chart (s, t) -> psi(curve(q + c e^{2 pi (s + i t)})) around any
/// domain point; no check that q is a zero or that the image stays in the ball.
PuncturedCurve end_chart(const PuncturedCurve& curve, Complex q, double c, const EndModel& model,
                         bool is_puncture = false);

struct CylinderGrid {
  double s_min = -8.0;
  double s_max = 0.0;
  int ns = 64;
  int nt = 64;
};

/// sup over the grid of |u_t - J u_s| (cylinder variant).
double cr_residual(const PuncturedCurve& cylinder, const AcsField& j, const CylinderGrid& grid = {});

double pullback_density(const PuncturedCurve& cylinder, const TwoForm& form, double s, double t);

struct AsymptoticOrbit {
  ReebOrbit orbit;
  double period_t = 0.0;          // slope of mean_t a(s, .) against s
  std::optional<double> decay_rate;  // per unit r; empty when the approach is exact
  double decay_rate_s = 0.0;      // per unit s
  double reeb_residual = 0.0;     // |loop' - R_inf(loop)|
  std::vector<double> depths;
  std::vector<double> residuals;  // sup_t |u(s, t) - gamma(T t)|
};

/// Asymptotic orbit, period and approach rate at the negative end; requires >= 3 depths s <= -2.
AsymptoticOrbit asymptotic_orbit(const PuncturedCurve& cylinder, const AcsField& j,
                                 std::span<const double> s_depths);

/// omega_st(z_x, z_y): pullback of the chart symplectic form to the domain.
double disk_area_density(const PuncturedCurve& curve, Complex zeta);

/// Area of curve^{-1}(B_r) with respect to the chart symplectic form.
struct AreaResult {
  double value = 0.0;
  double error = 0.0;
};
AreaResult preimage_area(const PuncturedCurve& curve, double radius);

/// min |curve| on the domain boundary circle (bounds radii whose preimage is
/// contained in the domain).
double boundary_clearance(const PuncturedCurve& curve, int samples = 1024);

}  // namespace hofer
