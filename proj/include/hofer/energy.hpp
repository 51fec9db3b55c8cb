#pragma once

// Energies of a curve in the negative end. The region u^{-1}(W_-) is covered
// by polar sectors around the zeros of the curve (Voronoi cells of the zeros,
// cut by the domain disk); on each sector the coordinates are the cylinder
// coordinates zeta = q + c e^{2 pi (s + i t)}.

#include "hofer/curves.hpp"
#include "hofer/forms.hpp"
#include "hofer/numerics.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hofer {

struct EnergyOptions {
  double s_min = -8.0;        // truncation depth of the cylinder integrals
  int nt = 64;                // midpoint nodes in t (doubled for the error estimate)
  double abs_tol = 1e-12;     // per-row adaptive quadrature
  double bin_width = 1e-3;    // initial bathtub bin width
  double bathtub_tol = 1e-6;  // relative change that stops bin refinement
  int max_refinements = 6;
  double r_floor = -20.0;     // bins cover [r_floor, 0]; below it the density is extrapolated
  double ds = 0.01;           // s spacing of the bathtub tables
};

/// One polar sector of u^{-1}(W_-).
struct EndSector {
  PuncturedCurve chart;            // cylinder-variant chart
  bool puncture = false;           // q is a zero (the sector reaches s = -inf)
  int order = 0;
  std::function<double(double)> s_cut;  // sector boundary s_cut(t)
};

std::vector<EndSector> end_sectors(const PuncturedCurve& curve, const EndModel& model);

/// Maximal s-intervals of [s_lo, s_hi] on which lo < a(s, t) < hi.
std::vector<std::pair<double, double>> level_intervals(const PuncturedCurve& chart, double t, double s_lo,
                                                       double s_hi, double lo, double hi);

struct EnergyValue {
  double value = 0.0;
  double error = 0.0;
  double tail_bound = 0.0;
  bool tail_ok = true;   // false: density not decaying at s_min, value covers the truncated domain only
  bool converged = true;
};

/// E_omega over u^{-1}(W_-), density omega(pi u_s, J pi u_s).
EnergyValue e_omega(const PuncturedCurve& curve, const AcsField& j, const EnergyOptions& opts = {});

struct BathtubSolution {
  double level = 0.0;   // density threshold c
  std::vector<std::pair<double, double>> selected_set;  // r-intervals, total width 1
  double tail_width = 0.0;  // part of the set below r_floor
  double value = 0.0;
  double bin_width = 0.0;
  std::vector<double> history;  // value at each bin width
  double row_error = 0.0;       // t-discretization estimate from a run with half the rows
  bool converged = false;
  bool degenerate = false;
};

/// Mass distribution of the sigma^lambda density over r, binned.
struct RMasses {
  double bin_width = 0.0;
  std::vector<double> mass;    // bin i covers [-(i+1) h, -i h]
  double tail_density = 0.0;   // mass per unit r below the last bin
};
RMasses lambda_mass_distribution(const PuncturedCurve& curve, const AcsField& j, double bin_width,
                                 const EnergyOptions& opts = {});

/// Exact sup of sum phi_i m_i over 0 <= phi <= 1 with total width 1.
BathtubSolution solve_bathtub(const RMasses& masses);

/// E_lambda: bathtub optimum, refined in the bin width until Cauchy.
BathtubSolution e_lambda(const PuncturedCurve& curve, const AcsField& j, const EnergyOptions& opts = {});

/// Test function phi on r <= 0 with support in [lo, hi] and variation on
/// scales no finer than `feature`.
struct TestFunction {
  std::function<double(double)> phi;
  double lo = -1.0;
  double hi = 0.0;
  double feature = 0.1;
};

/// Throws a validation error unless 0 <= phi <= 1 and int phi = 1 (1e-8).
void validate_test_function(const TestFunction& phi);
/// Seeded random admissible test function (normalized sum of smooth bumps).
TestFunction random_test_function(numerics::Stream& stream);
/// Indicator of the bathtub set mollified over `width` (shifted into r <= 0).
TestFunction smoothed_indicator(const BathtubSolution& sol, double width);

/// Gauss-Legendre nodes (r, weight x sigma^lambda density) over the part of
/// u^{-1}(W_-) with r in [r_lo, 0], fine enough for test functions whose
/// features are no finer than `feature`. Built once, reused for many phi.
class LambdaQuadrature {
 public:
  LambdaQuadrature(const PuncturedCurve& curve, const AcsField& j, double r_lo, double feature,
                   const EnergyOptions& opts = {});
  double integrate(const std::function<double(double)>& phi) const;
  std::size_t size() const { return r_.size(); }

 private:
  std::vector<double> r_;
  std::vector<double> w_;
};

/// int phi(a) [sigma(u_s)^2 + lambda(u_s)^2] ds dt by direct quadrature.
double e_lambda_lower_bound(const PuncturedCurve& curve, const AcsField& j, const TestFunction& phi,
                            const EnergyOptions& opts = {});

struct SympValue {
  double value = 0.0;
  double error = 0.0;
  double a = 0.0;       // level actually used
  double shift = 0.0;   // a - requested a (near-critical levels)
};

/// E_symp,a: omega_st area of the domain region with r >= -a.
SympValue e_symp_a(const PuncturedCurve& curve, double a, const EndModel& model);
/// omega_st area of the whole domain disk.
AreaResult e_symp_limit(const PuncturedCurve& curve);
/// min |a_s| / (2 pi) over the preimage of the level r = -a (disk curves).
double level_regularity(const PuncturedCurve& curve, double a, const EndModel& model);

struct StokesResult {
  double level = 0.0;      // r-level actually used (regular-level selection)
  double boundary = 0.0;   // level-set integral of lambda_inf
  double interior = 0.0;   // d lambda_inf over the deeper region
  double actions = 0.0;    // sum of asymptotic orbit actions
  double residual = 0.0;   // |boundary - interior - actions| / actions
  std::vector<double> per_sector;  // boundary integral per puncture
  std::string warning;
};
StokesResult stokes_crosscheck(const PuncturedCurve& curve, const AcsField& j, double level,
                               const EnergyOptions& opts = {});

struct EnergyReport {
  double e_omega = 0.0;
  double e_lambda = 0.0;
  double e_symp_a = 0.0;
  double a = 0.0;
  double e_total_a = 0.0;
  std::optional<double> e_symp_limit;
  double quadrature_error = 0.0;
  double s_min = 0.0;
  double tail_bound = 0.0;
  bool converged = true;
  BathtubSolution bathtub;
};

EnergyReport energy_report(const PuncturedCurve& curve, const AcsField& j, double a,
                           const EnergyOptions& opts = {});

}  // namespace hofer
