#pragma once

// Verification harness: curve catalog and the quantitative checks run over it.

#include "hofer/energy.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace hofer {

struct Measured {
  double value = 0.0;
  double error = 0.0;
};

struct CheckRecord {
  std::string check;
  std::string curve;
  std::string status;  // pass | fail | skipped | not_applicable | excluded | error
  std::vector<std::pair<std::string, Measured>> values;
  std::string note;

  bool ok() const { return status != "fail" && status != "error"; }
  void add(const std::string& name, double value, double error = 0.0) { values.push_back({name, {value, error}}); }
};

struct CatalogEntry {
  std::string id;
  std::string family;
  PuncturedCurve curve;
  AcsField j;
};

/// The shipped catalog (N = 2, eps = 1): the z^k family up to kmax, planar
/// and non-planar polynomial curves, two-zero and zero-free curves, and
/// pushforwards under the quadratic and cubic diffeomorphisms.
std::vector<CatalogEntry> default_catalog(const EndModel& model, int kmax = 5, double diffeo_coeff = 0.1);

/// Total multiplicity of the curve at the origin (sum of orders over its zeros).
int total_multiplicity(const PuncturedCurve& curve);

/// Depths used for the asymptotic fits.
const std::vector<double>& asymptotic_depths();

CheckRecord check_convergence(const CatalogEntry& entry);

/// E(u|W_-) pieces that do not depend on a.
struct EndEnergies {
  EnergyValue omega;
  BathtubSolution lambda;
  double actions = 0.0;        // sum of asymptotic orbit actions (positive)
  double symp_limit = 0.0;
};
EndEnergies end_energies(const CatalogEntry& entry, const EnergyOptions& opts = {});

CheckRecord check_finiteness_equivalences(const CatalogEntry& entry, const EnergyOptions& opts = {});
/// Same, with the end energies supplied by the caller (evaluated only when needed).
CheckRecord check_finiteness_equivalences(const CatalogEntry& entry, const std::function<EndEnergies()>& energies);

struct BoundCheck {
  std::string curve;
  double a = 0.0;
  double depth = 0.0;  // R of the constants
  double lhs = 0.0;    // E_a
  double rhs = 0.0;    // C' E_symp,a - C sum(actions)
  double margin = 0.0;
  double c = 0.0;
  double c_prime = 0.0;
  double e_symp_a = 0.0;
  double breaking_factor = 0.0;  // scale on (C2, C4) where the margin reaches 0
  double breaking_factor_closed = 0.0;
  PositivityConstants constants;
  bool ok() const { return margin > 0.0 && breaking_factor > 0.0 && breaking_factor < 1.0; }
};

BoundCheck check_energy_bound(const CatalogEntry& entry, const PositivityConstants& constants, double a,
                              const EndEnergies& energies);
BoundCheck check_energy_bound(const CatalogEntry& entry, const PositivityConstants& constants, double a);

struct MonotonicityRow {
  std::string curve;
  double r = 0.0;
  int k = 0;
  double area = 0.0;
  double area_error = 0.0;
  double ratio = 0.0;  // area / k
  std::string status = "ok";  // ok | no_zero (k = 0) | outside_domain (r > boundary clearance)
};

struct MonotonicityReport {
  std::vector<MonotonicityRow> rows;
  std::vector<double> radii;
  std::vector<double> hbar;  // min ratio per radius (NaN when no row)
  double fit_exponent = 0.0;
  std::vector<std::string> skipped;  // curve ids with k = 0
};

/// Area of u^{-1}(B_r) and its ratio to the multiplicity.
MonotonicityRow check_monotonicity(const CatalogEntry& entry, double r);
MonotonicityReport monotonicity_sweep(const std::vector<CatalogEntry>& family, const std::vector<double>& radii);

CheckRecord check_corollary(const CatalogEntry& entry, const MonotonicityReport& sweep);

/// J^2 + Id residual and flow invariance of lambda_inf / omega_inf.
CheckRecord check_structure(const AcsField& j, std::uint64_t seed);
/// Minimum of the omega and sigma^lambda pullback densities on an n x n (s, t) grid.
CheckRecord check_pullback_positivity(const CatalogEntry& entry, int n = 100);
CheckRecord check_stokes(const CatalogEntry& entry, const std::vector<double>& levels, const EnergyOptions& opts = {});

}  // namespace hofer
