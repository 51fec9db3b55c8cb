// Acceptance run: one PASS/FAIL line per criterion. Thresholds are written
// out here rather than taken from the run configuration.

#include "hofer/cli.hpp"
#include "hofer/theorems.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace hofer;

namespace {

constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void verdict(int n, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", n, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double value(const cli::Record& r, const std::string& name) {
  const cli::Quantity* q = r.find(name);
  return q ? q->value : std::nan("");
}

std::vector<const cli::Record*> select(const cli::RunResult& res, const std::string& check) {
  std::vector<const cli::Record*> out;
  for (const auto& r : res.records)
    if (r.check == check) out.push_back(&r);
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void extremal_family() {
  const Clock::time_point t0 = Clock::now();
  const EndModel model(2, 1.0);
  const AcsField st = standard_cylindrical_acs(model);
  bool ok = true;
  double worst = 0.0;
  for (int k = 1; k <= 5; ++k) {
    std::vector<ComplexPolynomial> comps{ComplexPolynomial::monomial(k), ComplexPolynomial()};
    const PuncturedCurve c = PuncturedCurve::polynomial(PolynomialMap(comps));
    const double symp = e_symp_limit(c).value;
    const int mult = total_multiplicity(c);
    const EnergyValue om = e_omega(c, st);
    const BathtubSolution lam = e_lambda(c, st);
    const AsymptoticOrbit o = asymptotic_orbit(to_cylinder(c, Complex(0.0, 0.0), model), st, asymptotic_depths());
    const double rs = std::abs(symp - k * kPi) / (k * kPi);
    const double rl = std::abs(lam.value - 2 * kPi * k) / (2 * kPi * k);
    const double rt = std::abs(o.period_t - 2 * kPi * k) / (2 * kPi * k);
    worst = std::max({worst, rs, rl, rt});
    ok = ok && rs <= 1e-5 && mult == k && std::abs(om.value) <= 1e-8 && rl <= 1e-5 && rt <= 1e-5;
  }
  const double t = seconds_since(t0);
  verdict(1, ok && t < 10.0, "z^k, k = 1..5: worst relative error " + fmt("%.2e", worst) + ", " + fmt("%.2f", t) + " s");
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path base = argc > 1 ? argv[1] : "acceptance_out";

  extremal_family();

  cli::RunConfig cfg;
  cfg.out = (base / "run1").string();
  Clock::time_point t0 = Clock::now();
  const cli::RunResult res = cli::run(cfg);
  const double run_seconds = seconds_since(t0);

  // 2: monotonicity over the catalog
  {
    const auto catalog = default_catalog(EndModel(2, 1.0));
    int pushforwards = 0;
    for (const auto& e : catalog) pushforwards += e.family == "pushforward";
    bool ok = catalog.size() >= 20 && pushforwards > 0;
    double worst = 1e300;
    int radii = 0;
    for (const auto* r : select(res, "hbar")) {
      const double rad = value(*r, "r");
      const double gap = value(*r, "hbar") / (kPi * rad * rad);
      worst = std::min(worst, gap);
      ok = ok && gap >= 1.0 - 1e-3;
      ++radii;
    }
    const auto fits = select(res, "hbar_exponent");
    const double exponent = fits.empty() ? std::nan("") : value(*fits[0], "exponent");
    ok = ok && radii == 8 && std::abs(exponent - 2.0) <= 0.05;
    verdict(2, ok,
            std::to_string(catalog.size()) + " curves (" + std::to_string(pushforwards) + " pushforwards), min hbar/(pi r^2) " +
                fmt("%.6f", worst) + ", exponent " + fmt("%.4f", exponent));
  }

  // 3: energy bound
  {
    bool ok = true;
    int n = 0;
    double min_margin = 1e300, max_factor = 0.0;
    for (const auto* r : select(res, "energy_bound")) {
      const double m = value(*r, "margin");
      const double f = value(*r, "breaking_factor");
      min_margin = std::min(min_margin, m);
      max_factor = std::max(max_factor, f);
      ok = ok && m > 0.0 && std::isfinite(f) && f > 0.0 && f < 1.0;
      ++n;
    }
    verdict(3, ok && n >= 60,
            std::to_string(n) + " (curve, a) pairs, min margin " + fmt("%.3e", min_margin) + ", max breaking factor " +
                fmt("%.3e", max_factor));
  }

  // 4: orbit actions and the factor against the half-form
  {
    bool ok = true;
    int n = 0;
    double worst = 0.0, factor = 0.0, half = 0.0;
    for (const auto* r : select(res, "orbit_action")) {
      const double a = value(*r, "action");
      const double expected = value(*r, "expected_action");
      const double rel = std::abs(a - expected) / expected;
      worst = std::max(worst, rel);
      factor = value(*r, "mismatch_factor");
      half = value(*r, "lambda_st_action") / (expected / (2 * kPi));
      ok = ok && rel <= 1e-6 && std::abs(factor - 2.0) < 1e-6;
      ++n;
    }
    verdict(4, ok && n > 0,
            "actions 2 pi k to " + fmt("%.1e", worst) + " relative; half-form gives " + fmt("%.8f", half) +
                " k, mismatch factor " + fmt("%.8f", factor));
  }

  // 5: bathtub optimality
  {
    bool ok = true;
    int n = 0, violations = 0;
    double worst_step = 0.0;
    for (const auto* r : select(res, "bathtub")) {
      violations += static_cast<int>(value(*r, "violations"));
      worst_step = std::max(worst_step, value(*r, "cauchy_step"));
      ok = ok && value(*r, "test_functions") == 100 && r->status == "pass";
      ++n;
    }
    double worst_zk = 0.0;
    for (const auto* r : select(res, "extremal")) {
      const double k = value(*r, "k");
      worst_zk = std::max(worst_zk, std::abs(value(*r, "e_lambda") - 2 * kPi * k) / (2 * kPi * k));
    }
    ok = ok && violations == 0 && worst_step <= 1e-6 && worst_zk <= 1e-5;
    verdict(5, ok && n > 0,
            std::to_string(n) + " curves x 100 test functions, " + std::to_string(violations) +
                " violations, worst Cauchy step " + fmt("%.2e", worst_step) + ", z^k error " + fmt("%.2e", worst_zk));
  }

  // 6: decay of J - J_inf
  {
    double dq = std::nan(""), dc = std::nan("");
    bool exact = false;
    for (const auto* r : select(res, "acc1_decay")) {
      if (r->subject == "quadratic") dq = value(*r, "delta");
      if (r->subject == "cubic") dc = value(*r, "delta");
      if (r->subject == "standard") exact = value(*r, "exactly_cylindrical") == 1.0;
    }
    verdict(6, dq >= 0.9 && dq <= 1.1 && dc >= 1.8 && dc <= 2.2 && exact,
            "quadratic delta " + fmt("%.4f", dq) + ", cubic delta " + fmt("%.4f", dc) +
                (exact ? ", standard exactly cylindrical" : ", standard NOT flagged"));
  }

  // 7: structure and pullback positivity
  {
    bool ok = true;
    double jsq = 0.0, flow = 0.0, min_density = 1e300;
    int curves = 0;
    for (const auto* r : select(res, "structure")) {
      jsq = std::max(jsq, value(*r, "j_squared_residual"));
      flow = std::max(flow, value(*r, "flow_invariance_residual"));
    }
    for (const auto* r : select(res, "pullback_positivity")) {
      const double m = std::min(value(*r, "min_omega_density"), value(*r, "min_sigma_lambda_density"));
      min_density = std::min(min_density, m);
      ok = ok && m >= -1e-9;
      ++curves;
    }
    ok = ok && jsq < 1e-8 && flow < 1e-8 && curves >= 20;
    verdict(7, ok,
            "J^2 residual " + fmt("%.1e", jsq) + ", flow residual " + fmt("%.1e", flow) + ", min density " +
                fmt("%.2e", min_density) + " over " + std::to_string(curves) + " curves at 100 x 100");
  }

  // 8: Stokes
  {
    bool ok = true;
    int checked = 0, skipped = 0;
    double worst = 0.0;
    for (const auto* r : select(res, "stokes")) {
      if (r->status == "skipped") {
        ++skipped;
        continue;
      }
      int levels = 0;
      for (const auto& q : r->values)
        if (q.name.size() > 9 && q.name.compare(q.name.size() - 9, 9, "_residual") == 0) {
          worst = std::max(worst, q.value);
          ok = ok && q.value < 1e-3;
          ++levels;
        }
      ok = ok && levels == 3 && r->status == "pass";
      ++checked;
    }
    verdict(8, ok && checked > 0,
            std::to_string(checked) + " curves x 3 levels, worst residual " + fmt("%.2e", worst) + " (" +
                std::to_string(skipped) + " without asymptotic orbits skipped)");
  }

  // 9: determinism and runtime
  {
    cli::RunConfig again = cfg;
    again.out = (base / "run2").string();
    again.jobs = 2;
    const cli::RunResult res2 = cli::run(again);
    bool same = res2.files == res.files;
    for (const auto& f : res.files) same = same && slurp(base / "run1" / f) == slurp(base / "run2" / f);
    verdict(9, same && run_seconds < 300.0,
            std::string(same ? "byte-identical" : "DIFFERENT") + " outputs (jobs 1 and 2), full run " +
                fmt("%.1f", run_seconds) + " s, status " + res.status);
  }

  return failures == 0 ? 0 : 1;
}
