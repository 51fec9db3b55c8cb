#include "hofer/energy.hpp"

#include "hofer/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hofer {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double radial_a_s(const CylinderJet& j) { return j.xs.dot(j.point.v); }
double radial_a_t(const CylinderJet& j) { return j.xt.dot(j.point.v); }

// deepest s needed so that a(s, t) < level on a puncture sector
double deep_s(const PuncturedCurve& chart, double t, double start, double level) {
  double s = start;
  for (int it = 0; it < 40 && chart.a(s, t) >= level; ++it) s -= 8.0;
  if (chart.a(s, t) >= level) throw Error(ErrorKind::not_converged, "a(s, t) does not reach the requested depth");
  return s;
}

}  // namespace

std::vector<EndSector> end_sectors(const PuncturedCurve& curve, const EndModel& model) {
  std::vector<EndSector> out;
  if (!curve.is_disk()) {
    EndSector sec;
    sec.chart = curve;
    sec.puncture = true;
    sec.s_cut = [](double) { return 0.0; };
    out.push_back(std::move(sec));
    return out;
  }
  const auto records = multiplicity_at_point(curve);
  std::vector<Complex> seeds;
  for (const auto& r : records) seeds.push_back(r.puncture);
  const double dom = curve.domain_radius();
  auto add = [&](std::size_t js, const PuncturedCurve& chart, bool puncture, int order) {
    const Complex q = chart.chart_center();
    const double c = chart.cylinder_scale();
    std::vector<Complex> others;
    for (std::size_t m = 0; m < seeds.size(); ++m)
      if (m != js) others.push_back(seeds[m]);
    EndSector sec;
    sec.chart = chart;
    sec.puncture = puncture;
    sec.order = order;
    sec.s_cut = [q, c, dom, others](double t) {
      const Complex e = std::polar(1.0, kTwoPi * t);
      const double b = (std::conj(q) * e).real();
      double rho = -b + std::sqrt(std::max(0.0, b * b - std::norm(q) + dom * dom));
      for (const Complex& o : others) {
        const Complex d = o - q;
        const double proj = (e * std::conj(d)).real();
        if (proj > 0.0) rho = std::min(rho, std::norm(d) / (2.0 * proj));
      }
      return std::log(rho / c) / kTwoPi;
    };
    out.push_back(std::move(sec));
  };
  if (seeds.empty()) {
    add(0, end_chart(curve, 0.0, dom, model, false), false, 0);
    return out;
  }
  for (std::size_t js = 0; js < seeds.size(); ++js)
    add(js, to_cylinder(curve, seeds[js], model), true, records[js].order);
  return out;
}

std::vector<std::pair<double, double>> level_intervals(const PuncturedCurve& chart, double t, double s_lo,
                                                       double s_hi, double lo, double hi) {
  std::vector<std::pair<double, double>> out;
  if (!(s_hi > s_lo)) return out;
  auto cls = [&](double a) { return a <= lo ? -1 : (a >= hi ? 1 : 0); };
  auto a_at = [&](double s) { return chart.a(s, t); };
  const int n = std::max(8, static_cast<int>(std::ceil((s_hi - s_lo) * 128.0)));
  double prev_s = s_lo;
  double prev_a = a_at(s_lo);
  int prev_c = cls(prev_a);
  double start = prev_c == 0 ? s_lo : std::numeric_limits<double>::quiet_NaN();
  for (int i = 1; i <= n; ++i) {
    const double s = s_lo + (s_hi - s_lo) * i / n;
    const double a = a_at(s);
    const int c = cls(a);
    if (c != prev_c) {
      auto cross = [&](double level) {
        return numerics::find_root([&](double x) { return a_at(x) - level; }, prev_s, s, 1e-14);
      };
      if (prev_c == 0) {
        out.emplace_back(start, cross(c < 0 ? lo : hi));
      } else if (c == 0) {
        start = cross(prev_c < 0 ? lo : hi);
      } else {
        // jumped across the whole band inside one sample step
        const double x1 = cross(prev_c < 0 ? lo : hi);
        const double x2 = cross(prev_c < 0 ? hi : lo);
        out.emplace_back(std::min(x1, x2), std::max(x1, x2));
      }
    }
    prev_s = s;
    prev_a = a;
    prev_c = c;
  }
  if (prev_c == 0) out.emplace_back(start, s_hi);
  return out;
}

// ---------------------------------------------------------------------------
// E_omega

namespace {

// A row at t stands for a strip of width w in t. Across the strip the sector
// boundary moves as s_cut'(t) (t' - t), so near the cut the row is weighted by
// the fraction of the strip still inside the sector.
struct RowCut {
  double cut = 0.0;
  double sigma = 0.0;
  double slope = 0.0;  // s_cut'(t)

  double end() const { return cut + sigma; }
  double ramp_start() const { return cut - sigma; }
  double weight(double s) const {
    if (sigma <= 0.0) return s <= cut ? 1.0 : 0.0;
    return std::clamp(0.5 + (cut - s) / (2.0 * sigma), 0.0, 1.0);
  }
};

RowCut row_cut(const EndSector& sec, double t, double w) {
  RowCut rc;
  rc.cut = sec.s_cut(t);
  const double e = 1e-6;
  const double slope = (sec.s_cut(t + e) - sec.s_cut(t - e)) / (2.0 * e);
  if (std::isfinite(slope)) {
    rc.slope = slope;
    rc.sigma = 0.5 * w * std::abs(slope);
  }
  return rc;
}

// integrate f * weight over [s0, s1], keeping the ramp in its own pieces
double ramped_integral(const RowCut& rc, double s0, double s1,
                       const std::function<double(double, double, double)>& integrate) {
  double total = 0.0;
  const double k = std::clamp(rc.ramp_start(), s0, s1);
  if (k > s0) total += integrate(s0, k, 0.0);
  if (s1 > k) total += integrate(k, s1, 1.0);
  return total;
}

struct RowIntegral {
  double value = 0.0;
  double error = 0.0;
  double tail = 0.0;
  bool tail_ok = true;
};

// int over {a < level, s <= s_cut(t)} of density(jet) ds on one row, with a tail
// estimate below s_min for intervals that start there
RowIntegral row_integral(const EndSector& sec, double t, double w, double s_min, double level, double abs_tol,
                         const std::function<double(const CylinderJet&)>& density) {
  RowIntegral out;
  const RowCut rc = row_cut(sec, t, w);
  auto f = [&](double s) { return density(sec.chart.jet(s, t)); };
  for (const auto& [s0, s1] : level_intervals(sec.chart, t, s_min, rc.end(), -kInf, level)) {
    out.value += ramped_integral(rc, s0, s1, [&](double a, double b, double ramped) {
      const auto res = ramped > 0.0
                           ? numerics::integrate_adaptive([&](double s) { return f(s) * rc.weight(s); }, a, b,
                                                          abs_tol, 1e-10, 30)
                           : numerics::integrate_adaptive(f, a, b, abs_tol, 1e-10, 30);
      out.error += res.error;
      return res.value;
    });
    if (s0 == s_min) {
      const double f0 = std::abs(f(s_min));
      const double f1 = std::abs(f(s_min + 0.5));
      if (f0 > 0.0) {
        const double rate = f1 > 0.0 ? std::log(f1 / f0) / 0.5 : kInf;
        if (rate > 0.0) {
          out.tail += f0 / rate;
        } else {
          out.tail_ok = false;
        }
      }
    }
  }
  return out;
}

struct SweepResult {
  double value = 0.0;
  double error = 0.0;
  double tail = 0.0;
  bool tail_ok = true;
};

// midpoint rule in t over all sectors at nt nodes
SweepResult sweep(const std::vector<EndSector>& sectors, int nt, double s_min, double level, double abs_tol,
                  const std::function<double(const CylinderJet&)>& density) {
  const int rows = nt * static_cast<int>(sectors.size());
  std::vector<RowIntegral> res(rows);
  numerics::parallel_for(rows, [&](int idx) {
    const EndSector& sec = sectors[idx / nt];
    const double t = (idx % nt + 0.5) / nt;
    res[idx] = row_integral(sec, t, 1.0 / nt, s_min, level, abs_tol, density);
  });
  SweepResult out;
  numerics::CompensatedSum v;
  for (const auto& r : res) {
    v.add(r.value / nt);
    out.error += r.error / nt;
    out.tail += r.tail / nt;
    out.tail_ok = out.tail_ok && r.tail_ok;
  }
  out.value = v.value();
  return out;
}

}  // namespace

EnergyValue e_omega(const PuncturedCurve& curve, const AcsField& j, const EnergyOptions& opts) {
  const auto sectors = end_sectors(curve, j.model());
  const TwoForm om_inf = omega_inf_form(j);
  auto density = [&](const CylinderJet& jet) { return omega_density_formula(j, om_inf, jet); };
  const SweepResult coarse = sweep(sectors, opts.nt, opts.s_min, 0.0, opts.abs_tol, density);
  const SweepResult fine = sweep(sectors, 2 * opts.nt, opts.s_min, 0.0, opts.abs_tol, density);
  EnergyValue out;
  out.value = fine.value + fine.tail;
  out.tail_bound = fine.tail;
  out.tail_ok = fine.tail_ok;
  out.error = std::abs(fine.value - coarse.value) + fine.error + fine.tail;
  out.converged = fine.tail_ok && fine.tail <= 1e-4 * std::max(std::abs(out.value), 1e-300) + 1e-12;
  return out;
}

// ---------------------------------------------------------------------------
// E_lambda

namespace {

// cumulative sigma^lambda mass on one cell as a cubic Hermite function of r
struct MassCell {
  double r0 = 0.0;
  double r1 = 0.0;  // r0 <= r1
  double m = 0.0;   // total mass
  double d0 = 0.0;  // dM/dr at r0, r1
  double d1 = 0.0;
  double delta = 0.0;  // half-width of the box the row's t-strip spreads r over

  double lo() const { return r0 - delta; }
  double hi() const { return r1 + delta; }

  double cumulative(double r) const {
    const double w = r1 - r0;
    if (w <= 0.0) return r >= r1 ? m : 0.0;
    const double x = std::clamp((r - r0) / w, 0.0, 1.0);
    const double x2 = x * x;
    const double x3 = x2 * x;
    const double h10 = x3 - 2 * x2 + x;
    const double h01 = -2 * x3 + 3 * x2;
    const double h11 = x3 - x2;
    return h01 * m + w * (h10 * d0 + h11 * d1);
  }

  // int_{-inf}^{r} cumulative
  double integrated(double r) const {
    const double w = r1 - r0;
    if (r <= r0) return 0.0;
    if (w <= 0.0) return m * (r - r0);
    const double x = std::min((r - r0) / w, 1.0);
    const double x2 = x * x;
    const double x3 = x2 * x;
    const double x4 = x2 * x2;
    const double i10 = x4 / 4 - 2 * x3 / 3 + x2 / 2;
    const double i01 = -x4 / 2 + x3;
    const double i11 = x4 / 4 - x3 / 3;
    const double inside = w * (i01 * m + w * (i10 * d0 + i11 * d1));
    return inside + m * std::max(0.0, r - r1);
  }

  // cumulative convolved with the normalized box of half-width delta
  double smoothed(double r) const {
    if (delta <= 0.0) return cumulative(r);
    if (r <= lo()) return 0.0;
    if (r >= hi()) return m;
    return (integrated(r + delta) - integrated(r - delta)) / (2 * delta);
  }
};

struct MassTables {
  std::vector<MassCell> cells;  // weighted by dt
  double tail_density = 0.0;
  double r_floor = 0.0;
};

// One row (or sub-strip of it) being cut into mass cells.
struct RowStrip {
  const PuncturedCurve* chart = nullptr;
  const AcsField* j = nullptr;
  double t = 0.0;
  double weight = 0.0;  // width in t the row stands for
  RowCut cut;
  double tau = 0.0;         // offset of a sub-strip from the row; shifts r by a_t tau
  bool always_box = false;  // spread every cell over the strip, not only near-tangent ones
};

void add_cells(const RowStrip& row, double s0, double s1, std::vector<MassCell>& cells, int depth) {
  const PuncturedCurve& chart = *row.chart;
  const double t = row.t;
  const double weight = row.weight;
  auto dens = [&](const CylinderJet& jet, double s) {
    return sigma_lambda_density_formula(*row.j, jet) * row.cut.weight(s);
  };
  const CylinderJet j0 = chart.jet(s0, t);
  const CylinderJet j1 = chart.jet(s1, t);
  const CylinderJet jm = chart.jet(0.5 * (s0 + s1), t);
  const double f0 = dens(j0, s0);
  const double f1 = dens(j1, s1);
  const double fm = dens(jm, 0.5 * (s0 + s1));
  const double mass = (s1 - s0) / 6.0 * (f0 + 4.0 * fm + f1) * weight;
  const double a_t = radial_a_t(jm);
  const double shift = a_t * row.tau;
  const double a0 = j0.point.r + shift;
  const double a1 = j1.point.r + shift;
  const double as0 = radial_a_s(j0);
  const double as1 = radial_a_s(j1);
  const double asm_ = radial_a_s(jm);
  // the strip moves r by a_t (t' - t) to first order
  double delta = 0.5 * weight * std::abs(a_t);
  if (delta < 1e-9) delta = 0.0;  // below this the box quotient only adds cancellation
  const bool monotone = (as0 > 0 && as1 > 0 && asm_ > 0 && a1 > a0) || (as0 < 0 && as1 < 0 && asm_ < 0 && a1 < a0);
  if (!monotone) {
    const double span = std::max({a0, a1, jm.point.r + shift}) - std::min({a0, a1, jm.point.r + shift});
    if (depth < 6 && span > 1e-10) {
      const double mid = 0.5 * (s0 + s1);
      add_cells(row, s0, mid, cells, depth + 1);
      add_cells(row, mid, s1, cells, depth + 1);
      return;
    }
    const double r = jm.point.r + shift;
    cells.push_back({r, r, mass, 0.0, 0.0, delta});
    return;
  }
  MassCell c;
  if (a1 > a0) {
    c = {a0, a1, mass, weight * f0 / as0, weight * f1 / as1};
  } else {
    c = {a1, a0, mass, weight * f1 / -as1, weight * f0 / -as0};
  }
  // Fritsch-Carlson: keep the cumulative monotone where a_s is small
  const double slope = c.m / (c.r1 - c.r0);
  if (slope > 0.0) {
    const double al = c.d0 / slope;
    const double be = c.d1 / slope;
    const double n2 = al * al + be * be;
    if (n2 > 9.0) {
      const double f = 3.0 / std::sqrt(n2);
      c.d0 *= f;
      c.d1 *= f;
    }
  }
  // elsewhere only rows running closer to the level set than to the gradient need it
  c.delta = row.always_box || std::abs(asm_) < std::abs(a_t) ? delta : 0.0;
  cells.push_back(c);
}

MassTables mass_tables(const PuncturedCurve& curve, const AcsField& j, const EnergyOptions& opts) {
  const auto sectors = end_sectors(curve, j.model());
  const int nt = opts.nt;
  const int rows = nt * static_cast<int>(sectors.size());
  std::vector<std::vector<MassCell>> per_row(rows);
  std::vector<double> tails(rows, 0.0);
  numerics::parallel_for(rows, [&](int idx) {
    const EndSector& sec = sectors[idx / nt];
    const double t = (idx % nt + 0.5) / nt;
    const double w = 1.0 / nt;
    const double s_lo = sec.puncture ? deep_s(sec.chart, t, opts.s_min, opts.r_floor) : opts.s_min;
    const RowCut rc = row_cut(sec, t, w);
    const auto intervals = level_intervals(sec.chart, t, s_lo, rc.end(), opts.r_floor, 0.0);
    RowStrip row{&sec.chart, &j, t, w, rc};
    auto add_range = [&](const RowStrip& strip, double a, double b) {
      const int n = std::max(1, static_cast<int>(std::ceil((b - a) / opts.ds)));
      for (int i = 0; i < n; ++i) add_cells(strip, a + (b - a) * i / n, a + (b - a) * (i + 1) / n, per_row[idx], 0);
    };
    // Near the cut the truncation point and the r-shift across the strip are
    // correlated; sub-strips at offsets tau resolve that.
    constexpr int kSub = 8;
    for (const auto& [s0, s1] : intervals) {
      ramped_integral(rc, s0, s1, [&](double a, double b, double ramped) {
        if (ramped == 0.0) {
          add_range(row, a, b);
          return 0.0;
        }
        for (int k = 0; k < kSub; ++k) {
          RowStrip sub = row;
          sub.weight = w / kSub;
          sub.tau = w * ((k + 0.5) / kSub - 0.5);
          sub.cut = {rc.cut + rc.slope * sub.tau, rc.sigma / kSub, rc.slope};
          sub.always_box = true;
          const double end = std::min(b, sub.cut.end());
          if (end > a) add_range(sub, a, end);
        }
        return 0.0;
      });
    }
    if (sec.puncture && !intervals.empty() && intervals.front().first > s_lo) {
      // mass per unit r continues at its value on the floor level
      const CylinderJet jf = sec.chart.jet(intervals.front().first, t);
      tails[idx] = w * sigma_lambda_density_formula(j, jf) / std::abs(radial_a_s(jf));
    }
  });
  MassTables out;
  out.r_floor = opts.r_floor;
  for (int i = 0; i < rows; ++i) {
    out.cells.insert(out.cells.end(), per_row[i].begin(), per_row[i].end());
    out.tail_density += tails[i];
  }
  return out;
}

RMasses bin_tables(const MassTables& tables, double h) {
  RMasses out;
  out.bin_width = h;
  const int nbins = static_cast<int>(std::ceil(-tables.r_floor / h - 1e-9));
  out.mass.assign(nbins, 0.0);
  std::vector<numerics::CompensatedSum> sums(nbins);
  auto bin_of = [&](double r) { return std::clamp(static_cast<int>(std::floor(-r / h)), 0, nbins - 1); };
  for (const MassCell& c : tables.cells) {
    const double top = std::min(c.hi(), 0.0);
    const double below = top < c.hi() ? c.smoothed(top) : c.m;
    // bin b covers [-(b+1) h, -b h]; walk r upward
    const int b_lo = bin_of(c.lo());
    const int b_hi = bin_of(top);
    double prev = 0.0;
    for (int b = b_lo; b >= b_hi; --b) {
      const double cum = b == b_hi ? below : c.smoothed(std::min(top, -b * h));
      sums[b].add(cum - prev);
      prev = cum;
    }
    // strip spill above r = 0 is reflected back
    prev = below;
    for (int b = 0; prev < c.m && b < nbins; ++b) {
      const double edge = (b + 1) * h;
      const double cum = edge >= c.hi() || b == nbins - 1 ? c.m : c.smoothed(edge);
      sums[b].add(cum - prev);
      prev = cum;
    }
  }
  // below the floor the per-row tails are already part of tail_density
  for (int i = 0; i < nbins; ++i) out.mass[i] = sums[i].value();
  out.tail_density = tables.tail_density;
  return out;
}

}  // namespace

RMasses lambda_mass_distribution(const PuncturedCurve& curve, const AcsField& j, double bin_width,
                                 const EnergyOptions& opts) {
  return bin_tables(mass_tables(curve, j, opts), bin_width);
}

BathtubSolution solve_bathtub(const RMasses& masses) {
  BathtubSolution out;
  const double h = masses.bin_width;
  out.bin_width = h;
  const int n = static_cast<int>(masses.mass.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return masses.mass[a] > masses.mass[b]; });
  const double tail = masses.tail_density;
  double total = 0.0;
  for (double m : masses.mass) total += m;
  if (total <= 1e-300 && tail <= 1e-300) {
    out.degenerate = true;
    return out;
  }
  numerics::CompensatedSum value;
  double width = 0.0;
  std::vector<std::pair<int, double>> taken;  // bin, fraction
  for (int idx : order) {
    if (width >= 1.0) break;
    const double d = masses.mass[idx] / h;
    if (tail > d) break;
    const double frac = std::min(1.0, (1.0 - width) / h);
    value.add(frac * masses.mass[idx]);
    width += frac * h;
    out.level = d;
    taken.emplace_back(idx, frac);
  }
  if (width < 1.0) {
    out.tail_width = 1.0 - width;
    value.add(out.tail_width * tail);
    out.level = tail;
    width = 1.0;
  }
  out.value = value.value();
  // merge the chosen bins into r-intervals
  std::sort(taken.begin(), taken.end());
  for (const auto& [b, frac] : taken) {
    const double top = -b * h;
    const double bottom = top - frac * h;
    if (!out.selected_set.empty() && std::abs(out.selected_set.back().first - top) < 1e-12 * (1 + std::abs(top))) {
      out.selected_set.back().first = bottom;
    } else {
      out.selected_set.emplace_back(bottom, top);
    }
  }
  if (out.tail_width > 0.0) {
    const double floor_r = -n * h;
    out.selected_set.emplace_back(floor_r - out.tail_width, floor_r);
  }
  std::sort(out.selected_set.begin(), out.selected_set.end());
  return out;
}

BathtubSolution e_lambda(const PuncturedCurve& curve, const AcsField& j, const EnergyOptions& opts) {
  const MassTables tables = mass_tables(curve, j, opts);
  double h = opts.bin_width;
  BathtubSolution best = solve_bathtub(bin_tables(tables, h));
  best.history.push_back(best.value);
  for (int it = 0; it < opts.max_refinements; ++it) {
    h *= 0.5;
    BathtubSolution next = solve_bathtub(bin_tables(tables, h));
    next.history = best.history;
    next.history.push_back(next.value);
    const double change = std::abs(next.value - best.value);
    best = std::move(next);
    if (change <= opts.bathtub_tol * std::max(best.value, 1e-300)) {
      best.converged = true;
      break;
    }
  }
  if (best.degenerate) best.converged = true;
  if (opts.nt >= 8) {
    EnergyOptions coarse = opts;
    coarse.nt = opts.nt / 2;
    // rows converge at about first order where rows meet the sector cut; 2x the halving difference
    best.row_error = 2.0 * std::abs(best.value - solve_bathtub(bin_tables(mass_tables(curve, j, coarse), h)).value);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Test functions

namespace {

double bump(double x) { return std::abs(x) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0; }

}  // namespace

void validate_test_function(const TestFunction& phi) {
  if (!(phi.hi <= 1e-12) || !(phi.lo < phi.hi))
    throw Error(ErrorKind::validation, "test function support must lie in r <= 0");
  const int n = 4000;
  for (int i = 0; i <= n; ++i) {
    const double v = phi.phi(phi.lo + (phi.hi - phi.lo) * i / n);
    if (v < -1e-12 || v > 1.0 + 1e-12) throw Error(ErrorKind::validation, "test function leaves [0, 1]");
  }
  const int panels = std::max(16, static_cast<int>(std::ceil((phi.hi - phi.lo) / phi.feature)) * 4);
  const double mass = numerics::integrate_gl(phi.phi, phi.lo, phi.hi, panels, 16);
  if (std::abs(mass - 1.0) > 1e-8) throw Error(ErrorKind::validation, "test function does not integrate to 1");
}

TestFunction random_test_function(numerics::Stream& stream) {
  for (;;) {
    const int count = 1 + static_cast<int>(stream.uniform(0.0, 3.0));
    std::vector<double> centers;
    std::vector<double> widths;
    std::vector<double> weights;
    double lo = 0.0;
    for (int i = 0; i < count; ++i) {
      const double w = stream.uniform(0.6, 3.0);
      const double c = stream.uniform(-10.0, -w);
      centers.push_back(c);
      widths.push_back(w);
      weights.push_back(stream.uniform(0.2, 1.0));
      lo = std::min(lo, c - w);
    }
    auto raw = [=](double r) {
      double v = 0.0;
      for (std::size_t i = 0; i < centers.size(); ++i) v += weights[i] * bump((r - centers[i]) / widths[i]);
      return v;
    };
    const double hi = 0.0;
    const double mass = numerics::integrate_gl(raw, lo, hi, 256, 16);
    TestFunction f;
    f.phi = [raw, mass](double r) { return raw(r) / mass; };
    f.lo = lo;
    f.hi = hi;
    f.feature = 0.1;
    double peak = 0.0;
    for (int i = 0; i <= 2000; ++i) peak = std::max(peak, f.phi(lo + (hi - lo) * i / 2000.0));
    if (peak <= 1.0) return f;
  }
}

TestFunction smoothed_indicator(const BathtubSolution& sol, double width) {
  const std::vector<std::pair<double, double>> set = sol.selected_set;
  double lo = 0.0;
  for (const auto& iv : set) lo = std::min(lo, iv.first);
  // integral of the hat kernel of half-width `width` from -inf to x
  auto ramp = [width](double x) {
    if (x <= -width) return 0.0;
    if (x >= width) return 1.0;
    const double u = x / width;
    return u <= 0.0 ? 0.5 * (1.0 + u) * (1.0 + u) : 1.0 - 0.5 * (1.0 - u) * (1.0 - u);
  };
  auto mollified = [set, ramp](double r) {
    double v = 0.0;
    for (const auto& [a, b] : set) v += ramp(r - a) - ramp(r - b);
    return v;
  };
  // mass pushed past r = 0 is folded back, keeping the support in r <= 0
  TestFunction f;
  f.phi = [mollified](double r) { return r > 0.0 ? 0.0 : mollified(r) + mollified(-r); };
  f.lo = lo - width;
  f.hi = 0.0;
  f.feature = width;
  return f;
}

LambdaQuadrature::LambdaQuadrature(const PuncturedCurve& curve, const AcsField& j, double r_lo, double feature,
                                   const EnergyOptions& opts) {
  if (!(r_lo < 0.0) || !(feature > 0.0)) throw Error(ErrorKind::validation, "bad quadrature range");
  const auto sectors = end_sectors(curve, j.model());
  const int nt = opts.nt;
  const int rows = nt * static_cast<int>(sectors.size());
  const numerics::GaussRule& gl = numerics::gauss_legendre(8);
  std::vector<std::vector<std::pair<double, double>>> per_row(rows);
  numerics::parallel_for(rows, [&](int idx) {
    const EndSector& sec = sectors[idx / nt];
    const double t = (idx % nt + 0.5) / nt;
    const double s_lo = sec.puncture ? deep_s(sec.chart, t, opts.s_min, r_lo) : opts.s_min;
    const RowCut rc = row_cut(sec, t, 1.0 / nt);
    for (const auto& [s0, s1] : level_intervals(sec.chart, t, s_lo, rc.end(), r_lo, 0.0)) {
      ramped_integral(rc, s0, s1, [&](double a, double b, double) {
        const double span = std::abs(sec.chart.a(b, t) - sec.chart.a(a, t));
        // bumps need ~16 panels per feature for 1e-10 (ties with uniform densities are exact)
        const int panels = std::max(2, static_cast<int>(std::ceil(span / (feature / 16.0))));
        const double h = (b - a) / panels;
        for (int p = 0; p < panels; ++p)
          for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double s = a + h * (p + 0.5 * (gl.nodes[q] + 1.0));
            const CylinderJet jet = sec.chart.jet(s, t);
            const double w = 0.5 * h * gl.weights[q] * sigma_lambda_density_formula(j, jet) * rc.weight(s) / nt;
            per_row[idx].emplace_back(jet.point.r, w);
          }
        return 0.0;
      });
    }
  });
  for (const auto& row : per_row)
    for (const auto& [r, w] : row) {
      r_.push_back(r);
      w_.push_back(w);
    }
}

double LambdaQuadrature::integrate(const std::function<double(double)>& phi) const {
  numerics::CompensatedSum sum;
  for (std::size_t i = 0; i < r_.size(); ++i) sum.add(phi(r_[i]) * w_[i]);
  return sum.value();
}

double e_lambda_lower_bound(const PuncturedCurve& curve, const AcsField& j, const TestFunction& phi,
                            const EnergyOptions& opts) {
  validate_test_function(phi);
  return LambdaQuadrature(curve, j, phi.lo, phi.feature, opts).integrate(phi.phi);
}

// ---------------------------------------------------------------------------
// Symplectic area

AreaResult e_symp_limit(const PuncturedCurve& curve) {
  if (!curve.is_disk()) throw Error(ErrorKind::validation, "e_symp_limit needs a disk curve");
  const double dom = curve.domain_radius();
  auto ray = [&](double theta) {
    const Complex e = std::polar(1.0, theta);
    return numerics::integrate_gl([&](double rho) { return disk_area_density(curve, rho * e) * rho; }, 0.0, dom, 4,
                                  16);
  };
  const auto res = numerics::integrate_adaptive(ray, 0.0, kTwoPi, 1e-13, 1e-12, 12);
  return {res.value, res.error};
}

double level_regularity(const PuncturedCurve& curve, double a, const EndModel& model) {
  double worst = kInf;
  for (const EndSector& sec : end_sectors(curve, model)) {
    for (int k = 0; k < 64; ++k) {
      const double t = (k + 0.5) / 64;
      const double s_lo = sec.puncture ? deep_s(sec.chart, t, -8.0, -a) : -8.0;
      const double cut = sec.s_cut(t);
      for (const auto& [s0, s1] : level_intervals(sec.chart, t, s_lo, cut, -a, kInf)) {
        if (s0 > s_lo) worst = std::min(worst, std::abs(radial_a_s(sec.chart.jet(s0, t))) / kTwoPi);
        if (s1 < cut) worst = std::min(worst, std::abs(radial_a_s(sec.chart.jet(s1, t))) / kTwoPi);
      }
    }
  }
  return worst;
}

SympValue e_symp_a(const PuncturedCurve& curve, double a, const EndModel& model) {
  if (a < 0.0) throw Error(ErrorKind::validation, "a must be nonnegative");
  SympValue out;
  out.a = a;
  for (int k = 0; k <= 10; ++k) {
    const double trial = a + 1e-3 * k;
    if (level_regularity(curve, trial, model) > 1e-6) {
      out.a = trial;
      out.shift = trial - a;
      break;
    }
    if (k == 10) throw Error(ErrorKind::geometry, "no regular level near the requested a");
  }
  const AreaResult total = e_symp_limit(curve);
  const AreaResult inner = preimage_area(curve, model.chart_radius * std::exp(-out.a));
  out.value = std::max(0.0, total.value - inner.value);
  out.error = total.error + inner.error;
  return out;
}

// ---------------------------------------------------------------------------
// Stokes

StokesResult stokes_crosscheck(const PuncturedCurve& curve, const AcsField& j, double level,
                               const EnergyOptions& opts) {
  if (!(level > 0.0)) throw Error(ErrorKind::validation, "Stokes level must be positive");
  const auto sectors = end_sectors(curve, j.model());
  const int nt = opts.nt;

  // regular-level selection: neighbouring levels, keep the one with the largest min a_s
  auto first_crossing = [&](const EndSector& sec, double t, double lvl) {
    const double s_lo = deep_s(sec.chart, t, opts.s_min, -lvl);
    const auto iv = level_intervals(sec.chart, t, s_lo, sec.s_cut(t), -kInf, -lvl);
    if (iv.empty() || iv.front().second >= sec.s_cut(t))
      return std::numeric_limits<double>::quiet_NaN();
    return iv.front().second;
  };
  StokesResult out;
  double best_level = level;
  double best_min = -1.0;
  for (double delta : {0.0, -0.05, 0.05, -0.1, 0.1}) {
    const double lvl = level + delta;
    double m = kInf;
    for (const EndSector& sec : sectors) {
      if (!sec.puncture) continue;
      for (int k = 0; k < nt; k += 4) {
        const double t = (k + 0.5) / nt;
        const double s = first_crossing(sec, t, lvl);
        m = std::isnan(s) ? 0.0 : std::min(m, radial_a_s(sec.chart.jet(s, t)));
      }
    }
    if (m > best_min * 1.1) {
      best_min = m;
      best_level = lvl;
    }
  }
  out.level = best_level;

  const OneForm lam = lambda_inf_form(j);
  const TwoForm dlam = d_lambda_inf_form(j);
  const std::vector<double> depths{-2.0, -2.25, -2.5, -2.75, -3.0};
  numerics::CompensatedSum boundary;
  numerics::CompensatedSum interior;
  for (const EndSector& sec : sectors) {
    if (!sec.puncture) continue;
    std::vector<double> b(nt, 0.0);
    std::vector<double> in(nt, 0.0);
    std::vector<int> lost(nt, 0);
    numerics::parallel_for(nt, [&](int k) {
      const double t = (k + 0.5) / nt;
      const double s_star = first_crossing(sec, t, best_level);
      if (std::isnan(s_star)) {
        lost[k] = 1;
        return;
      }
      const CylinderJet jet = sec.chart.jet(s_star, t);
      const double slope = -radial_a_t(jet) / radial_a_s(jet);
      b[k] = lam(jet.point, jet.xs * slope + jet.xt);
      auto f = [&](double s) {
        const CylinderJet q = sec.chart.jet(s, t);
        return dlam(q.point, q.xs, q.xt);
      };
      const double s_lo = std::min(opts.s_min, s_star - 1.0);
      in[k] = numerics::integrate_adaptive(f, s_lo, s_star, opts.abs_tol, 1e-10, 30).value;
    });
    numerics::CompensatedSum sb;
    for (int k = 0; k < nt; ++k) {
      sb.add(b[k] / nt);
      interior.add(in[k] / nt);
      if (lost[k]) out.warning = "level set leaves the sector; partial sums reported";
    }
    out.per_sector.push_back(sb.value());
    boundary.add(sb.value());
    out.actions += asymptotic_orbit(sec.chart, j, depths).orbit.action;
  }
  out.boundary = boundary.value();
  out.interior = interior.value();
  const double scale = std::max({std::abs(out.actions), std::abs(out.boundary), 1e-300});
  out.residual = std::abs(out.boundary - out.interior - out.actions) / scale;
  if (out.actions == 0.0 && out.boundary == 0.0) out.residual = 0.0;
  return out;
}

// ---------------------------------------------------------------------------

EnergyReport energy_report(const PuncturedCurve& curve, const AcsField& j, double a, const EnergyOptions& opts) {
  EnergyReport rep;
  const EnergyValue om = e_omega(curve, j, opts);
  rep.bathtub = e_lambda(curve, j, opts);
  rep.e_omega = om.value;
  rep.e_lambda = rep.bathtub.value;
  rep.s_min = opts.s_min;
  rep.tail_bound = om.tail_bound;
  rep.quadrature_error = om.error;
  rep.converged = om.converged && rep.bathtub.converged;
  if (curve.is_disk()) {
    const SympValue sa = e_symp_a(curve, a, j.model());
    rep.e_symp_a = sa.value;
    rep.a = sa.a;
    rep.quadrature_error += sa.error;
    rep.e_symp_limit = e_symp_limit(curve).value;
  } else {
    rep.a = a;
  }
  if (rep.bathtub.history.size() >= 2)
    rep.quadrature_error += std::abs(rep.bathtub.history.back() - rep.bathtub.history[rep.bathtub.history.size() - 2]);
  rep.quadrature_error += rep.bathtub.row_error;
  rep.e_total_a = rep.e_symp_a + rep.e_omega + rep.e_lambda;
  return rep;
}

}  // namespace hofer
