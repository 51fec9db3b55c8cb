#include "hofer/cli.hpp"

#include "hofer/theorems.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace hofer::cli {

namespace {

using Json = nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;
constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// text <-> values

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// shortest text that reads back to the same double
std::string num(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + num(xs[i]);
  return out;
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + xs[i];
  return out;
}

struct Parser {
  std::string key;
  int line;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(key, line, key + ": " + what);
  }
  double real(const std::string& v) const {
    double x = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x))
      fail("expected a finite number, got '" + v + "'");
    return x;
  }
  long long integer(const std::string& v) const {
    long long x = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) fail("expected an integer, got '" + v + "'");
    return x;
  }
  std::uint64_t unsigned64(const std::string& v) const {
    std::uint64_t x = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) fail("expected an unsigned 64-bit integer, got '" + v + "'");
    return x;
  }
  bool boolean(const std::string& v) const {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail("expected true or false, got '" + v + "'");
  }
  std::vector<double> reals(const std::string& v) const {
    std::vector<double> out;
    for (const auto& item : split_list(v)) out.push_back(real(item));
    if (out.empty()) fail("expected a comma-separated list of numbers");
    return out;
  }
};

struct KeySpec {
  const char* name;
  std::function<void(RunConfig&, const std::string&, const Parser&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define REAL_KEY(field) \
  KeySpec { #field, [](RunConfig& c, const std::string& v, const Parser& p) { c.field = p.real(v); }, \
            [](const RunConfig& c) { return num(c.field); } }
#define INT_KEY(field) \
  KeySpec { #field, [](RunConfig& c, const std::string& v, const Parser& p) { c.field = static_cast<int>(p.integer(v)); }, \
            [](const RunConfig& c) { return std::to_string(c.field); } }
#define LIST_KEY(field) \
  KeySpec { #field, [](RunConfig& c, const std::string& v, const Parser& p) { c.field = p.reals(v); }, \
            [](const RunConfig& c) { return join(c.field); } }

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs{
      INT_KEY(n),
      REAL_KEY(eps),
      KeySpec{"phi", [](RunConfig& c, const std::string& v, const Parser&) { c.phi = v; },
              [](const RunConfig& c) { return c.phi; }},
      REAL_KEY(phi_coeff),
      KeySpec{"families", [](RunConfig& c, const std::string& v, const Parser&) { c.families = split_list(v); },
              [](const RunConfig& c) { return join(c.families); }},
      INT_KEY(kmax),
      KeySpec{"suite", [](RunConfig& c, const std::string& v, const Parser&) { c.suite = v; },
              [](const RunConfig& c) { return c.suite; }},
      INT_KEY(grid),
      REAL_KEY(s_min),
      INT_KEY(nt),
      REAL_KEY(bin_width),
      INT_KEY(test_functions),
      KeySpec{"seed", [](RunConfig& c, const std::string& v, const Parser& p) { c.seed = p.unsigned64(v); },
              [](const RunConfig& c) { return std::to_string(c.seed); }},
      LIST_KEY(radii),
      LIST_KEY(a_values),
      LIST_KEY(stokes_levels),
      LIST_KEY(decay_depths),
      REAL_KEY(extremal_radius),
      REAL_KEY(tol_energy),
      REAL_KEY(tol_omega),
      REAL_KEY(tol_action),
      REAL_KEY(tol_bathtub),
      REAL_KEY(tol_dominance),
      REAL_KEY(tol_monotonicity),
      REAL_KEY(tol_exponent),
      REAL_KEY(tol_ratio),
      REAL_KEY(tol_decay),
      REAL_KEY(tol_structure),
      REAL_KEY(tol_density),
      REAL_KEY(tol_stokes),
      KeySpec{"out", [](RunConfig& c, const std::string& v, const Parser&) { c.out = v; },
              [](const RunConfig& c) { return c.out; }},
      INT_KEY(jobs),
      KeySpec{"plots", [](RunConfig& c, const std::string& v, const Parser& p) { c.plots = p.boolean(v); },
              [](const RunConfig& c) { return std::string(c.plots ? "true" : "false"); }},
  };
  return specs;
}

#undef REAL_KEY
#undef INT_KEY
#undef LIST_KEY

// keys that do not change report.json
bool is_run_local(const std::string& key) { return key == "out" || key == "jobs"; }

const std::set<std::string> kFamilies{"extremal", "polynomial", "perturbed", "pushforward", "no_zero"};

}  // namespace

// ---------------------------------------------------------------------------
// configuration

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : key_specs()) k.push_back(s.name);
    return k;
  }();
  return keys;
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value, int line) {
  for (const auto& s : key_specs()) {
    if (key == s.name) {
      s.set(cfg, trim(value), Parser{key, line});
      return;
    }
  }
  throw ConfigError(key, line, "unknown key '" + key + "'");
}

void parse_config(std::istream& in, RunConfig& cfg) {
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("", line, "line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError("", line, "line " + std::to_string(line) + ": empty key");
    set_key(cfg, key, text.substr(eq + 1), line);
  }
}

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", 0, "cannot read config file '" + path + "'");
  parse_config(in, cfg);
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& key, const std::string& what) { throw ConfigError(key, 0, key + ": " + what); };
  if (c.n < 1 || c.n > 4) fail("n", "complex dimension must be in 1..4");
  if (!(c.eps > 0.0)) fail("eps", "must be > 0");
  if (c.phi != "all" && c.phi != "standard" && c.phi != "quadratic" && c.phi != "cubic")
    fail("phi", "expected all, standard, quadratic or cubic");
  if (!(std::abs(c.phi_coeff) > 0.0)) fail("phi_coeff", "must be nonzero");
  for (const auto& f : c.families)
    if (f != "all" && f != "none" && !kFamilies.count(f)) fail("families", "unknown family '" + f + "'");
  if (c.kmax < 0 || c.kmax > 12) fail("kmax", "must be in 0..12");
  static const std::set<std::string> suites{"acs", "acs-check", "energy", "theorem3", "monotonicity", "all"};
  if (!suites.count(c.suite)) fail("suite", "expected acs, acs-check, energy, theorem3, monotonicity or all");
  if (c.grid < 2) fail("grid", "must be >= 2");
  if (!(c.s_min < -1.0)) fail("s_min", "must be < -1");
  if (c.nt < 4) fail("nt", "must be >= 4");
  if (!(c.bin_width > 0.0)) fail("bin_width", "must be > 0");
  if (c.test_functions < 0) fail("test_functions", "must be >= 0");
  for (double r : c.radii)
    if (!(r > 0.0)) fail("radii", "radii must be > 0");
  for (double a : c.a_values)
    if (!(a > 0.0)) fail("a_values", "levels must be > 0");
  for (double l : c.stokes_levels)
    if (!(l > 0.0)) fail("stokes_levels", "levels must be > 0");
  if (c.decay_depths.size() < 4) fail("decay_depths", "need at least 4 depths");
  if (!(c.extremal_radius > 0.0)) fail("extremal_radius", "must be > 0");
  const std::vector<std::pair<const char*, double>> tols{
      {"tol_energy", c.tol_energy},       {"tol_omega", c.tol_omega},       {"tol_action", c.tol_action},
      {"tol_bathtub", c.tol_bathtub},     {"tol_dominance", c.tol_dominance}, {"tol_monotonicity", c.tol_monotonicity},
      {"tol_exponent", c.tol_exponent},   {"tol_ratio", c.tol_ratio},       {"tol_decay", c.tol_decay},
      {"tol_structure", c.tol_structure}, {"tol_density", c.tol_density},   {"tol_stokes", c.tol_stokes}};
  for (const auto& [k, v] : tols)
    if (!(v > 0.0)) fail(k, "tolerances must be > 0");
  if (c.out.empty()) fail("out", "must not be empty");
  if (c.jobs < 1) fail("jobs", "must be >= 1");
  const bool needs_catalog = c.suite != "acs" && c.suite != "acs-check";
  const bool empty = std::find(c.families.begin(), c.families.end(), "none") != c.families.end() || c.families.empty();
  if (needs_catalog && !empty && c.n != 2) fail("n", "the curve catalog is defined for n = 2 (use families = none)");
}

std::string to_config_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& s : key_specs()) out += std::string(s.name) + " = " + s.get(cfg) + "\n";
  return out;
}

const Quantity* Record::find(const std::string& name) const {
  for (const auto& q : values)
    if (q.name == name) return &q;
  return nullptr;
}

std::string error_report(const std::string& kind, const std::string& message, const std::string& key, int line) {
  Json err{{"kind", kind}, {"message", message}};
  if (!key.empty()) err["key"] = key;
  if (line > 0) err["line"] = line;
  Json doc{{"schema_version", 1}, {"status", "error"}, {"errors", Json::array({err})}};
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// suites

namespace {

struct Context {
  Context(const RunConfig& c, EndModel m) : cfg(c), model(m) {}

  const RunConfig& cfg;
  EndModel model;
  EnergyOptions opts;
  std::vector<AcsField> structures;
  std::vector<CatalogEntry> catalog;
  std::vector<Record> records;
  std::map<std::string, std::string> csv;  // file name -> content
  std::map<std::string, std::string> svg;
  Json suites = Json::object();
  // caches shared between suites
  std::map<std::string, EndEnergies> energies;
  std::map<std::string, PositivityConstants> constants;

  std::uint64_t structure_seed() const { return cfg.seed; }
  std::uint64_t decay_seed() const { return cfg.seed + 1; }
  std::uint64_t constants_seed() const { return cfg.seed + 2; }
  std::uint64_t test_function_seed() const { return cfg.seed + 3; }
};

Record convert(const std::string& suite, const CheckRecord& c) {
  Record r{suite, c.check, c.curve, c.status, c.note, {}};
  for (const auto& [name, m] : c.values) r.values.push_back({name, m.value, m.error, std::nullopt});
  return r;
}

void set_tolerance(Record& r, const std::string& name, double tol) {
  for (auto& q : r.values)
    if (q.name == name) q.tolerance = tol;
}

std::string csv_num(double x) {
  if (std::isnan(x)) return "nan";
  return num(x);
}

class CsvTable {
 public:
  explicit CsvTable(const std::vector<std::string>& header) { text_ = join(header) + "\n"; }
  CsvTable& cell(const std::string& s) {
    text_ += (first_ ? "" : ",") + s;
    first_ = false;
    return *this;
  }
  CsvTable& cell(double x) { return cell(csv_num(x)); }
  CsvTable& cell(int x) { return cell(std::to_string(x)); }
  void end_row() {
    text_ += "\n";
    first_ = true;
  }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  bool first_ = true;
};

AcsField make_structure(const std::string& name, const RunConfig& cfg, const EndModel& model) {
  if (name == "standard") return standard_cylindrical_acs(model);
  return pushforward_acs(PolynomialDiffeo::named(name, cfg.n, cfg.phi_coeff), model);
}

int perturbation_degree(const AcsField& j) {
  int d = 0;
  if (const PolynomialDiffeo* phi = j.diffeo())
    for (const auto& t : phi->terms()) d = d == 0 ? t.total_degree() : std::min(d, t.total_degree());
  return d;
}

// Standard error of the least-squares slope.
double slope_error(const std::vector<double>& x, const std::vector<double>& y, const numerics::LineFit& fit) {
  const double n = static_cast<double>(x.size());
  if (n < 3) return std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  for (double v : x) mean += v / n;
  double sxx = 0.0;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mean) * (x[i] - mean);
    const double e = y[i] - fit.slope * x[i] - fit.intercept;
    sse += e * e;
  }
  return std::sqrt(sse / (n - 2) / sxx);
}

// Half-form (1/2) sum (x dy - y dx) along a closed loop, as the signed area
// of an inscribed polygon; error from halving the sample count.
Quantity half_form_integral(const ReebOrbit& orbit, int samples) {
  auto polygon = [&](int m) {
    numerics::CompensatedSum sum;
    Vec prev = orbit.loop(0.0);
    for (int i = 1; i <= m; ++i) {
      const Vec cur = orbit.loop(orbit.period * i / m);
      for (int k = 0; k + 1 < cur.size(); k += 2) sum.add(0.5 * (prev[k] * cur[k + 1] - prev[k + 1] * cur[k]));
      prev = cur;
    }
    return sum.value();
  };
  const double fine = polygon(samples);
  const double coarse = polygon(samples / 2);
  // inscribed polygons converge at second order
  return {"lambda_st_action", fine + (fine - coarse) / 3.0, std::abs(fine - coarse) / 3.0, std::nullopt};
}

void run_acs(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  CsvTable orbits({"structure", "k", "period", "action", "action_error", "lambda_st_action", "lambda_st_error",
                   "mismatch_factor"});
  CsvTable decay({"structure", "r", "sup_norm"});
  CsvTable consts({"structure", "a", "depth", "c1", "kappa1", "c2_raw", "c2", "c3", "c4"});
  for (const AcsField& j : ctx.structures) {
    // J^2 = -Id and flow invariance
    Record st = convert("acs", check_structure(j, ctx.structure_seed()));
    set_tolerance(st, "j_squared_residual", cfg.tol_structure);
    set_tolerance(st, "flow_invariance_residual", cfg.tol_structure);
    if (st.status != "error") {
      const bool ok = st.find("j_squared_residual")->value < cfg.tol_structure &&
                      st.find("flow_invariance_residual")->value < cfg.tol_structure;
      st.status = ok ? "pass" : "fail";
    }
    ctx.records.push_back(st);

    // ACC1 decay
    Record dr{"acs", "acc1_decay", j.name(), "pass", "", {}};
    try {
      const DecayEstimate est = acc1_decay_estimate(j, cfg.decay_depths, 0, 64, ctx.decay_seed());
      for (std::size_t i = 0; i < est.depths.size(); ++i) {
        decay.cell(j.name()).cell(est.depths[i]).cell(est.norms[i]);
        decay.end_row();
      }
      const int degree = perturbation_degree(j);
      dr.values.push_back({"exactly_cylindrical", est.exactly_cylindrical ? 1.0 : 0.0, 0.0, std::nullopt});
      if (degree == 0) {
        dr.note = "expected exactly cylindrical";
        if (!est.exactly_cylindrical) dr.status = "fail";
      } else {
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < est.depths.size(); ++i)
          if (est.depths[i] <= -2.0 && est.norms[i] > 0.0) {
            xs.push_back(est.depths[i]);
            ys.push_back(std::log(est.norms[i]));
          }
        const numerics::LineFit fit = numerics::fit_line(xs, ys);
        const double expected = degree - 1;
        dr.values.push_back({"delta", est.delta, slope_error(xs, ys, fit), cfg.tol_decay * expected});
        dr.values.push_back({"c", est.c, 0.0, std::nullopt});
        dr.values.push_back({"expected_delta", expected, 0.0, std::nullopt});
        dr.note = "perturbation of degree " + std::to_string(degree);
        if (est.exactly_cylindrical || !(std::abs(est.delta - expected) <= cfg.tol_decay * expected)) dr.status = "fail";
      }
    } catch (const Error& e) {
      dr.status = "error";
      dr.note = e.what();
    }
    ctx.records.push_back(dr);

    // positivity constants at depth R = a / 2
    for (double a : cfg.a_values) {
      Record cr{"acs", "constants", j.name(), "pass", "", {}};
      try {
        const std::string key = j.name() + "@" + num(a);
        if (!ctx.constants.count(key)) ctx.constants[key] = estimate_constants(j, a / 2.0, ctx.constants_seed());
        const PositivityConstants& c = ctx.constants.at(key);
        cr.values = {{"a", a, 0.0, std::nullopt},
                     {"depth", c.depth, 0.0, std::nullopt},
                     {"c1", c.c1, 0.0, std::nullopt},
                     {"kappa1", c.kappa1, 0.0, std::nullopt},
                     {"c2_raw", c.c2_raw, 0.0, std::nullopt},
                     // the safety factor is the allowance for sampling error
                     {"c2", c.c2, c.c2 - c.c2_raw, std::nullopt},
                     {"c3", c.c3, 0.0, std::nullopt},
                     {"c4", c.c4, 0.0, std::nullopt}};
        cr.note = "sampled estimate, seed " + std::to_string(c.seed) + ", " + std::to_string(c.samples) + " samples";
        if (!(std::isfinite(c.c2) && std::isfinite(c.c4) && c.c2 > 0.0 && c.c4 > 0.0)) cr.status = "fail";
        consts.cell(j.name()).cell(a).cell(c.depth).cell(c.c1).cell(c.kappa1).cell(c.c2_raw).cell(c.c2).cell(c.c3).cell(c.c4);
        consts.end_row();
      } catch (const Error& e) {
        cr.status = "error";
        cr.note = e.what();
      }
      cr.subject = j.name() + " a=" + num(a);
      ctx.records.push_back(cr);
    }

    // orbit actions: lambda(R) = 1 normalization against the half-form
    Vec v0 = Vec::Zero(ctx.model.real_dim());
    v0[0] = 1.0;
    for (int k = 1; k <= std::max(cfg.kmax, 1); ++k) {
      Record oa{"acs", "orbit_action", j.name() + " k=" + std::to_string(k), "pass", "", {}};
      try {
        const ReebOrbit orbit = reeb_orbit_through(j, v0, k);
        const double expected = 2 * kPi * k;
        const Quantity half = half_form_integral(orbit, 2048 * k);
        const double mismatch = orbit.action / half.value;
        oa.values = {{"period", orbit.period, 0.0, std::nullopt},
                     {"action", orbit.action, std::abs(orbit.action - orbit.period), cfg.tol_action * expected},
                     {"expected_action", expected, 0.0, std::nullopt},
                     half,
                     {"mismatch_factor", mismatch, std::abs(mismatch) * half.error / std::abs(half.value), std::nullopt}};
        oa.note = "action under lambda(R) = 1 is the period; the half-form 1/2 sum (x dy - y dx) gives half of it";
        if (!(std::abs(orbit.action - expected) <= cfg.tol_action * expected)) oa.status = "fail";
        orbits.cell(j.name()).cell(k).cell(orbit.period).cell(orbit.action).cell(std::abs(orbit.action - orbit.period));
        orbits.cell(half.value).cell(half.error).cell(mismatch);
        orbits.end_row();
      } catch (const Error& e) {
        oa.status = "error";
        oa.note = e.what();
      }
      ctx.records.push_back(oa);
    }
  }
  ctx.csv["orbit_actions.csv"] = orbits.text();
  ctx.csv["decay.csv"] = decay.text();
  ctx.csv["constants.csv"] = consts.text();
}

const EndEnergies& cached_energies(Context& ctx, const CatalogEntry& e) {
  auto it = ctx.energies.find(e.id);
  if (it == ctx.energies.end()) it = ctx.energies.emplace(e.id, end_energies(e, ctx.opts)).first;
  return it->second;
}

double cauchy_step(const BathtubSolution& b) {
  if (b.history.size() < 2) return std::numeric_limits<double>::infinity();
  const double last = b.history.back();
  const double prev = b.history[b.history.size() - 2];
  return std::abs(last - prev) / std::max(std::abs(last), 1e-300);
}

double lambda_error(const BathtubSolution& b) {
  const double step = b.history.size() >= 2 ? std::abs(b.history.back() - b.history[b.history.size() - 2]) : 0.0;
  return b.row_error + step;
}

std::vector<double> plot_levels() { return {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0}; }

void run_energy(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  CsvTable table({"curve", "family", "structure", "a", "e_symp_a", "e_symp_a_error", "e_omega", "e_omega_error",
                  "e_lambda", "e_lambda_error", "e_a", "e_a_error"});
  CsvTable curve_table({"curve", "a", "e_a", "e_a_error"});
  for (std::size_t idx = 0; idx < ctx.catalog.size(); ++idx) {
    const CatalogEntry& e = ctx.catalog[idx];
    Record en{"energy", "energies", e.id, "pass", "", {}};
    const EndEnergies* energies = nullptr;
    try {
      energies = &cached_energies(ctx, e);
      const double lam_err = lambda_error(energies->lambda);
      en.values.push_back({"e_omega", energies->omega.value, energies->omega.error, std::nullopt});
      en.values.push_back({"e_lambda", energies->lambda.value, lam_err, std::nullopt});
      en.values.push_back({"actions", energies->actions, 0.0, std::nullopt});
      if (e.curve.is_disk()) {
        const AreaResult lim = e_symp_limit(e.curve);
        en.values.push_back({"e_symp_limit", lim.value, lim.error, std::nullopt});
      }
      bool finite = std::isfinite(energies->omega.value) && std::isfinite(energies->lambda.value);
      for (double a : cfg.a_values) {
        const SympValue s = e_symp_a(e.curve, a, ctx.model);
        const double ea = s.value + energies->omega.value + energies->lambda.value;
        const double ea_err = s.error + energies->omega.error + lam_err;
        en.values.push_back({"e_symp_a_" + num(a), s.value, s.error, std::nullopt});
        en.values.push_back({"e_a_" + num(a), ea, ea_err, std::nullopt});
        finite = finite && std::isfinite(ea);
        table.cell(e.id).cell(e.family).cell(e.j.name()).cell(a).cell(s.value).cell(s.error);
        table.cell(energies->omega.value).cell(energies->omega.error).cell(energies->lambda.value).cell(lam_err);
        table.cell(ea).cell(ea_err);
        table.end_row();
      }
      if (cfg.plots) {
        for (double a : plot_levels()) {
          const SympValue s = e_symp_a(e.curve, a, ctx.model);
          curve_table.cell(e.id).cell(a).cell(s.value + energies->omega.value + energies->lambda.value);
          curve_table.cell(s.error + energies->omega.error + lam_err);
          curve_table.end_row();
        }
      }
      if (!energies->omega.tail_ok) en.note = "E_omega covers the truncated domain only";
      if (!finite) en.status = "fail";
    } catch (const Error& ex) {
      en.status = "error";
      en.note = ex.what();
    }
    ctx.records.push_back(en);

    // closed forms for z -> (z^k, 0)
    if (e.family == "extremal" && energies) {
      Record x{"energy", "extremal", e.id, "pass", "", {}};
      try {
        const int k = e.curve.base().components()[0].degree();
        const int mult = total_multiplicity(e.curve);
        const AreaResult lim = e_symp_limit(e.curve);
        const AsymptoticOrbit o =
            asymptotic_orbit(to_cylinder(e.curve, Complex(0.0, 0.0), ctx.model), e.j, asymptotic_depths());
        const double two_pi_k = 2 * kPi * k;
        x.values = {{"k", static_cast<double>(k), 0.0, std::nullopt},
                    {"multiplicity", static_cast<double>(mult), 0.0, 0.0},
                    {"e_symp_limit", lim.value, lim.error, cfg.tol_energy * kPi * k},
                    {"e_omega", energies->omega.value, energies->omega.error, cfg.tol_omega},
                    {"e_lambda", energies->lambda.value, lambda_error(energies->lambda), cfg.tol_energy * two_pi_k},
                    {"period_t", o.period_t, 0.0, cfg.tol_energy * two_pi_k}};
        const bool ok = mult == k && std::abs(lim.value - kPi * k) <= cfg.tol_energy * kPi * k &&
                        std::abs(energies->omega.value) <= cfg.tol_omega &&
                        std::abs(energies->lambda.value - two_pi_k) <= cfg.tol_energy * two_pi_k &&
                        std::abs(o.period_t - two_pi_k) <= cfg.tol_energy * two_pi_k;
        if (!ok) x.status = "fail";
      } catch (const Error& ex) {
        x.status = "error";
        x.note = ex.what();
      }
      ctx.records.push_back(x);
    }

    // bathtub optimality: Cauchy in the bin width, dominance over test functions
    if (energies) {
      Record b{"energy", "bathtub", e.id, "pass", "", {}};
      try {
        const BathtubSolution& sol = energies->lambda;
        const double step = cauchy_step(sol);
        b.values.push_back({"e_lambda", sol.value, lambda_error(sol), std::nullopt});
        b.values.push_back({"cauchy_step", step, 0.0, cfg.tol_bathtub});
        b.values.push_back({"bin_width", sol.bin_width, 0.0, std::nullopt});
        int violations = 0;
        double best = -std::numeric_limits<double>::infinity();
        if (cfg.test_functions > 0) {
          // random bumps have width >= 0.6 and support in [-13, 0]
          const LambdaQuadrature quad(e.curve, e.j, -13.5, 0.6, ctx.opts);
          numerics::Stream stream = numerics::Stream::substream(ctx.test_function_seed(), idx);
          for (int i = 0; i < cfg.test_functions; ++i) {
            const TestFunction phi = random_test_function(stream);
            const double v = quad.integrate(phi.phi);
            best = std::max(best, v);
            if (v > sol.value + cfg.tol_dominance) ++violations;
          }
          b.values.push_back({"best_test_function", best, 0.0, std::nullopt});
          b.values.push_back({"max_excess", best - sol.value, 0.0, cfg.tol_dominance});
        }
        b.values.push_back({"violations", static_cast<double>(violations), 0.0, 0.0});
        b.values.push_back({"test_functions", static_cast<double>(cfg.test_functions), 0.0, std::nullopt});
        if (!(step <= cfg.tol_bathtub) || violations > 0) b.status = "fail";
      } catch (const Error& ex) {
        b.status = "error";
        b.note = ex.what();
      }
      ctx.records.push_back(b);
    }

    Record st = convert("energy", check_stokes(e, cfg.stokes_levels, ctx.opts));
    if (st.status == "pass" || st.status == "fail") {
      bool ok = st.note.empty();
      for (auto& q : st.values)
        if (q.name.size() > 9 && q.name.compare(q.name.size() - 9, 9, "_residual") == 0) {
          q.tolerance = cfg.tol_stokes;
          ok = ok && q.value < cfg.tol_stokes;
        }
      st.status = ok ? "pass" : "fail";
    }
    ctx.records.push_back(st);

    Record pos = convert("energy", check_pullback_positivity(e, cfg.grid));
    if (pos.status == "pass" || pos.status == "fail") {
      set_tolerance(pos, "min_omega_density", cfg.tol_density);
      set_tolerance(pos, "min_sigma_lambda_density", cfg.tol_density);
      const Quantity* om = pos.find("min_omega_density");
      const Quantity* sl = pos.find("min_sigma_lambda_density");
      if (om && sl) pos.status = om->value >= -cfg.tol_density && sl->value >= -cfg.tol_density ? "pass" : "fail";
    }
    ctx.records.push_back(pos);

    ctx.records.push_back(convert("energy", check_convergence(e)));
    ctx.records.push_back(convert("energy", check_finiteness_equivalences(e, [&] { return cached_energies(ctx, e); })));
  }
  ctx.csv["energies.csv"] = table.text();
  if (cfg.plots) ctx.csv["energy_vs_a.csv"] = curve_table.text();
}

void run_theorem3(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  CsvTable table({"curve", "structure", "a", "depth", "lhs", "rhs", "margin", "c", "c_prime", "e_symp_a",
                  "breaking_factor", "breaking_factor_closed"});
  for (const CatalogEntry& e : ctx.catalog) {
    for (double a : cfg.a_values) {
      Record r{"theorem3", "energy_bound", e.id + " a=" + num(a), "pass", "", {}};
      try {
        const std::string key = e.j.name() + "@" + num(a);
        if (!ctx.constants.count(key)) ctx.constants[key] = estimate_constants(e.j, a / 2.0, ctx.constants_seed());
        const EndEnergies& en = cached_energies(ctx, e);
        const BoundCheck b = check_energy_bound(e, ctx.constants.at(key), a, en);
        const double lhs_err = lambda_error(en.lambda) + en.omega.error;
        r.values = {{"a", a, 0.0, std::nullopt},
                    {"lhs", b.lhs, lhs_err, std::nullopt},
                    {"rhs", b.rhs, 0.0, std::nullopt},
                    {"margin", b.margin, lhs_err, std::nullopt},
                    {"c", b.c, 0.0, std::nullopt},
                    {"c_prime", b.c_prime, 0.0, std::nullopt},
                    {"e_symp_a", b.e_symp_a, 0.0, std::nullopt},
                    {"breaking_factor", b.breaking_factor, std::abs(b.breaking_factor - b.breaking_factor_closed),
                     std::nullopt},
                    {"breaking_factor_closed", b.breaking_factor_closed, 0.0, std::nullopt}};
        if (!b.ok()) r.status = "fail";
        table.cell(e.id).cell(e.j.name()).cell(a).cell(b.depth).cell(b.lhs).cell(b.rhs).cell(b.margin).cell(b.c);
        table.cell(b.c_prime).cell(b.e_symp_a).cell(b.breaking_factor).cell(b.breaking_factor_closed);
        table.end_row();
      } catch (const Error& ex) {
        r.status = "error";
        r.note = ex.what();
      }
      ctx.records.push_back(r);
    }
  }
  ctx.csv["energy_bounds.csv"] = table.text();
}

// ---------------------------------------------------------------------------
// SVG

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
  bool line = true;
  bool markers = true;
  bool dashed = false;
};

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<Series>& series, bool log_axes) {
  const double w = 720, h = 480, left = 80, right = 200, top = 40, bottom = 60;
  auto tx = [&](double v) { return log_axes ? std::log10(v) : v; };
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y) || (log_axes && (x <= 0 || y <= 0))) continue;
      x0 = std::min(x0, tx(x));
      x1 = std::max(x1, tx(x));
      y0 = std::min(y0, tx(y));
      y1 = std::max(y1, tx(y));
    }
  if (!(x0 < x1)) { x0 -= 1; x1 += 1; }
  if (!(y0 < y1)) { y0 -= 1; y1 += 1; }
  const double padx = 0.05 * (x1 - x0), pady = 0.05 * (y1 - y0);
  x0 -= padx; x1 += padx; y0 -= pady; y1 += pady;
  auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * (w - left - right); };
  auto py = [&](double v) { return h - bottom - (tx(v) - y0) / (y1 - y0) * (h - top - bottom); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
                                 "#7f7f7f", "#bcbd22", "#17becf"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
    << " " << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title) << "</text>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w - left - right << "\" height=\""
    << h - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  // ticks: decades or 5 even steps
  auto ticks = [&](double lo, double hi) {
    std::vector<double> t;
    if (log_axes) {
      for (double d = std::ceil(lo * 4) / 4; d <= hi + 1e-12; d += 0.25) t.push_back(std::pow(10.0, d));
    } else {
      for (int i = 0; i <= 5; ++i) t.push_back(lo + (hi - lo) * i / 5.0);
    }
    return t;
  };
  char label[32];
  for (double v : ticks(x0, x1)) {
    std::snprintf(label, sizeof label, "%.3g", v);
    o << "<line x1=\"" << fixed(px(v)) << "\" y1=\"" << h - bottom << "\" x2=\"" << fixed(px(v)) << "\" y2=\""
      << h - bottom + 5 << "\" stroke=\"black\"/>";
    o << "<text x=\"" << fixed(px(v)) << "\" y=\"" << h - bottom + 18 << "\" text-anchor=\"middle\">" << label
      << "</text>\n";
  }
  for (double v : ticks(y0, y1)) {
    std::snprintf(label, sizeof label, "%.3g", v);
    o << "<line x1=\"" << left - 5 << "\" y1=\"" << fixed(py(v)) << "\" x2=\"" << left << "\" y2=\"" << fixed(py(v))
      << "\" stroke=\"black\"/>";
    o << "<text x=\"" << left - 8 << "\" y=\"" << fixed(py(v) + 4) << "\" text-anchor=\"end\">" << label
      << "</text>\n";
  }
  o << "<text x=\"" << left + (w - left - right) / 2 << "\" y=\"" << h - 15 << "\" text-anchor=\"middle\">"
    << escape(xlabel) << "</text>\n";
  o << "<text x=\"18\" y=\"" << top + (h - top - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << top + (h - top - bottom) / 2 << ")\">" << escape(ylabel) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    const char* color = colors[i % 10];
    std::string path;
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y) || (log_axes && (x <= 0 || y <= 0))) continue;
      path += (path.empty() ? "M" : " L") + fixed(px(x)) + "," + fixed(py(y));
    }
    if (s.line && !path.empty())
      o << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    if (s.markers)
      for (const auto& [x, y] : s.points) {
        if (!std::isfinite(x) || !std::isfinite(y) || (log_axes && (x <= 0 || y <= 0))) continue;
        o << "<circle cx=\"" << fixed(px(x)) << "\" cy=\"" << fixed(py(y)) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
      }
    const double ly = top + 14 + 16.0 * i;
    o << "<line x1=\"" << w - right + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << w - right + 32 << "\" y2=\""
      << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "")
      << "/>";
    o << "<text x=\"" << w - right + 38 << "\" y=\"" << ly << "\">" << escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void run_monotonicity(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const MonotonicityReport sweep = monotonicity_sweep(ctx.catalog, cfg.radii);

  CsvTable rows({"curve", "r", "k", "area", "area_error", "ratio", "status"});
  for (const auto& row : sweep.rows) {
    rows.cell(row.curve).cell(row.r).cell(row.k).cell(row.area).cell(row.area_error).cell(row.ratio).cell(row.status);
    rows.end_row();
  }
  ctx.csv["monotonicity_sweep.csv"] = rows.text();

  CsvTable hbar({"r", "hbar", "pi_r2"});
  for (std::size_t i = 0; i < sweep.radii.size(); ++i) {
    const double r = sweep.radii[i];
    const double model = kPi * r * r;
    hbar.cell(r).cell(sweep.hbar[i]).cell(model);
    hbar.end_row();
    Record rec{"monotonicity", "hbar", "r=" + num(r), "pass", "", {}};
    // error of the minimizing row's area, over its multiplicity
    double err = 0.0;
    for (const auto& row : sweep.rows)
      if (row.r == r && row.status == "ok" && row.ratio == sweep.hbar[i]) err = row.area_error / std::max(row.k, 1);
    rec.values = {{"r", r, 0.0, std::nullopt},
                  {"hbar", sweep.hbar[i], err, std::nullopt},
                  {"pi_r2", model, 0.0, std::nullopt},
                  {"relative_gap", sweep.hbar[i] / model - 1.0, err / model, cfg.tol_monotonicity}};
    if (std::isnan(sweep.hbar[i])) {
      rec.status = "skipped";
      rec.note = "no curve through p reaches this radius";
    } else if (!(sweep.hbar[i] >= model * (1.0 - cfg.tol_monotonicity))) {
      rec.status = "fail";
    }
    ctx.records.push_back(rec);
  }
  ctx.csv["hbar.csv"] = hbar.text();

  int fitted = 0;
  for (double v : sweep.hbar) fitted += std::isfinite(v) && v > 0.0;
  Record fit{"monotonicity", "hbar_exponent", "catalog", "pass", "", {}};
  if (fitted >= 2) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < sweep.radii.size(); ++i)
      if (std::isfinite(sweep.hbar[i]) && sweep.hbar[i] > 0.0) {
        xs.push_back(std::log(sweep.radii[i]));
        ys.push_back(std::log(sweep.hbar[i]));
      }
    const numerics::LineFit lf = numerics::fit_line(xs, ys);
    const double se = slope_error(xs, ys, lf);
    fit.values = {{"exponent", sweep.fit_exponent, std::isnan(se) ? 0.0 : se, cfg.tol_exponent},
                  {"points", static_cast<double>(fitted), 0.0, std::nullopt}};
    if (!(std::abs(sweep.fit_exponent - 2.0) <= cfg.tol_exponent)) fit.status = "fail";
  } else {
    fit.status = "skipped";
    fit.note = "fewer than two radii with data";
  }
  ctx.records.push_back(fit);
  for (const auto& id : sweep.skipped) {
    Record s{"monotonicity", "hbar_member", id, "skipped", "curve misses p: k = 0", {}};
    ctx.records.push_back(s);
  }

  for (const CatalogEntry& e : ctx.catalog) ctx.records.push_back(convert("monotonicity", check_corollary(e, sweep)));

  // extremal family: area / (k r^2) = pi
  CsvTable ext({"curve", "k", "r", "area", "area_error", "ratio"});
  for (const CatalogEntry& e : ctx.catalog) {
    if (e.family != "extremal") continue;
    const double r = cfg.extremal_radius;
    const MonotonicityRow row = check_monotonicity(e, r);
    Record rec{"monotonicity", "extremal_area", e.id, "pass", "", {}};
    if (row.status != "ok") {
      rec.status = "skipped";
      rec.note = row.status;
    } else {
      const double ratio = row.area / (row.k * r * r);
      const double ratio_err = row.area_error / (row.k * r * r);
      rec.values = {{"k", static_cast<double>(row.k), 0.0, std::nullopt},
                    {"r", r, 0.0, std::nullopt},
                    {"area", row.area, row.area_error, std::nullopt},
                    {"ratio", ratio, ratio_err, cfg.tol_ratio}};
      if (!(std::abs(ratio - kPi) <= cfg.tol_ratio)) rec.status = "fail";
      ext.cell(e.id).cell(row.k).cell(r).cell(row.area).cell(row.area_error).cell(ratio);
      ext.end_row();
    }
    ctx.records.push_back(rec);
  }
  ctx.csv["monotonicity.csv"] = ext.text();

  if (cfg.plots) {
    Series data{"hbar(r)", {}, true, true, false};
    Series model{"pi r^2", {}, true, false, true};
    for (std::size_t i = 0; i < sweep.radii.size(); ++i) {
      data.points.push_back({sweep.radii[i], sweep.hbar[i]});
      model.points.push_back({sweep.radii[i], kPi * sweep.radii[i] * sweep.radii[i]});
    }
    ctx.svg["hbar.svg"] = svg_plot("hbar(r): minimal area over multiplicity", "r", "hbar", {data, model}, true);
  }
}

void energy_plot(Context& ctx) {
  std::vector<Series> series;
  for (const CatalogEntry& e : ctx.catalog) {
    auto it = ctx.energies.find(e.id);
    if (it == ctx.energies.end()) continue;
    Series s{e.id, {}, true, true, false};
    for (double a : plot_levels()) {
      const SympValue v = e_symp_a(e.curve, a, ctx.model);
      s.points.push_back({a, v.value + it->second.omega.value + it->second.lambda.value});
    }
    series.push_back(std::move(s));
  }
  // keep the legend readable: the extremal family and up to 6 others
  std::vector<Series> shown;
  int others = 0;
  for (auto& s : series)
    if (s.name.rfind("zk_", 0) == 0 || others++ < 6) shown.push_back(std::move(s));
  if (!shown.empty()) ctx.svg["energy_vs_a.svg"] = svg_plot("E_a against a", "a", "E_a", shown, false);
}

Json quantity_json(const Quantity& q) {
  Json j{{"value", q.value}, {"error", q.error}};
  if (q.tolerance) j["tolerance"] = *q.tolerance;
  return j;
}

Json record_json(const Record& r) {
  Json j{{"suite", r.suite}, {"check", r.check}, {"subject", r.subject}, {"status", r.status}};
  if (!r.note.empty()) j["note"] = r.note;
  Json values = Json::object();
  for (const auto& q : r.values) values[q.name] = quantity_json(q);
  j["values"] = values;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::validation, "cannot write " + path.string());
  out << text;
}

std::vector<std::string> selected_suites(const std::string& suite) {
  if (suite == "all") return {"acs", "energy", "theorem3", "monotonicity"};
  if (suite == "acs-check") return {"acs"};
  return {suite};
}

}  // namespace

RunResult run(const RunConfig& cfg) {
  validate(cfg);
  numerics::set_default_jobs(cfg.jobs);

  Context ctx(cfg, EndModel(cfg.n, cfg.eps));
  ctx.opts.s_min = cfg.s_min;
  ctx.opts.nt = cfg.nt;
  ctx.opts.bin_width = cfg.bin_width;
  ctx.opts.bathtub_tol = cfg.tol_bathtub;

  const std::vector<std::string> names =
      cfg.phi == "all" ? std::vector<std::string>{"standard", "quadratic", "cubic"} : std::vector<std::string>{cfg.phi};
  for (const auto& name : names) ctx.structures.push_back(make_structure(name, cfg, ctx.model));

  const std::vector<std::string> suites = selected_suites(cfg.suite);
  const bool needs_catalog = suites != std::vector<std::string>{"acs"};
  std::set<std::string> families(cfg.families.begin(), cfg.families.end());
  if (families.count("none")) families.clear();
  if (families.count("all")) families = kFamilies;
  if (needs_catalog && !families.empty()) {
    for (auto& e : default_catalog(ctx.model, cfg.kmax, cfg.phi_coeff)) {
      if (!families.count(e.family)) continue;
      if (std::find(names.begin(), names.end(), e.j.name()) == names.end()) continue;
      ctx.catalog.push_back(std::move(e));
    }
  }

  for (const auto& suite : suites) {
    const std::size_t before = ctx.records.size();
    if (suite == "acs") run_acs(ctx);
    if (suite == "energy") run_energy(ctx);
    if (suite == "theorem3") run_theorem3(ctx);
    if (suite == "monotonicity" && !ctx.catalog.empty()) run_monotonicity(ctx);
    int counted = 0, failed = 0;
    for (std::size_t i = before; i < ctx.records.size(); ++i) {
      counted += ctx.records[i].counted();
      failed += ctx.records[i].counted() && ctx.records[i].status != "pass";
    }
    Json s{{"status", counted == 0 ? "no checks run" : (failed ? "fail" : "pass")}, {"checks", counted},
           {"failed", failed}};
    if (suite != "acs" && ctx.catalog.empty()) s["note"] = "empty catalog";
    ctx.suites[suite] = s;
  }
  if (cfg.plots && std::find(suites.begin(), suites.end(), "energy") != suites.end()) energy_plot(ctx);

  int counted = 0, passed = 0, failed = 0, errors = 0;
  Json error_records = Json::array();
  for (const auto& r : ctx.records) {
    if (!r.counted()) continue;
    ++counted;
    if (r.status == "pass") ++passed;
    if (r.status == "fail") ++failed;
    if (r.status == "error") ++errors;
    if (r.status != "pass") {
      Json err{{"kind", r.status == "fail" ? "check_failed" : "check_error"},
               {"suite", r.suite},
               {"check", r.check},
               {"subject", r.subject}};
      err["message"] = r.note.empty() ? r.check + " outside tolerance" : r.note;
      error_records.push_back(err);
    }
  }

  RunResult result;
  result.status = counted == 0 ? "no checks run" : (failed + errors ? "fail" : "pass");
  result.exit_code = failed + errors ? 1 : 0;

  Json report;
  report["schema_version"] = 1;
  report["tool"] = Json{{"name", "verify"}, {"version", kVersion}};
  report["status"] = result.status;
  report["summary"] = Json{{"checks", counted},
                           {"passed", passed},
                           {"failed", failed},
                           {"errors", errors},
                           {"not_counted", static_cast<int>(ctx.records.size()) - counted}};
  Json config = Json::object();
  for (const auto& s : key_specs())
    if (!is_run_local(s.name)) config[s.name] = s.get(cfg);
  report["config"] = config;
  Json catalog = Json::array();
  for (const auto& e : ctx.catalog)
    catalog.push_back(Json{{"id", e.id}, {"family", e.family}, {"structure", e.j.name()}});
  Json structures = Json::array();
  for (const auto& j : ctx.structures) structures.push_back(j.name());
  report["provenance"] = Json{{"generator", std::string("verify ") + kVersion},
                              {"seeds", Json{{"structure", std::to_string(ctx.structure_seed())},
                                             {"decay", std::to_string(ctx.decay_seed())},
                                             {"constants", std::to_string(ctx.constants_seed())},
                                             {"test_functions", std::to_string(ctx.test_function_seed())}}},
                              {"structures", structures},
                              {"catalog", catalog}};
  report["suites"] = ctx.suites;
  Json checks = Json::array();
  for (const auto& r : ctx.records) checks.push_back(record_json(r));
  report["checks"] = checks;
  report["errors"] = error_records;

  result.report_json = report.dump(2) + "\n";
  result.records = std::move(ctx.records);

  const std::filesystem::path out(cfg.out);
  std::filesystem::create_directories(out);
  write_file(out / "report.json", result.report_json);
  result.files.push_back("report.json");
  for (const auto& [name, text] : ctx.csv) {
    write_file(out / name, text);
    result.files.push_back(name);
  }
  for (const auto& [name, text] : ctx.svg) {
    write_file(out / name, text);
    result.files.push_back(name);
  }
  return result;
}

}  // namespace hofer::cli
