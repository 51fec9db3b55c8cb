#include "hofer/cli.hpp"
#include "hofer/theorems.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

py::dict run_with(const std::map<std::string, std::string>& options) {
  hofer::cli::RunConfig cfg;
  for (const auto& [key, value] : options) hofer::cli::set_key(cfg, key, value);
  hofer::cli::validate(cfg);
  hofer::cli::RunResult r;
  {
    py::gil_scoped_release release;
    r = hofer::cli::run(cfg);
  }
  return py::dict("exit_code"_a = r.exit_code, "status"_a = r.status, "report_json"_a = r.report_json,
                  "files"_a = r.files, "out"_a = cfg.out);
}

py::dict extremal(int k) {
  if (k < 1) throw py::value_error("k must be >= 1");
  const hofer::EndModel model(2, 1.0);
  const hofer::AcsField st = hofer::standard_cylindrical_acs(model);
  const hofer::PuncturedCurve c = hofer::PuncturedCurve::polynomial(
      hofer::PolynomialMap({hofer::ComplexPolynomial::monomial(k), hofer::ComplexPolynomial()}));
  const hofer::EnergyValue om = hofer::e_omega(c, st);
  const hofer::BathtubSolution lam = hofer::e_lambda(c, st);
  const hofer::AsymptoticOrbit o = hofer::asymptotic_orbit(
      hofer::to_cylinder(c, hofer::Complex(0.0, 0.0), model), st, hofer::asymptotic_depths());
  return py::dict("multiplicity"_a = hofer::total_multiplicity(c), "e_symp"_a = hofer::e_symp_limit(c).value,
                  "e_omega"_a = om.value, "e_lambda"_a = lam.value, "e_lambda_error"_a = lam.row_error,
                  "period"_a = o.period_t);
}

py::dict decay(const std::string& phi, double coeff) {
  const hofer::EndModel model(2, 1.0);
  const hofer::AcsField j = phi == "standard"
                                ? hofer::standard_cylindrical_acs(model)
                                : hofer::pushforward_acs(hofer::PolynomialDiffeo::named(phi, 2, coeff), model);
  const std::vector<double> depths{-8, -7, -6, -5, -4, -3, -2, -1};
  const hofer::DecayEstimate est = hofer::acc1_decay_estimate(j, depths, 0);
  return py::dict("delta"_a = est.delta, "c"_a = est.c, "exactly_cylindrical"_a = est.exactly_cylindrical);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hofer-energy verification core";
  // translators registered later are tried first
  py::register_exception<hofer::Error>(m, "HoferError", PyExc_RuntimeError);
  py::register_exception<hofer::cli::ConfigError>(m, "ConfigError", PyExc_ValueError);
  m.def("config_keys", &hofer::cli::config_keys, "Recognized configuration keys.");
  m.def("run", &run_with, "options"_a, "Run the verification suites; options are key -> text value.");
  m.def("extremal_energies", &extremal, "k"_a, "Energies and period of z -> (z^k, 0) in the standard model.");
  m.def("decay_rate", &decay, "phi"_a, "coeff"_a = 0.1, "Fitted decay of J - J_inf for a named structure.");
}
