#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "immp/chain.hpp"
#include "immp/errors.hpp"
#include "immp/harness/config.hpp"
#include "immp/harness/experiments.hpp"
#include "immp/harness/output.hpp"
#include "immp/integrators.hpp"
#include "immp/models.hpp"
#include "immp/spectral.hpp"
#include "immp/stats.hpp"

namespace py = pybind11;
using namespace immp;

namespace {

// Double-well HMC positions; one value per step after burn_in.
Vec double_well_hmc(double nu, double dt, double gamma, long steps, long burn_in, double beta, std::uint64_t seed) {
  const SystemModel m = double_well_model();
  const PenaltyConfig pen = PenaltyConfig::fixed(nu);
  const ThermostatConfig th(beta, SymMatrix::scalar(1, gamma), SymMatrix::scalar(1, gamma));
  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.metropolis = true;
  RandomStream rq = rng_stream(seed, 0, "initial"), rz = rng_stream(seed, 0, "initial_z");
  const Vec q0 = Vec::Constant(1, 1.0);
  PhaseState s = sample_constrained_momenta(m, pen, th, q0, nu * m.xi(q0), rq, rz);
  NoiseStreams rng = NoiseStreams::make(seed, 0);
  Vec out(std::max<long>(0, steps - burn_in));
  for (long k = 0; k < steps; ++k) {
    s = hmc_step(m, pen, th, cfg, s, rng).first;
    if (k >= burn_in) out[k - burn_in] = s.q[0];
  }
  return out;
}

py::dict run(const std::string& name, const std::string& config_text) {
  RunConfig cfg = RunConfig::parse(config_text);
  cfg.set("run", "experiment", name);
  const ExperimentResult r = run_experiment(name, cfg);
  py::list checks, records;
  for (const auto& c : r.checks) checks.append(py::make_tuple(c.name, c.passed, c.detail));
  for (const auto& rec : r.records) records.append(py::make_tuple(rec.group, rec.x, rec.y, rec.yerr));
  py::dict d;
  d["experiment"] = r.experiment;
  d["checks"] = checks;
  d["records"] = records;
  d["csv"] = format_csv(r, cfg);
  return d;
}

}  // namespace

PYBIND11_MODULE(_immp, m) {
  m.doc() = "IMMP samplers: chain spectra, stability formulas and experiment drivers";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Moments>(m, "Moments")
      .def(py::init<>())
      .def(py::init([](double mean, double var) { return Moments{mean, var}; }), py::arg("mean"), py::arg("var"))
      .def_readwrite("mean", &Moments::mean)
      .def_readwrite("var", &Moments::var)
      .def("__repr__", [](const Moments& x) {
        return "Moments(mean=" + std::to_string(x.mean) + ", var=" + std::to_string(x.var) + ")";
      });

  m.def("v_int", &v_int, py::arg("r"), py::arg("continuous_cutoff") = false);
  m.def("v_ext", &v_ext, py::arg("q"));
  m.def("delta_k", &delta_k, py::arg("N"), py::arg("k"));
  m.def("tridiagonal_solve", &tridiagonal_solve, py::arg("N"), py::arg("nubar"), py::arg("w"));
  m.def("neumann_spectral_transform", &neumann_spectral_transform, py::arg("x"));
  m.def("neumann_spectral_inverse", &neumann_spectral_inverse, py::arg("xhat"));

  m.def("h_mode", &h_mode, py::arg("dt"), py::arg("N"), py::arg("nubar"), py::arg("k"));
  m.def("mode_propagator", &mode_propagator, py::arg("h"));
  m.def("critical_timestep", &critical_timestep, py::arg("N"), py::arg("nubar"));
  m.def("energy_variation_moments", &energy_variation_moments, py::arg("N"), py::arg("dt"), py::arg("nubar"));
  m.def("asymptotic_moments", &asymptotic_moments, py::arg("N"), py::arg("dt"), py::arg("nubar"));
  m.def("gaussian_acceptance", &gaussian_acceptance, py::arg("moments"));
  m.def("predicted_critical_dt", &predicted_critical_dt, py::arg("N"), py::arg("nubar"), py::arg("target") = 0.5);
  m.def("critical_dt_scaling_exponent", &critical_dt_scaling_exponent, py::arg("penalized"));

  m.def("double_well_hmc", &double_well_hmc, py::arg("nu"), py::arg("dt"), py::arg("gamma"), py::arg("steps"),
        py::arg("burn_in") = 0, py::arg("beta") = 1.0, py::arg("seed") = 1,
        "Positions of a double-well HMC chain with penalty nu.");
  m.def("double_well_cdf", [](double q, double beta) { return DoubleWellReference(beta).cdf(q); }, py::arg("q"),
        py::arg("beta") = 1.0);

  m.def("experiment_names", &experiment_names);
  m.def("run_experiment", &run, py::arg("name"), py::arg("config") = "",
        "Run a named experiment with an INI configuration string.");
}
