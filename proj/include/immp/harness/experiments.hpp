#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "immp/chain.hpp"
#include "immp/harness/config.hpp"
#include "immp/harness/output.hpp"
#include "immp/spectral.hpp"
#include "immp/stat_tests.hpp"
#include "immp/stats.hpp"

namespace immp {

// ---------------------------------------------------------------- exactness

/// Boltzmann law of the double well exp(-beta (q^2-1)^2), normalized by
/// quadrature; exact rejection sampler with a Gaussian envelope.
class DoubleWellReference {
 public:
  explicit DoubleWellReference(double beta);
  double beta() const { return beta_; }
  double density(double q) const;
  double cdf(double q) const;
  double probability(double a, double b) const { return cdf(b) - cdf(a); }
  double sample(RandomStream& rng) const;

 private:
  double beta_;
  double log_z_ = 0.0;
  double lo_ = -4.0, step_ = 0.0;
  std::vector<double> table_;
  double envelope_log_ = 0.0;
};

struct ExactnessOptions {
  std::vector<double> nus{0.1, 1.0, 10.0};
  long samples = 1000000;
  /// steps applied to each exact draw before it is recorded
  int steps_per_sample = 3;
  /// dt = dt_scale * sqrt(1 + nu^2) unless dt > 0
  double dt_scale = 0.6;
  double dt = 0.0;
  /// gamma = 2/dt (complete momentum refresh) unless gamma > 0
  double gamma = 0.0;
  double beta = 1.0;
  bool metropolis = true;
  int bins = 60;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct ExactnessRow {
  double nu = 0.0;
  double dt = 0.0;
  double acceptance = 0.0;
  TestResult chi2;
  TestResult ks;
  std::vector<double> edges;
  std::vector<double> counts;
  std::vector<double> probs;
};

/// Independent exact draws of (q, p, z, p_z), each advanced by
/// steps_per_sample Langevin/HMC steps; the final positions are compared
/// with the Boltzmann law (chi-square on bins, KS).
std::vector<ExactnessRow> exactness_study(const ExactnessOptions& opt);

// ------------------------------------------------------------ chain helpers

/// Equilibrium chain state: flat start at 0.5, then `steps` exact HMC steps
/// with a large penalty (nubar^2 = 0.1).
Vec chain_equilibrium_positions(Index N, const ChainModel& like, std::uint64_t seed, std::uint64_t replica,
                                long steps);

/// `count` equilibrium configurations: the first after `burn_in` steps of
/// the same HMC run, then one every `spacing` steps.
std::vector<Vec> chain_equilibrium_snapshots(Index N, const ChainModel& like, std::uint64_t seed,
                                            std::uint64_t replica, long burn_in, int count, long spacing);

/// Chain state at q with momenta from the constrained canonical law.
PhaseState chain_state_at(const ChainModel& chain, const Vec& q, std::uint64_t seed, std::uint64_t replica);

/// One step of the chain sampler: Verlet baseline when nubar = 0, IMMP otherwise.
std::pair<PhaseState, StepReport> chain_step(const ChainModel& chain, const SystemModel& sys,
                                             const PenaltyConfig& pen, const ThermostatConfig& thermo,
                                             const IntegratorConfig& cfg, const PhaseState& s, NoiseStreams& rng);

/// Mean Metropolis acceptance over `steps` HMC steps from `start`.
double chain_acceptance(const ChainModel& chain, const PhaseState& start, double dt, long steps,
                        std::uint64_t seed, std::uint64_t replica);

struct CriticalDt {
  double dt = 0.0;
  /// (dt, acceptance) pairs visited by the search
  std::vector<std::pair<double, double>> visited;
};
/// Bisection in log dt for acceptance = target between lo and hi. The
/// acceptance is averaged over runs from each configuration in q_eq, with
/// the same noise realization at each trial step.
CriticalDt chain_critical_dt(const ChainModel& chain, const std::vector<Vec>& q_eq, double target, double lo,
                             double hi, int bisection_steps, long steps, std::uint64_t seed);

// -------------------------------------------------------------- test2

struct StabilityOptions {
  std::vector<double> Ns{64, 128, 256, 512};
  /// nubar^2 values; 0 is the Verlet baseline
  std::vector<double> nubar2{1e-2, 0.0};
  double target = 0.5;
  long steps_per_point = 2000;
  int bisection_steps = 6;
  long equilibration_steps = 20000;
  /// acceptance is averaged over this many equilibrium configurations
  int replicas = 8;
  long snapshot_spacing = 2000;
  /// repeat the scan on the harmonic chain, where the exponents are known
  bool harmonic_control = true;
  /// acceptance curves at N = curve_N
  Index curve_N = 100;
  std::vector<double> curve_nubar2{1.0, 1e-1, 1e-2};
  std::vector<double> curve_dt;
  double beta = 10.0;
  double gamma = 0.1;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct StabilityRow {
  double nubar2 = 0.0;
  Index N = 0;
  double dt_crit = 0.0;
  bool harmonic = false;
};

struct StabilityFit {
  double nubar2 = 0.0;
  bool harmonic = false;
  LinearFit fit;  // log dt_crit vs log N; alpha = -slope
  double alpha() const { return -fit.slope; }
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  std::vector<StabilityFit> fits;
  /// (nubar2, dt, acceptance)
  std::vector<std::tuple<double, double, double>> curves;
};

StabilityReport stability_study(const StabilityOptions& opt);

// -------------------------------------------------------------- test1

struct MacroOptions {
  Index N = 100;
  std::vector<double> nubar2{1e-2, 1e-3, 1e-4, 1e-5};
  /// time step per nubar2 entry (same length)
  std::vector<double> dts{1e-3, 5e-4, 2e-4, 1e-4};
  double dt_verlet = 1e-4;
  /// length of each transition-time run
  double horizon = 400.0;
  double sample_every = 1e-3;
  double a = 0.4;
  double b = 0.6;
  std::size_t min_events = 50;
  /// short same-noise series length
  double short_horizon = 2.0;
  /// relaxation runs from the flat start
  int relax_replicas = 4;
  double relax_horizon = 20.0;
  long equilibration_steps = 20000;
  double beta = 10.0;
  double gamma = 0.1;
  bool continuous_cutoff = false;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct TransitionRow {
  double nubar2 = 0.0;  // 0: Verlet
  double dt = 0.0;
  TransitionTimes raw;
  double normalized = 0.0;
  double normalized_se = 0.0;
};

struct MacroReport {
  double verlet_calibration = 0.0;
  double verlet_calibration_se = 0.0;
  std::vector<TransitionRow> rows;
  std::vector<Record> records;
};

/// Transition time of the center of mass for one chain run of `horizon`
/// time units started from equilibrium.
TransitionTimes chain_transition_time(const ChainModel& chain, double dt, const MacroOptions& opt,
                                      std::uint64_t replica, std::vector<double>* c_series = nullptr,
                                      std::vector<double>* l_series = nullptr);

/// Verlet-normalized transition times. The time unit is the mean Verlet
/// transition time of an independent calibration run.
MacroReport macro_study(const MacroOptions& opt, bool with_series = true);

// -------------------------------------------------------------- spectral

struct SpectralOptions {
  Index N = 64;
  std::vector<double> nubars{0.0, 0.3};
  long cfl_steps = 100000;
  double below = 0.95;
  double above = 1.05;
  double growth = 1e3;
  long mc_samples = 100000;
  /// dt = dt_scale * critical_timestep for the moment check
  double dt_scale = 0.5;
  Index normality_N = 256;
  long normality_samples = 5000;
  Index asymptotic_N = 512;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct CflRun {
  double nubar = 0.0;
  double dt = 0.0;
  double max_energy_ratio = 0.0;
  bool diverged = false;
  long steps_done = 0;
};

/// Harmonic chain leapfrog run (no thermostat) from a canonical start;
/// diverged when the energy exceeds `growth` times the initial energy.
CflRun harmonic_cfl_run(Index N, double nubar, double dt, long steps, double growth, std::uint64_t seed);

struct MomentCheck {
  double nubar = 0.0;
  double dt = 0.0;
  Moments exact;
  double mc_mean = 0.0, mc_mean_se = 0.0;
  double mc_var = 0.0, mc_var_se = 0.0;
};

/// beta_N dH of one leapfrog step of the harmonic chain from canonical
/// starts, sampled through the full extended integrator.
std::vector<double> harmonic_energy_variations(Index N, double nubar, double dt, long samples, std::uint64_t seed,
                                               unsigned threads);
MomentCheck harmonic_moment_check(Index N, double nubar, double dt, long samples, std::uint64_t seed,
                                  unsigned threads);

/// Harmonic chain variant of ChainModel (v_int = r^2/2, no v_ext).
ChainModel harmonic_chain(Index N, double nubar, double beta = 10.0);

// -------------------------------------------------------------- CLI drivers

ExperimentResult run_exactness(const RunConfig& cfg);
ExperimentResult run_test1_macro(const RunConfig& cfg);
ExperimentResult run_test2_stability(const RunConfig& cfg);
ExperimentResult run_spectral_verify(const RunConfig& cfg);
ExperimentResult run_stiff_demo(const RunConfig& cfg);
ExperimentResult run_tune(const RunConfig& cfg);

/// Dispatch by experiment name; throws ConfigError for unknown names.
ExperimentResult run_experiment(const std::string& name, const RunConfig& cfg);
const std::vector<std::string>& experiment_names();

}  // namespace immp
