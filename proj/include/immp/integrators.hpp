#pragma once

#include <vector>

#include "immp/geometry.hpp"
#include "immp/rng.hpp"

namespace immp {

enum class Splitting { lie, strang };

struct IntegratorConfig {
  double dt = 1e-3;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  double tol_c = 1e-9;
  bool fixman_in_forces = true;
  bool metropolis = false;
  int ou_substeps = 1;
  Splitting splitting = Splitting::lie;
  bool frozen_jacobian = false;

  void validate() const;
};

struct StepReport {
  bool accepted = true;
  double delta_H = 0.0;
  int newton_iters = 0;
  Vec lambda_half;
  Vec lambda_one;
  int ou_substeps = 0;
};

/// Forces on (q, z): -grad V [- grad V_fix] [- grad_q W] and -grad_z W.
struct Forces {
  Vec q;
  Vec z;
};
Forces immp_forces(const SystemModel& model, const PenaltyConfig& pen, const ThermostatConfig& thermo,
                   const IntegratorConfig& cfg, const Vec& q, const Vec& z);

/// One RATTLE leapfrog step for the extended Hamiltonian. Throws
/// NewtonDiverged when the position-constraint solve fails.
std::pair<PhaseState, StepReport> rattle_step(const SystemModel& model, const PenaltyConfig& pen,
                                              const ThermostatConfig& thermo, const IntegratorConfig& cfg,
                                              const PhaseState& s);

/// Checks lambda_max((h/2) M^-1/2 gamma M^-1/2) <= 1 on the extended operators.
bool ou_stability_ok(const SystemModel& model, const ThermostatConfig& thermo, double h);

/// Constrained implicit-midpoint Ornstein-Uhlenbeck update of (p, p_z) over a
/// time span cfg.dt in cfg.ou_substeps substeps (doubled until the stability
/// predicate holds). Position noise is drawn from rng.momentum and auxiliary
/// noise from rng.auxiliary, both before any penalty-dependent operation.
PhaseState ou_midpoint_step(const SystemModel& model, const PenaltyConfig& pen, const ThermostatConfig& thermo,
                            const IntegratorConfig& cfg, const PhaseState& s, NoiseStreams& rng,
                            int* substeps_used = nullptr);

/// rattle_step composed with ou_midpoint_step (Lie: rattle then OU; Strang:
/// half OU, rattle, half OU). With cfg.metropolis the Hamiltonian part is
/// accepted with probability min(1, exp(-beta dH)) and rejected moves flip
/// (p, p_z). One uniform is drawn from rng.metropolis per step either way.
std::pair<PhaseState, StepReport> langevin_immp_step(const SystemModel& model, const PenaltyConfig& pen,
                                                     const ThermostatConfig& thermo, const IntegratorConfig& cfg,
                                                     const PhaseState& s, NoiseStreams& rng);

/// langevin_immp_step with the Metropolis test switched on.
std::pair<PhaseState, StepReport> hmc_step(const SystemModel& model, const PenaltyConfig& pen,
                                           const ThermostatConfig& thermo, const IntegratorConfig& cfg,
                                           const PhaseState& s, NoiseStreams& rng);

/// Metropolis acceptance probability min(1, exp(-beta dH)).
double metropolis_probability(double beta, double delta_H);

/// Velocity Verlet on H(q,p) = 1/2 p M^-1 p + V(q) with the same OU thermostat
/// and optional Metropolis test; constraints and auxiliary variables are
/// ignored. Throws UnstableIntegration on non-finite states.
std::pair<PhaseState, StepReport> verlet_baseline_step(const SystemModel& model, const ThermostatConfig& thermo,
                                                       const IntegratorConfig& cfg, const PhaseState& s,
                                                       NoiseStreams& rng);

/// Energy of the unconstrained system.
double baseline_hamiltonian(const SystemModel& model, const PhaseState& s);

/// nubar * dt^k
double consistent_penalty(double dt, double nubar, double k);

/// Draws (p, p_z) from the canonical Gaussian restricted to the hidden
/// constraint: unconstrained Gaussian in the extended space, then projected.
PhaseState sample_constrained_momenta(const SystemModel& model, const PenaltyConfig& pen,
                                      const ThermostatConfig& thermo, const Vec& q, const Vec& z,
                                      RandomStream& rng_q, RandomStream& rng_z);

struct TuneOptions {
  double target = 0.9;
  std::vector<double> nu_grid;
  std::vector<double> dt_grid;
  long steps = 2000;
  long burn_in = 200;
  std::uint64_t seed = 1;
};

struct TuneResult {
  double nu_max = 0.0;
  double dt_max = 0.0;
  /// slope of the linear rule nu(dt) = slope * dt
  double slope = 0.0;
  /// measured acceptance per (nu, dt) grid point, row-major in nu
  std::vector<double> acceptance;
};

/// Largest (nu, dt) on the grid whose mean HMC acceptance is >= target.
/// Grid points are ordered by dt first, then nu. Throws TargetUnreachable.
TuneResult tune_penalty(const SystemModel& model, const ThermostatConfig& thermo, const IntegratorConfig& base,
                        const PhaseState& initial, const TuneOptions& opt);

}  // namespace immp
