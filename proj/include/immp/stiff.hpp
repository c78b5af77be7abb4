#pragma once

#include <functional>
#include <vector>

#include "immp/integrators.hpp"
#include "immp/models.hpp"

namespace immp {

/// Slow/fast planar system on the circle xi(q) = |q|^2 - 1 with
/// U(q, z) = v_slow(angle(q)) + z^2/2 and physical potential U(q, xi(q)/eps).
struct StiffModel {
  SlowPotential slow;
  double epsilon = 1e-2;
  double nubar = 0.1;

  double nu() const { return nubar / epsilon; }
};

/// U(q, z) for the registered test system.
double stiff_energy(const StiffModel& m, const Vec& q, double z);

/// Unconstrained system V(q) = U(q, xi(q)/eps), for the baseline integrator.
SystemModel stiff_physical_system(const StiffModel& m);
/// Penalized system: no potential in q, coupling W(q, z) = U(q, z/nubar).
/// With nu = nubar/eps and xi(q) = z/nu this equals U(q, xi(q)/eps).
SystemModel stiff_immp_system(const StiffModel& m);
/// nu = nubar / eps
PenaltyConfig stiff_penalty(const StiffModel& m);

/// U_eff(q) = -1/beta ln int exp(-beta U(q, z)) dz for a scalar fast variable,
/// by adaptive Gauss-Kronrod quadrature on a window grown until the tail mass
/// is below 1e-10 of the total. Throws QuadratureDivergent if the window
/// cannot be closed.
double effective_potential(const std::function<double(double)>& u_of_z, double beta);
double effective_potential(const std::function<double(const Vec&, double)>& U, const Vec& q, double beta);
/// grad U_eff(q) = E[grad_q U(q, z)] under exp(-beta U(q, .)).
Vec effective_potential_gradient(const std::function<double(const Vec&, double)>& U,
                                 const std::function<Vec(const Vec&, double)>& grad_q_U, const Vec& q, double beta);

/// One step of the rigidly constrained sampler on xi(q) = 0 with free
/// auxiliary variables (infinite penalty), forces from the coupling.
std::pair<PhaseState, StepReport> effective_constrained_step(const SystemModel& model, const ThermostatConfig& thermo,
                                                             const IntegratorConfig& cfg, const PhaseState& s,
                                                             NoiseStreams& rng);

struct SweepOptions {
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3};
  double dt = 0.05;
  double beta = 1.0;
  double gamma = 1.0;
  double gamma_z = 1.0;
  long steps = 200000;
  long burn_in = 2000;
  long thin = 50;
  long verlet_steps = 20000;
  bool metropolis = true;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct SweepRow {
  double epsilon = 0.0;
  double acceptance = 0.0;
  double observable_mean = 0.0;
  double ks_distance = 0.0;
  double ks_p = 0.0;
  double mean_abs_xi = 0.0;
  bool verlet_unstable = false;
  long verlet_steps_completed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double reference_acceptance = 0.0;
  std::vector<double> reference_angles;
};

/// Runs the penalized integrator at fixed dt for each eps (nu = nubar/eps),
/// compares the thinned angle samples with the infinite-penalty sampler
/// (KS), and records whether the baseline Verlet integrator blows up.
/// The observable is cos(angle).
SweepResult epsilon_sweep(const StiffModel& base, const SweepOptions& opt);

}  // namespace immp
