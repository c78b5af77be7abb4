#pragma once

#include <functional>
#include <optional>
#include <string>

#include "immp/linalg.hpp"

namespace immp {

/// Potential W(q, z) acting on both positions and auxiliary variables.
/// Used for the stiff systems where the fast variable enters the energy.
struct CouplingPotential {
  std::function<double(const Vec&, const Vec&)> value;
  std::function<Vec(const Vec&, const Vec&)> grad_q;
  std::function<Vec(const Vec&, const Vec&)> grad_z;
};

/// Matrix-free apply/solve of the penalized mass M + nu^2 J M_z J^T.
struct PenalizedMassOperator {
  std::function<Vec(double nu, const Vec& q, const Vec& v)> apply;
  std::function<Vec(double nu, const Vec& q, const Vec& w)> solve;
};

/// Immutable problem definition: potential, constraints and masses.
struct SystemModel {
  std::string name;
  Index dim = 0;
  Index n_constraints = 0;
  std::function<double(const Vec&)> potential;
  std::function<Vec(const Vec&)> grad_potential;
  std::function<Vec(const Vec&)> xi;
  std::function<ConstraintJacobian(const Vec&)> jac_xi;
  /// sum_k Hess(xi_k)(q) * w.col(k), w is d x n.
  std::function<Vec(const Vec&, const Mat&)> hess_xi_contract;
  bool linear_constraints = false;
  bool fixman_fd_fallback = false;
  SymMatrix mass;
  SymMatrix mass_z;
  std::optional<CouplingPotential> coupling;
  std::optional<PenalizedMassOperator> penalized_mass_backend;
  double gram_condition_limit = 1e12;

  /// Throws std::invalid_argument on inconsistent sizes or missing callables.
  void validate() const;
};

/// Extended phase point.
struct PhaseState {
  Vec q;
  Vec p;
  Vec z;
  Vec pz;
};

/// Penalty intensity nu and the rule that produced it.
class PenaltyConfig {
 public:
  enum class Rule { fixed, timestep_scaled, stiffness_scaled, infinite };

  static PenaltyConfig fixed(double nu);
  /// nu = nubar * dt^k
  static PenaltyConfig timestep_scaled(double nubar, double dt, double k);
  /// nu = nubar / eps
  static PenaltyConfig stiffness_scaled(double nubar, double eps);
  /// Rigid constraint xi(q) = 0 with free auxiliary variables.
  static PenaltyConfig infinite();

  Rule rule() const { return rule_; }
  bool is_infinite() const { return rule_ == Rule::infinite; }
  /// Throws for the infinite mode.
  double nu() const;
  /// 1/nu, zero in the infinite mode.
  double inverse() const;

 private:
  Rule rule_ = Rule::fixed;
  double nu_ = 0.0;
};

/// Inverse temperature and dissipation; the noise amplitudes are derived.
class ThermostatConfig {
 public:
  ThermostatConfig() = default;
  ThermostatConfig(double beta, SymMatrix gamma, SymMatrix gamma_z);

  double beta() const { return beta_; }
  const SymMatrix& gamma() const { return gamma_; }
  const SymMatrix& gamma_z() const { return gamma_z_; }
  /// sigma with sigma sigma^T = (2/beta) gamma.
  SymMatrix sigma() const { return gamma_.scaled(2.0 / beta_).sqrt(); }
  SymMatrix sigma_z() const { return gamma_z_.scaled(2.0 / beta_).sqrt(); }

 private:
  double beta_ = 1.0;
  SymMatrix gamma_;
  SymMatrix gamma_z_;
};

/// (M + nu^2 J M_z J^T) v
Vec penalized_mass_apply(const SystemModel& model, const PenaltyConfig& pen, const Vec& q, const Vec& v);

/// Solves M_nu x = w; throws SolverFailure if the backward error exceeds 1e-12.
Vec penalized_mass_solve(const SystemModel& model, const PenaltyConfig& pen, const Vec& q, const Vec& w);

/// Dense M_nu, for tests and small systems.
Mat penalized_mass_dense(const SystemModel& model, const PenaltyConfig& pen, const Vec& q);

/// Potential energy including the coupling term when present.
double total_potential(const SystemModel& model, const PhaseState& s);

/// Extended energy 1/2 p M^-1 p + 1/2 pz Mz^-1 pz + V(q) [+ W(q,z)] + V_fix.
double immp_hamiltonian(const SystemModel& model, const PenaltyConfig& pen, const ThermostatConfig& thermo,
                        const PhaseState& s);

/// 1/2 p_nu M_nu^-1 p_nu + V(q) + V_fix.
double penalized_hamiltonian(const SystemModel& model, const PenaltyConfig& pen, const ThermostatConfig& thermo,
                             const Vec& q, const Vec& p_nu);

/// p + nu J p_z
Vec penalized_momentum(const SystemModel& model, const PenaltyConfig& pen, const PhaseState& s);

}  // namespace immp
