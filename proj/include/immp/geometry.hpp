#pragma once

#include "immp/model.hpp"

namespace immp {

/// Gram matrix G = J^T M^-1 J at a point, with its regularized and factored
/// form G_reg = G + nu^-2 M_z^-1 (G_reg = G in the infinite mode).
struct GramWorkspace {
  ConstraintJacobian jac;
  SymMatrix mass_inv;
  SpdSystem G_reg;
  double inv_nu = 0.0;
  double condition = 1.0;

  /// Unregularized Gram matrix (not factored).
  SpdSystem G() const;
};

/// Throws GramSingular when G_reg is not positive definite or its condition
/// estimate exceeds the model's limit.
GramWorkspace gram(const SystemModel& model, const PenaltyConfig& pen, const Vec& q);
/// Unregularized Gram workspace (infinite penalty).
GramWorkspace gram(const SystemModel& model, const Vec& q);

/// (1/2 beta) ln det G_reg; zero for nu = 0 and for n = 0.
double fixman_potential(const SystemModel& model, const PenaltyConfig& pen, const ThermostatConfig& thermo,
                        const Vec& q);

/// Gradient of fixman_potential; exactly zero for linear constraints.
Vec fixman_gradient(const SystemModel& model, const PenaltyConfig& pen, const ThermostatConfig& thermo,
                    const Vec& q);

struct MomentumProjection {
  Vec p;
  Vec pz;
  Vec lambda;
};

/// Projects (p, p_z) on J^T M^-1 p = nu^-1 M_z^-1 p_z:
/// p' = p - J lambda, p_z' = p_z + lambda / nu.
MomentumProjection project_momentum(const SystemModel& model, const PenaltyConfig& pen, const Vec& q,
                                    const Vec& p, const Vec& pz);
MomentumProjection project_momentum(const SystemModel& model, const PenaltyConfig& pen, const GramWorkspace& ws,
                                    const Vec& p, const Vec& pz);

/// Residual of xi(q) - z/nu, infinity norm.
double position_residual(const SystemModel& model, const PenaltyConfig& pen, const PhaseState& s);
/// Residual of J^T M^-1 p - M_z^-1 p_z / nu, infinity norm.
double momentum_residual(const SystemModel& model, const PenaltyConfig& pen, const PhaseState& s);

}  // namespace immp
