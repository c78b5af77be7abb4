#pragma once

#include "immp/integrators.hpp"

namespace immp {

enum class ChainInteraction { double_well, harmonic };

/// Particle chain on [0,1] with N particles, Neumann boundary conditions,
/// nearest-neighbour interaction v_int and on-site potential v_ext.
struct ChainModel {
  Index N = 100;
  double nubar = 0.1;
  double beta = 10.0;  // beta_N = beta / N
  double gamma = 0.1;
  ChainInteraction interaction = ChainInteraction::double_well;
  bool external = true;
  bool continuous_cutoff = false;

  double nu() const { return nubar * static_cast<double>(N); }
  double beta_N() const { return beta / static_cast<double>(N); }
  void validate() const;
};

/// Double-well repulsive interaction (50((r-0.1)^2 - 0.05^2))^2 for r below the
/// cutoff (0.1 as printed, 0.15 with continuous_cutoff), zero above.
double v_int(double r, bool continuous_cutoff = false);
double v_int_prime(double r, bool continuous_cutoff = false);
/// ((q-0.5)/2.2)^2
double v_ext(double q);
double v_ext_prime(double q);

/// N (q_{i+1} - q_i), i = 1..N-1
Vec discrete_gradient(const Vec& q);
/// Transpose of discrete_gradient, maps R^{N-1} to R^N.
Vec discrete_gradient_transpose(const Vec& w);
/// Delta_d = -(grad_d)^T grad_d as a dense matrix (tests, small N).
Mat discrete_laplacian_dense(Index N);

/// d = N, n = N-1, M = M_z = Id, xi_i = q_{i+1} - q_i, with a tridiagonal
/// backend for the penalized mass.
SystemModel build_chain_system(const ChainModel& chain);
/// nu = nubar N, or the zero penalty when nubar = 0.
PenaltyConfig chain_penalty(const ChainModel& chain);
/// beta_N, gamma Id on positions, no dissipation on the auxiliary momenta.
ThermostatConfig chain_thermostat(const ChainModel& chain);

/// Coefficients of Id - nubar^2 Delta_d.
Tridiagonal penalized_chain_operator(Index N, double nubar);
/// Solves (Id - nubar^2 Delta_d) x = w in O(N).
Vec tridiagonal_solve(Index N, double nubar, const Vec& w);

/// Orthonormal Neumann cosine transform: xhat_k = sum_i P_{k,i} x_i.
Vec neumann_spectral_transform(const Vec& x);
Vec neumann_spectral_inverse(const Vec& xhat);
Mat neumann_basis(Index N);
/// Eigenvalues of -Delta_d: 4 N^2 sin^2(k pi / 2N).
double delta_k(Index N, Index k);

/// Chain state at positions q with z = nu xi(q); momenta drawn from the
/// constrained canonical Gaussian at beta_N.
PhaseState chain_initial_state(const ChainModel& chain, const Vec& q, RandomStream& rng_q, RandomStream& rng_z);

}  // namespace immp
