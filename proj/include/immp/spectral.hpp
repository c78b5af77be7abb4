#pragma once

#include <Eigen/Dense>

#include "immp/linalg.hpp"

namespace immp {

/// Leapfrog propagator of one mode of the penalized harmonic chain, acting
/// on (v, x) = (p_nu_hat / sqrt(1 + nubar^2 delta_k), sqrt(delta_k) q_hat).
struct ModeStability {
  Index k = 0;
  double h_k = 0.0;
  Eigen::Matrix2d L_k;
  bool stable = false;
};

/// dt sqrt(delta_k / (1 + nubar^2 delta_k))
double h_mode(double dt, Index N, double nubar, Index k);
Eigen::Matrix2d mode_propagator(double h);
ModeStability mode_stability(double dt, Index N, double nubar, Index k);

/// Largest stable time step of the penalized harmonic chain:
/// sqrt(4 nubar^2 + 1 / (N^2 sin^2((N-1) pi / 2N))).
double critical_timestep(Index N, double nubar);

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

/// Mean and variance of beta_N dH after one leapfrog step from canonical
/// initial data, summed over modes k = 1..N-1.
Moments energy_variation_moments(Index N, double dt, double nubar);
/// Large-N equivalents: N dt^6/(32 nubar^6), N dt^6/(16 nubar^6) for nubar > 0;
/// 5/8 N^7 dt^6 and 5/4 N^7 dt^6 for nubar = 0.
Moments asymptotic_moments(Index N, double dt, double nubar);

/// Exponent alpha of dt_crit ~ N^-alpha at fixed acceptance: 1/6 (penalized)
/// or 7/6 (unpenalized).
double critical_dt_scaling_exponent(bool penalized);

/// E[min(1, exp(-X))] for X ~ N(mean, var).
double gaussian_acceptance(const Moments& m);
/// Time step at which gaussian_acceptance(energy_variation_moments) = target
/// (bisection on (0, critical_timestep)).
double predicted_critical_dt(Index N, double nubar, double target);

/// Spectral variables of a chain state (q, p_nu): rows (v_k, x_k), k = 0..N-1.
/// Mode 0 has x = 0.
Eigen::Matrix2Xd spectral_variables(const Vec& q, const Vec& p_nu, double nubar);
/// Inverse of spectral_variables for modes k >= 1, keeping the given mode-0 data.
void from_spectral_variables(const Eigen::Matrix2Xd& vx, double nubar, double q0_hat, Vec& q, Vec& p_nu);

}  // namespace immp
