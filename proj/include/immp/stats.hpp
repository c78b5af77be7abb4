#pragma once

#include <cstdint>
#include <vector>

#include "immp/linalg.hpp"

namespace immp {

/// Uniformly sampled scalar series.
struct TimeSeries {
  std::vector<double> values;
  double dt_between_samples = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
};

/// q_N - q_1
double chain_length(const Vec& q);
/// q_{N/2} with 1-based indexing.
double center_of_mass(const Vec& q);

/// Biased autocorrelation estimator, rho(0) = 1; lags 0..max_lag.
std::vector<double> autocorrelation(const std::vector<double>& values, std::size_t max_lag);

struct Kde {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};
/// Silverman bandwidth 1.06 sigma n^-1/5.
double silverman_bandwidth(const std::vector<double>& samples);
/// Gaussian KDE on 512 points spanning the sample range +- 3 bandwidths.
Kde kde_density(const std::vector<double>& samples);
/// Gaussian KDE on a given uniform grid.
Kde kde_density(const std::vector<double>& samples, const std::vector<double>& grid, double bandwidth = 0.0);
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

/// sum p ln(p/q) dx with q floored at 1e-12.
double relative_entropy(const std::vector<double>& p, const std::vector<double>& q, const std::vector<double>& grid);

struct TransitionTimes {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
  std::vector<double> durations;
};
/// Durations of a->b passages (from the last upcrossing of a to the first
/// hit of b) pooled with the symmetric b->a passages. Crossing times are
/// linearly interpolated between samples. Throws InsufficientCrossings
/// below min_events.
TransitionTimes mean_transition_time(const TimeSeries& ts, double a = 0.4, double b = 0.6,
                                     std::size_t min_events = 10);
/// Same event detection without the minimum-count check.
std::vector<double> transition_durations(const TimeSeries& ts, double a, double b);

/// sqrt(N^-1 sum q_i^2)
double norm_l2(const Vec& q);
/// sqrt(N^-1 sum_{k>=1} phat_k^2 / delta_k + pbar^2), phat the Neumann
/// transform of p - pbar.
double norm_hminus1(const Vec& p);

struct CouplingOptions {
  Index N = 128;
  double dt = 1e-3;
  double T = 1.0;
  int replicas = 50;
  double beta = 10.0;
  double gamma = 0.1;
  bool external = true;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct CouplingRow {
  double nubar = 0.0;
  double mean_sq_distance = 0.0;
  double std_error = 0.0;
};

/// Harmonic chain runs for each nubar and for nubar = 0 (Verlet), all driven
/// by the same initial data and noise realization per replica; reports
/// E ||q^nubar(T) - q^0(T)||_l2^2 over replicas.
std::vector<CouplingRow> same_noise_coupling_distance(const std::vector<double>& nubars, const CouplingOptions& opt);

}  // namespace immp
