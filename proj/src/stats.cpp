#include "immp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "immp/chain.hpp"
#include "immp/errors.hpp"
#include "immp/stat_tests.hpp"

namespace immp {

double chain_length(const Vec& q) { return q[q.size() - 1] - q[0]; }

double center_of_mass(const Vec& q) { return q[q.size() / 2 - 1]; }

std::vector<double> autocorrelation(const std::vector<double>& values, std::size_t max_lag) {
  const std::size_t n = values.size();
  if (n == 0) throw std::invalid_argument("autocorrelation: empty series");
  const double m = mean(values);
  double c0 = 0.0;
  for (double x : values) c0 += (x - m) * (x - m);
  std::vector<double> rho(std::min(max_lag, n - 1) + 1, 0.0);
  if (c0 == 0.0) {
    rho[0] = 1.0;
    return rho;
  }
  for (std::size_t k = 0; k < rho.size(); ++k) {
    double c = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) c += (values[i] - m) * (values[i + k] - m);
    rho[k] = c / c0;
  }
  rho[0] = 1.0;
  return rho;
}

double silverman_bandwidth(const std::vector<double>& samples) {
  const double s = std::sqrt(variance(samples));
  const double n = static_cast<double>(samples.size());
  const double h = 1.06 * s * std::pow(n, -0.2);
  return h > 0.0 ? h : 1e-3;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

Kde kde_density(const std::vector<double>& samples, const std::vector<double>& grid, double bandwidth) {
  if (samples.empty()) throw std::invalid_argument("kde_density: no samples");
  Kde k;
  k.grid = grid;
  k.bandwidth = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(samples);
  k.density.assign(grid.size(), 0.0);
  const double h = k.bandwidth;
  const double norm = 1.0 / (static_cast<double>(samples.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double reach = 8.0 * h;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double x = grid[g];
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), x - reach);
    auto hi = std::upper_bound(sorted.begin(), sorted.end(), x + reach);
    double s = 0.0;
    for (auto it = lo; it != hi; ++it) {
      const double u = (x - *it) / h;
      s += std::exp(-0.5 * u * u);
    }
    k.density[g] = s * norm;
  }
  return k;
}

Kde kde_density(const std::vector<double>& samples) {
  if (samples.empty()) throw std::invalid_argument("kde_density: no samples");
  const double h = silverman_bandwidth(samples);
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  return kde_density(samples, uniform_grid(*mn - 3.0 * h, *mx + 3.0 * h, 512), h);
}

double relative_entropy(const std::vector<double>& p, const std::vector<double>& q, const std::vector<double>& grid) {
  if (p.size() != q.size() || p.size() != grid.size() || grid.size() < 2)
    throw std::invalid_argument("relative_entropy: size mismatch");
  const double dx = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) s += p[i] * std::log(p[i] / std::max(q[i], 1e-12));
  return s * dx;
}

std::vector<double> transition_durations(const TimeSeries& ts, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("transition_durations: need a < b");
  const auto& v = ts.values;
  const double dt = ts.dt_between_samples;
  auto cross = [&](std::size_t i, double level) {
    const double x0 = v[i - 1], x1 = v[i];
    const double f = x1 == x0 ? 1.0 : (level - x0) / (x1 - x0);
    return (static_cast<double>(i - 1) + std::clamp(f, 0.0, 1.0)) * dt;
  };
  std::vector<double> out;
  int region = 0;
  double t_exit = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = v[i];
    if (region == 0) {
      if (x <= a) region = -1, t_exit = static_cast<double>(i) * dt;
      else if (x >= b) region = 1, t_exit = static_cast<double>(i) * dt;
      continue;
    }
    if (region == -1) {
      if (v[i - 1] <= a && x > a) t_exit = cross(i, a);
      if (x >= b) {
        out.push_back(cross(i, b) - t_exit);
        region = 1;
      }
    } else {
      if (v[i - 1] >= b && x < b) t_exit = cross(i, b);
      if (x <= a) {
        out.push_back(cross(i, a) - t_exit);
        region = -1;
      }
    }
  }
  return out;
}

TransitionTimes mean_transition_time(const TimeSeries& ts, double a, double b, std::size_t min_events) {
  TransitionTimes r;
  r.durations = transition_durations(ts, a, b);
  r.count = r.durations.size();
  if (r.count < min_events)
    throw InsufficientCrossings("mean_transition_time: only " + std::to_string(r.count) + " transitions");
  r.mean = mean(r.durations);
  r.std_error = std::sqrt(variance(r.durations) / static_cast<double>(r.count));
  return r;
}

double norm_l2(const Vec& q) { return std::sqrt(q.squaredNorm() / static_cast<double>(q.size())); }

double norm_hminus1(const Vec& p) {
  const Index N = p.size();
  const double pbar = p.mean();
  const Vec ph = neumann_spectral_transform((p.array() - pbar).matrix());
  double s = 0.0;
  for (Index k = 1; k < N; ++k) s += ph[k] * ph[k] / delta_k(N, k);
  return std::sqrt(s / static_cast<double>(N) + pbar * pbar);
}

}  // namespace immp
