#include "immp/spectral.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "immp/chain.hpp"

namespace immp {

double h_mode(double dt, Index N, double nubar, Index k) {
  const double d = delta_k(N, k);
  return dt * std::sqrt(d / (1.0 + nubar * nubar * d));
}

Eigen::Matrix2d mode_propagator(double h) {
  Eigen::Matrix2d l;
  l << 1.0 - 0.5 * h * h, -h + 0.25 * h * h * h, h, 1.0 - 0.5 * h * h;
  return l;
}

ModeStability mode_stability(double dt, Index N, double nubar, Index k) {
  ModeStability m;
  m.k = k;
  m.h_k = h_mode(dt, N, nubar, k);
  m.L_k = mode_propagator(m.h_k);
  m.stable = std::abs(m.L_k.trace()) <= 2.0;
  return m;
}

double critical_timestep(Index N, double nubar) {
  if (N < 2) throw std::invalid_argument("critical_timestep: N must be >= 2");
  const double n = static_cast<double>(N);
  const double s = std::sin((n - 1.0) * std::numbers::pi / (2.0 * n));
  return std::sqrt(4.0 * nubar * nubar + 1.0 / (n * n * s * s));
}

Moments energy_variation_moments(Index N, double dt, double nubar) {
  Moments m;
  for (Index k = 1; k < N; ++k) {
    const double h6 = std::pow(h_mode(dt, N, nubar, k), 6);
    m.mean += h6 / 32.0;
    m.var += h6 / 16.0 + h6 * h6 / 512.0;
  }
  return m;
}

Moments asymptotic_moments(Index N, double dt, double nubar) {
  const double n = static_cast<double>(N);
  const double dt6 = std::pow(dt, 6);
  if (nubar > 0.0) {
    const double nb6 = std::pow(nubar, 6);
    return {n * dt6 / (32.0 * nb6), n * dt6 / (16.0 * nb6)};
  }
  const double n7 = std::pow(n, 7);
  return {0.625 * n7 * dt6, 1.25 * n7 * dt6};
}

double critical_dt_scaling_exponent(bool penalized) { return penalized ? 1.0 / 6.0 : 7.0 / 6.0; }

double gaussian_acceptance(const Moments& m) {
  if (m.var <= 0.0) return m.mean <= 0.0 ? 1.0 : 0.0;
  const boost::math::normal phi;
  const double s = std::sqrt(m.var);
  const double first = boost::math::cdf(phi, -m.mean / s);
  const double log_w = -m.mean + 0.5 * m.var;
  const double tail = boost::math::cdf(phi, (m.mean - m.var) / s);
  const double second = tail > 0.0 ? std::exp(log_w + std::log(tail)) : 0.0;
  return first + second;
}

double predicted_critical_dt(Index N, double nubar, double target) {
  double lo = 0.0, hi = critical_timestep(N, nubar);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (gaussian_acceptance(energy_variation_moments(N, mid, nubar)) >= target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Eigen::Matrix2Xd spectral_variables(const Vec& q, const Vec& p_nu, double nubar) {
  const Index N = q.size();
  const Mat P = neumann_basis(N);
  const Vec qh = P * q;
  const Vec ph = P * p_nu;
  Eigen::Matrix2Xd vx(2, N);
  for (Index k = 0; k < N; ++k) {
    const double d = delta_k(N, k);
    vx(0, k) = ph[k] / std::sqrt(1.0 + nubar * nubar * d);
    vx(1, k) = std::sqrt(d) * qh[k];
  }
  return vx;
}

void from_spectral_variables(const Eigen::Matrix2Xd& vx, double nubar, double q0_hat, Vec& q, Vec& p_nu) {
  const Index N = vx.cols();
  Vec qh(N), ph(N);
  for (Index k = 0; k < N; ++k) {
    const double d = delta_k(N, k);
    ph[k] = vx(0, k) * std::sqrt(1.0 + nubar * nubar * d);
    qh[k] = k == 0 ? q0_hat : vx(1, k) / std::sqrt(d);
  }
  const Mat P = neumann_basis(N);
  q = P.transpose() * qh;
  p_nu = P.transpose() * ph;
}

}  // namespace immp
