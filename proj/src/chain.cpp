#include "immp/chain.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace immp {

void ChainModel::validate() const {
  if (N < 2) throw std::invalid_argument("ChainModel: N must be >= 2");
  if (!(nubar >= 0.0)) throw std::invalid_argument("ChainModel: nubar must be >= 0");
  if (!(beta > 0.0)) throw std::invalid_argument("ChainModel: beta must be positive");
  if (!(gamma >= 0.0)) throw std::invalid_argument("ChainModel: gamma must be >= 0");
}

namespace {
double cutoff(bool continuous) { return continuous ? 0.15 : 0.1; }
}  // namespace

double v_int(double r, bool continuous_cutoff) {
  if (r > cutoff(continuous_cutoff)) return 0.0;
  const double u = 50.0 * ((r - 0.1) * (r - 0.1) - 0.0025);
  return u * u;
}

double v_int_prime(double r, bool continuous_cutoff) {
  if (r > cutoff(continuous_cutoff)) return 0.0;
  const double u = (r - 0.1) * (r - 0.1) - 0.0025;
  return 10000.0 * u * (r - 0.1);
}

double v_ext(double q) {
  const double x = (q - 0.5) / 2.2;
  return x * x;
}

double v_ext_prime(double q) { return 2.0 * (q - 0.5) / (2.2 * 2.2); }

Vec discrete_gradient(const Vec& q) {
  const Index n = q.size();
  Vec g(n - 1);
  for (Index i = 0; i + 1 < n; ++i) g[i] = static_cast<double>(n) * (q[i + 1] - q[i]);
  return g;
}

Vec discrete_gradient_transpose(const Vec& w) {
  const Index n = w.size() + 1;
  const double s = static_cast<double>(n);
  Vec out = Vec::Zero(n);
  for (Index i = 0; i + 1 < n; ++i) {
    out[i] -= s * w[i];
    out[i + 1] += s * w[i];
  }
  return out;
}

Mat discrete_laplacian_dense(Index N) {
  Mat g = Mat::Zero(N - 1, N);
  for (Index i = 0; i + 1 < N; ++i) {
    g(i, i) = -static_cast<double>(N);
    g(i, i + 1) = static_cast<double>(N);
  }
  return -g.transpose() * g;
}

Tridiagonal penalized_chain_operator(Index N, double nubar) {
  const double c = nubar * nubar * static_cast<double>(N) * static_cast<double>(N);
  Tridiagonal t;
  t.diag = Vec::Constant(N, 1.0 + 2.0 * c);
  t.diag[0] = 1.0 + c;
  t.diag[N - 1] = 1.0 + c;
  t.off = Vec::Constant(N - 1, -c);
  return t;
}

Vec tridiagonal_solve(Index N, double nubar, const Vec& w) {
  if (nubar == 0.0) return w;
  const Tridiagonal t = penalized_chain_operator(N, nubar);
  return thomas_solve(t.off, t.diag, t.off, w);
}

SystemModel build_chain_system(const ChainModel& chain) {
  chain.validate();
  const Index N = chain.N;
  const bool cont = chain.continuous_cutoff;
  const bool harmonic = chain.interaction == ChainInteraction::harmonic;
  const bool ext = chain.external;
  SystemModel m;
  m.name = harmonic ? "harmonic_chain" : "chain";
  m.dim = N;
  m.n_constraints = N - 1;
  m.potential = [=](const Vec& q) {
    const Vec r = discrete_gradient(q);
    double v = 0.0;
    for (Index i = 0; i < r.size(); ++i) v += harmonic ? 0.5 * r[i] * r[i] : v_int(r[i], cont);
    if (ext)
      for (Index i = 0; i < q.size(); ++i) v += v_ext(q[i]);
    return v;
  };
  m.grad_potential = [=](const Vec& q) {
    Vec r = discrete_gradient(q);
    for (Index i = 0; i < r.size(); ++i) r[i] = harmonic ? r[i] : v_int_prime(r[i], cont);
    Vec g = discrete_gradient_transpose(r);
    if (ext)
      for (Index i = 0; i < q.size(); ++i) g[i] += v_ext_prime(q[i]);
    return g;
  };
  m.xi = [](const Vec& q) {
    Vec x(q.size() - 1);
    for (Index i = 0; i + 1 < q.size(); ++i) x[i] = q[i + 1] - q[i];
    return x;
  };
  m.jac_xi = [N](const Vec&) { return ConstraintJacobian::first_difference(N); };
  m.hess_xi_contract = [N](const Vec&, const Mat&) { return Vec(Vec::Zero(N)); };
  m.linear_constraints = true;
  m.mass = SymMatrix::identity(N);
  m.mass_z = SymMatrix::identity(N - 1);
  PenalizedMassOperator op;
  op.apply = [N](double nu, const Vec&, const Vec& v) {
    return Vec(penalized_chain_operator(N, nu / static_cast<double>(N)).apply(v));
  };
  op.solve = [N](double nu, const Vec&, const Vec& w) {
    return tridiagonal_solve(N, nu / static_cast<double>(N), w);
  };
  m.penalized_mass_backend = op;
  return m;
}

PenaltyConfig chain_penalty(const ChainModel& chain) { return PenaltyConfig::fixed(chain.nu()); }

ThermostatConfig chain_thermostat(const ChainModel& chain) {
  return ThermostatConfig(chain.beta_N(), SymMatrix::scalar(chain.N, chain.gamma), SymMatrix::zero(chain.N - 1));
}

Mat neumann_basis(Index N) {
  Mat p(N, N);
  const double a0 = std::sqrt(1.0 / static_cast<double>(N));
  const double a = std::sqrt(2.0 / static_cast<double>(N));
  for (Index i = 0; i < N; ++i) p(0, i) = a0;
  for (Index k = 1; k < N; ++k)
    for (Index i = 0; i < N; ++i)
      p(k, i) = a * std::cos(std::numbers::pi * static_cast<double>(k) * (static_cast<double>(i) + 0.5) /
                             static_cast<double>(N));
  return p;
}

Vec neumann_spectral_transform(const Vec& x) { return neumann_basis(x.size()) * x; }

Vec neumann_spectral_inverse(const Vec& xhat) { return neumann_basis(xhat.size()).transpose() * xhat; }

double delta_k(Index N, Index k) {
  const double s = std::sin(std::numbers::pi * static_cast<double>(k) / (2.0 * static_cast<double>(N)));
  return 4.0 * static_cast<double>(N) * static_cast<double>(N) * s * s;
}

PhaseState chain_initial_state(const ChainModel& chain, const Vec& q, RandomStream& rng_q, RandomStream& rng_z) {
  const SystemModel m = build_chain_system(chain);
  const PenaltyConfig pen = chain_penalty(chain);
  const Vec z = chain.nubar > 0.0 ? Vec(pen.nu() * m.xi(q)) : Vec(Vec::Zero(chain.N - 1));
  return sample_constrained_momenta(m, pen, chain_thermostat(chain), q, z, rng_q, rng_z);
}

}  // namespace immp
