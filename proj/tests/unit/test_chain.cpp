#include <doctest.h>

#include "helpers.hpp"
#include "immp/chain.hpp"
#include "immp/geometry.hpp"
#include "immp/harness/experiments.hpp"
#include "immp/integrators.hpp"
#include "immp/spectral.hpp"

using namespace immp;
using namespace immp::testing;

TEST_CASE("interaction potential values") {
  CHECK(v_int(0.05) == doctest::Approx(0.0));
  CHECK(v_int(0.2) == 0.0);
  CHECK(v_int(0.0) == doctest::Approx(0.140625));
  // printed cutoff is discontinuous, the continuous variant is not
  CHECK(v_int(0.1 - 1e-12) == doctest::Approx(0.015625));
  CHECK(v_int(0.1 + 1e-12) == 0.0);
  CHECK(v_int(0.1 + 1e-12, true) == doctest::Approx(0.015625));
  CHECK(v_int(0.15 - 1e-9, true) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(v_int(0.16, true) == 0.0);
  for (double r : {-0.3, -0.01, 0.02, 0.07, 0.09, 0.12, 0.14}) {
    for (bool cont : {false, true}) {
      const double fd = (v_int(r + 1e-6, cont) - v_int(r - 1e-6, cont)) / 2e-6;
      CHECK(v_int_prime(r, cont) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("external potential values") {
  CHECK(v_ext(0.5) == 0.0);
  CHECK(v_ext(2.7) == doctest::Approx(1.0));
  for (double q : {-1.0, 0.3, 2.0}) {
    const double fd = (v_ext(q + 1e-6) - v_ext(q - 1e-6)) / 2e-6;
    CHECK(v_ext_prime(q) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("discrete gradient and its transpose") {
  const Index N = 9;
  CHECK(discrete_gradient(Vec::Constant(N, 0.3)).norm() == 0.0);
  Vec ramp(N);
  for (Index i = 0; i < N; ++i) ramp[i] = static_cast<double>(i + 1) / N;
  CHECK((discrete_gradient(ramp) - Vec::Ones(N - 1)).norm() < 1e-12);
  std::mt19937_64 g(43);
  const Vec q = random_vec(N, g), w = random_vec(N - 1, g);
  CHECK(discrete_gradient(q).dot(w) == doctest::Approx(q.dot(discrete_gradient_transpose(w))).epsilon(1e-14));
  const Mat lap = discrete_laplacian_dense(N);
  CHECK((lap * q + discrete_gradient_transpose(discrete_gradient(q))).norm() < 1e-10);
}

TEST_CASE("chain system: penalty operator equals Id - nubar^2 Laplacian") {
  ChainModel c;
  c.N = 8;
  c.nubar = 0.3;
  const SystemModel m = build_chain_system(c);
  const PenaltyConfig pen = chain_penalty(c);
  CHECK(pen.nu() == doctest::Approx(0.3 * 8));
  CHECK(chain_thermostat(c).beta() == doctest::Approx(10.0 / 8));
  const Mat J = m.jac_xi(Vec::Zero(8)).to_dense();
  const Mat lhs = pen.nu() * pen.nu() * J * J.transpose();
  CHECK((lhs + 0.09 * discrete_laplacian_dense(8)).norm() < 1e-12);

  for (Index N : {4, 16, 32}) {
    ChainModel cn;
    cn.N = N;
    cn.nubar = 0.7;
    const SystemModel mn = build_chain_system(cn);
    const Mat dense = Mat::Identity(N, N) - 0.49 * discrete_laplacian_dense(N);
    std::mt19937_64 g(static_cast<unsigned>(N));
    const Vec v = random_vec(N, g);
    CHECK((penalized_mass_apply(mn, chain_penalty(cn), Vec::Zero(N), v) - dense * v).norm() < 1e-12 * dense.norm());
    CHECK((penalized_mass_dense(mn, chain_penalty(cn), Vec::Zero(N)) - dense).norm() < 1e-10);
  }
}

TEST_CASE("chain forces match finite differences of the potential") {
  for (bool cont : {false, true}) {
    ChainModel c;
    c.N = 16;
    c.continuous_cutoff = cont;
    const SystemModel m = build_chain_system(c);
    std::mt19937_64 g(47);
    // spacings of order 0.05/N put bonds inside the interaction range
    Vec q(16);
    q[0] = 0.4;
    std::uniform_real_distribution<double> u(-0.05, 0.14);
    for (Index i = 1; i < 16; ++i) q[i] = q[i - 1] + u(g) / 16.0;
    const Vec fd = fd_gradient(m.potential, q, 1e-8);
    CHECK((m.grad_potential(q) - fd).norm() <= 1e-6 * std::max(1.0, fd.norm()));
  }
}

TEST_CASE("tridiagonal penalized solve") {
  const Index N = 16;
  std::mt19937_64 g(53);
  const Vec w = random_vec(N, g);
  CHECK((tridiagonal_solve(N, 0.0, w) - w).norm() == 0.0);
  CHECK((tridiagonal_solve(N, 0.8, Vec::Constant(N, 2.5)) - Vec::Constant(N, 2.5)).norm() < 1e-12);
  const Mat dense = Mat::Identity(N, N) - 0.64 * discrete_laplacian_dense(N);
  CHECK((tridiagonal_solve(N, 0.8, w) - dense.lu().solve(w)).norm() < 1e-12 * w.norm() * 10.0);
  CHECK((penalized_chain_operator(N, 0.8).to_dense() - dense).norm() < 1e-10);
}

TEST_CASE("Neumann spectral transform") {
  const Index N = 8;
  const Mat P = neumann_basis(N);
  CHECK((P * P.transpose() - Mat::Identity(N, N)).norm() < 1e-12);
  const Vec c = neumann_spectral_transform(Vec::Constant(N, 1.5));
  CHECK(c[0] == doctest::Approx(std::sqrt(8.0) * 1.5));
  CHECK(c.tail(N - 1).norm() < 1e-12);
  std::mt19937_64 g(59);
  const Vec x = random_vec(N, g);
  CHECK((neumann_spectral_inverse(neumann_spectral_transform(x)) - x).norm() < 1e-12);
  const Mat D = P * (-discrete_laplacian_dense(N)) * P.transpose();
  for (Index k = 0; k < N; ++k)
    for (Index l = 0; l < N; ++l) CHECK(std::abs(D(k, l) - (k == l ? delta_k(N, k) : 0.0)) < 1e-10 * (1.0 + D(k, k)));
}

TEST_CASE("Laplacian eigenvalues") {
  CHECK(delta_k(2, 1) == doctest::Approx(8.0));
  CHECK(delta_k(37, 0) == 0.0);
  CHECK(delta_k(1000, 3) == doctest::Approx(9.0 * M_PI * M_PI).epsilon(1e-4));
}

TEST_CASE("rattle on the harmonic chain is the per-mode leapfrog") {
  for (double nubar : {0.0, 0.2, 1.0}) {
    const Index N = 32;
    const ChainModel c = harmonic_chain(N, nubar);
    const SystemModel m = build_chain_system(c);
    const PenaltyConfig pen = chain_penalty(c);
    const ThermostatConfig th = chain_thermostat(c);
    IntegratorConfig cfg;
    cfg.dt = 0.5 * critical_timestep(N, nubar);
    cfg.newton_tol = 1e-13;
    std::mt19937_64 g(61);
    RandomStream rq = rng_stream(1, 0, "initial"), rz = rng_stream(1, 0, "initial_z");
    const PhaseState s = chain_initial_state(c, Vec::Constant(N, 0.5) + 0.05 * random_vec(N, g), rq, rz);
    const PhaseState t = nubar > 0.0 ? rattle_step(m, pen, th, cfg, s).first
                                     : [&] {
                                         NoiseStreams rng = NoiseStreams::make(1, 0);
                                         return verlet_baseline_step(m, th, cfg, s, rng).first;
                                       }();
    const Eigen::Matrix2Xd a = spectral_variables(s.q, penalized_momentum(m, pen, s), nubar);
    const Eigen::Matrix2Xd b = spectral_variables(t.q, penalized_momentum(m, pen, t), nubar);
    const double scale = a.norm();
    for (Index k = 1; k < N; ++k) {
      const Eigen::Vector2d expect = mode_propagator(h_mode(cfg.dt, N, nubar, k)) * a.col(k);
      CHECK((b.col(k) - expect).norm() <= 1e-10 * scale);
    }
    CHECK(std::abs(b(0, 0) - a(0, 0)) <= 1e-10 * scale);
  }
}

TEST_CASE("chain initial state satisfies both constraints") {
  ChainModel c;
  c.N = 20;
  c.nubar = 0.1;
  RandomStream rq = rng_stream(1, 0, "initial"), rz = rng_stream(1, 0, "initial_z");
  const PhaseState s = chain_initial_state(c, Vec::Constant(20, 0.5), rq, rz);
  const SystemModel m = build_chain_system(c);
  CHECK(position_residual(m, chain_penalty(c), s) < 1e-12);
  CHECK(momentum_residual(m, chain_penalty(c), s) < 1e-10);
}

TEST_CASE("chain model validation") {
  ChainModel c;
  c.N = 1;
  CHECK_THROWS(c.validate());
  c.N = 4;
  c.nubar = -1.0;
  CHECK_THROWS(c.validate());
}
