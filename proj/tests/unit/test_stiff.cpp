#include <doctest.h>

#include "helpers.hpp"
#include "immp/errors.hpp"
#include "immp/geometry.hpp"
#include "immp/integrators.hpp"
#include "immp/models.hpp"
#include "immp/stat_tests.hpp"
#include "immp/stiff.hpp"

using namespace immp;
using namespace immp::testing;

TEST_CASE("effective potential of a Gaussian fast variable") {
  const double u = 0.7;
  CHECK(effective_potential([&](double z) { return u + 0.5 * z * z; }, 1.0) ==
        doctest::Approx(u - std::log(std::sqrt(2.0 * M_PI))).epsilon(1e-10));
  // off-center and at another temperature: -(1/beta) ln sqrt(2 pi / beta)
  CHECK(effective_potential([&](double z) { return 0.5 * (z - 40.0) * (z - 40.0); }, 2.0) ==
        doctest::Approx(-0.5 * std::log(std::sqrt(M_PI))).epsilon(1e-10));
  // narrow well
  CHECK(effective_potential([&](double z) { return 5e5 * z * z; }, 1.0) ==
        doctest::Approx(-std::log(std::sqrt(M_PI / 5e5))).epsilon(1e-9));
}

TEST_CASE("effective potential rejects non-confining integrands") {
  CHECK_THROWS_AS(effective_potential([](double z) { return -z * z; }, 1.0), QuadratureDivergent);
  CHECK_THROWS_AS(effective_potential([](double) { return 0.0; }, 1.0), QuadratureDivergent);
}

TEST_CASE("effective potential gradient") {
  auto U0 = [](const Vec&, double z) { return 0.5 * z * z + 0.1 * z * z * z * z; };
  auto G0 = [](const Vec& q, double) { return Vec(Vec::Zero(q.size())); };
  CHECK(effective_potential_gradient(U0, G0, Vec::Ones(2), 1.0).norm() == 0.0);

  auto U = [](const Vec& q, double z) {
    const double s = z - q[1];
    return q[0] * q[0] + 0.5 * (1.0 + q[0] * q[0]) * s * s + 0.1 * z * z * z * z;
  };
  auto G = [](const Vec& q, double z) {
    const double s = z - q[1];
    Vec g(2);
    g << 2.0 * q[0] + q[0] * s * s, -(1.0 + q[0] * q[0]) * s;
    return g;
  };
  for (double beta : {0.5, 2.0}) {
    const Vec q = (Vec(2) << 0.4, -0.8).finished();
    const Vec an = effective_potential_gradient(U, G, q, beta);
    const Vec fd = fd_gradient([&](const Vec& x) { return effective_potential(U, x, beta); }, q, 1e-5);
    CHECK((an - fd).norm() <= 1e-6 * std::max(1.0, fd.norm()));
  }
}

TEST_CASE("stiff systems reproduce U(q, xi(q)/eps)") {
  StiffModel m;
  m.epsilon = 0.02;
  m.nubar = 0.3;
  CHECK(m.nu() == doctest::Approx(15.0));
  CHECK(stiff_penalty(m).nu() == doctest::Approx(15.0));
  const SystemModel phys = stiff_physical_system(m);
  const SystemModel pen = stiff_immp_system(m);
  REQUIRE(pen.coupling.has_value());
  std::mt19937_64 g(71);
  for (int i = 0; i < 10; ++i) {
    const Vec q = random_vec(2, g);
    const double xi = phys.xi(q)[0];
    const double expect = stiff_energy(m, q, xi / m.epsilon);
    CHECK(phys.potential(q) == doctest::Approx(expect).epsilon(1e-12));
    const Vec z = Vec::Constant(1, m.nu() * xi);
    CHECK(pen.coupling->value(q, z) == doctest::Approx(expect).epsilon(1e-12));
    const Vec fdq = fd_gradient([&](const Vec& x) { return pen.coupling->value(x, z); }, q, 1e-6);
    CHECK((pen.coupling->grad_q(q, z) - fdq).norm() < 1e-6);
    const Vec fdz = fd_gradient([&](const Vec& x) { return pen.coupling->value(q, x); }, z, 1e-6);
    CHECK((pen.coupling->grad_z(q, z) - fdz).norm() <= 1e-6 * std::max(1.0, fdz.norm()));
    const Vec fdp = fd_gradient(phys.potential, q, 1e-7);
    CHECK((phys.grad_potential(q) - fdp).norm() <= 1e-6 * std::max(1.0, fdp.norm()));
  }
}

TEST_CASE("rigid sampler without forces or friction follows geodesics") {
  SlowPotential flat;
  flat.a1 = 0.0;
  flat.a2 = 0.0;
  const SystemModel m = circle_model(flat, 0.0);
  const PenaltyConfig inf = PenaltyConfig::infinite();
  const ThermostatConfig th(1.0, SymMatrix::zero(2), SymMatrix::zero(1));
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  cfg.newton_tol = 1e-12;
  const Vec q = (Vec(2) << 1.0, 0.0).finished();
  const MomentumProjection pr = project_momentum(m, inf, q, (Vec(2) << 0.3, 1.2).finished(), Vec::Constant(1, 0.5));
  PhaseState s{q, pr.p, Vec::Zero(1), pr.pz};
  const double e0 = 0.5 * s.p.squaredNorm() + 0.5 * s.pz.squaredNorm();
  NoiseStreams rng = NoiseStreams::make(1, 0);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    s = effective_constrained_step(m, th, cfg, s, rng).first;
    worst = std::max(worst, std::abs(0.5 * s.p.squaredNorm() + 0.5 * s.pz.squaredNorm() - e0));
    CHECK(std::abs(m.xi(s.q)[0]) <= cfg.tol_c);
  }
  CHECK(worst < 1e-8);
  // the free auxiliary variable drifts linearly
  CHECK(s.z[0] == doctest::Approx(10000 * 0.01 * pr.pz[0]).epsilon(1e-10));
}

TEST_CASE("rigid sampler: uniform angle on the unit circle") {
  StiffModel sm;
  sm.slow.a1 = 0.0;
  sm.slow.a2 = 0.0;
  sm.nubar = 1.0;
  const SystemModel m = stiff_immp_system(sm);
  const ThermostatConfig th(1.0, SymMatrix::scalar(2, 1.0), SymMatrix::scalar(1, 1.0));
  IntegratorConfig cfg;
  cfg.dt = 0.1;
  cfg.metropolis = true;
  RandomStream rq = rng_stream(2, 0, "initial"), rz = rng_stream(2, 0, "initial_z");
  PhaseState s = sample_constrained_momenta(m, PenaltyConfig::infinite(), th, (Vec(2) << 1.0, 0.0).finished(),
                                            Vec::Zero(1), rq, rz);
  NoiseStreams rng = NoiseStreams::make(2, 0);
  std::vector<double> angles;
  for (int k = 0; k < 60000; ++k) {
    s = effective_constrained_step(m, th, cfg, s, rng).first;
    if (k % 30 == 0) angles.push_back(polar_angle(s.q));
  }
  const TestResult ks = ks_one_sample(angles, [](double a) { return (a + M_PI) / (2.0 * M_PI); });
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("epsilon sweep: stable acceptance, xi of order eps and Verlet blowup") {
  StiffModel base;
  base.nubar = 0.1;
  SweepOptions o;
  o.epsilons = {1e-1, 1e-2, 1e-3};
  o.steps = 20000;
  o.burn_in = 1000;
  o.thin = 20;
  o.verlet_steps = 5000;
  const SweepResult r = epsilon_sweep(base, o);
  REQUIRE(r.rows.size() == 3);
  double lo = 1.0, hi = 0.0;
  for (const auto& row : r.rows) {
    lo = std::min(lo, row.acceptance);
    hi = std::max(hi, row.acceptance);
  }
  CHECK(hi - lo < 0.05);
  CHECK(r.rows[0].mean_abs_xi / r.rows[1].mean_abs_xi == doctest::Approx(10.0).epsilon(0.3));
  CHECK(r.rows[1].mean_abs_xi / r.rows[2].mean_abs_xi == doctest::Approx(10.0).epsilon(0.3));
  // Verlet is stable iff dt <= eps (fast frequency 2/eps for unit radius)
  CHECK_FALSE(r.rows[0].verlet_unstable);
  CHECK(r.rows[1].verlet_unstable);
  CHECK(r.rows[2].verlet_unstable);
}
