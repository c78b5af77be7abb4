import math

import numpy as np
import pytest

import immp


def test_critical_timestep_limits():
    assert immp.critical_timestep(2, 0.0) == pytest.approx(1 / math.sqrt(2), rel=1e-5)
    assert immp.critical_timestep(100000, 1.0) == pytest.approx(2.0, rel=1e-6)
    dtc = immp.critical_timestep(64, 0.3)
    assert immp.h_mode(dtc, 64, 0.3, 63) == pytest.approx(2.0)


def test_mode_propagator_is_symplectic():
    for h in (0.1, 1.0, 2.5):
        assert np.linalg.det(immp.mode_propagator(h)) == pytest.approx(1.0)


def test_moments_and_acceptance():
    m = immp.energy_variation_moments(2, 0.1, 0.0)
    assert m.mean == pytest.approx((0.1 * math.sqrt(8)) ** 6 / 32)
    dt = immp.predicted_critical_dt(64, 0.3, 0.5)
    assert immp.gaussian_acceptance(immp.energy_variation_moments(64, dt, 0.3)) == pytest.approx(0.5, rel=1e-8)
    assert immp.critical_dt_scaling_exponent(True) == pytest.approx(1 / 6)


def test_tridiagonal_solve_matches_dense():
    n, nb = 12, 0.7
    w = np.linspace(-1, 1, n)
    lap = np.zeros((n, n))
    for i in range(n - 1):
        lap[i, i] -= 1
        lap[i + 1, i + 1] -= 1
        lap[i, i + 1] += 1
        lap[i + 1, i] += 1
    dense = np.eye(n) - nb**2 * n**2 * lap
    np.testing.assert_allclose(immp.tridiagonal_solve(n, nb, w), np.linalg.solve(dense, w), rtol=1e-10, atol=1e-12)


def test_spectral_round_trip():
    x = np.random.default_rng(1).normal(size=16)
    np.testing.assert_allclose(immp.neumann_spectral_inverse(immp.neumann_spectral_transform(x)), x, atol=1e-12)


def test_double_well_hmc_samples_the_boltzmann_law():
    q = immp.double_well_hmc(nu=1.0, dt=0.2, gamma=1.0, steps=60000, burn_in=1000, seed=3)
    assert q.shape == (59000,)
    frac = np.mean(q < 0.0)
    assert abs(frac - immp.double_well_cdf(0.0)) < 0.1
    inside = np.mean(np.abs(q) < 1.0)
    expect = immp.double_well_cdf(1.0) - immp.double_well_cdf(-1.0)
    assert abs(inside - expect) < 0.05


def test_run_experiment_and_config_errors():
    assert "stiff-demo" in immp.experiment_names()
    cfg = "[run]\nseed = 2\nsteps = 500\nburn_in = 50\n[experiment]\neps_list = 0.1\nverlet_steps = 100\n"
    a = immp.run_experiment("stiff-demo", cfg)
    b = immp.run_experiment("stiff-demo", cfg)
    assert a["csv"] == b["csv"]
    assert a["records"]
    with pytest.raises(immp.ConfigError):
        immp.run_experiment("stiff-demo", "[run]\nbogus = 1\n")
