import math

import pytest

import twrsim

C = twrsim.SPEED_OF_LIGHT
R = twrsim.DEFAULT_TIMESTAMP_VARIANCE


def test_constants():
    assert C == 299792458.0
    assert R == pytest.approx(6.96e-21)


def test_noise_free_estimates():
    ts = twrsim.simulate_transaction(tof=5e-9, dt32=3.5e-4, dt53=1.9e-3, skew_i=20e-6, skew_j=-20e-6)
    assert len(ts) == 6
    assert twrsim.estimate_ds(ts) == pytest.approx(5e-9 * (1 + 20e-6), rel=1e-9)
    assert twrsim.estimate_ss(ts) == pytest.approx(1.20001e-8, rel=1e-9)
    assert twrsim.estimate_ss(ts[:4]) == pytest.approx(1.20001e-8, rel=1e-9)


def test_variances_and_bias():
    assert twrsim.ds_variance(1.0, 1e-3, 1e-3) == pytest.approx(3.0)
    assert twrsim.brute_force_ds_variance(1.0, 2e-3, 5e-3) == pytest.approx(1.56)
    assert twrsim.ss_variance(R) == R
    assert twrsim.ss_bias(4e-5, 3.5e-4) == pytest.approx(7e-9)


def test_optimizer():
    d = twrsim.solve_optimal_delay(3.5e-4, 7.2e-3)
    assert 1.85e-3 <= d["dt53_star"] <= 2.0e-3
    p, q = twrsim.optimality_cubic(3.5e-4, 7.2e-3)
    assert p == pytest.approx(-2.765e-6)
    assert q == pytest.approx(-1.84975e-9)
    assert twrsim.r_avg(1.9e-3, 3.5e-4, 7.2e-3, R) == pytest.approx(8.0124e-23, rel=1e-4)
    grid = [1e-4 * 1.01**k for k in range(500)]
    best = twrsim.grid_argmin_r_avg(grid, 3.5e-4, 7.2e-3)
    assert abs(math.log(best / d["dt53_star"])) <= math.log(1.01)
    with pytest.raises(twrsim.NoPositiveRoot):
        twrsim.solve_optimal_delay(0.0, 7.2e-3)


def test_crlb():
    r = twrsim.crlb(tof=5e-9, gamma_ij=0.0, dt32=1e-3, dt53=1e-3, R=1.0)
    assert r["tof_variance_bound"] == pytest.approx(3.0, rel=1e-9)
    assert r["closed_form_bound"] == pytest.approx(3.0)
    assert r["jacobian"].shape == (6, 6)
    with pytest.raises(ValueError):
        twrsim.crlb(tof=5e-9, gamma_ij=0.0, dt32=1e-3, dt53=1e-3, R=0.0)


def test_trial_and_sweep():
    r = twrsim.run_trial("DS", n=20000, seed=3)
    expected = twrsim.ds_variance(R, 3.5e-4, 1.9e-3)
    assert r["variance"] / expected == pytest.approx(1.0, abs=0.05)
    rows = twrsim.sweep_dt53([2e-4, 2e-3, 2e-2], n=2000, seed=1)
    assert [row["empirical_rate"] for row in rows] == sorted(
        (row["empirical_rate"] for row in rows), reverse=True
    )
    assert rows[0]["analytic_std"] > rows[-1]["analytic_std"]
    assert twrsim.sweep_dt53([1e-3], n=500, seed=9) == twrsim.sweep_dt53([1e-3], n=500, seed=9)


def test_errors():
    with pytest.raises(twrsim.ConfigError):
        twrsim.run_trial("XX")
    with pytest.raises(ValueError):
        twrsim.to_clock(0.0, skew=5e-3)
    with pytest.raises(twrsim.DegenerateInterval):
        twrsim.estimate_ds([0.0, 1e-9, 1e-3, 2e-3, 1e-3, 3e-3])
