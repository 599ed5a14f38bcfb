import math

import numpy as np
import pytest

import irsa


def test_config_roundtrip():
    cfg = irsa.SystemConfig()
    cfg.num_res = 10
    cfg.load = 1.0
    cfg.num_antennas = 8
    cfg.degree = "regular:3"
    assert cfg.degree == [(3, 1.0)]
    assert cfg.resolved_num_users() == 10
    cfg.validate()
    cfg.num_antennas = 0
    with pytest.raises(ValueError):
        cfg.validate()


def test_simulate_is_reproducible():
    cfg = irsa.SystemConfig()
    cfg.num_res = 10
    cfg.load = 0.8
    cfg.num_antennas = 8
    cfg.degree = "soliton:6"
    cfg.estimator = irsa.Estimator.LCMMSE
    a = irsa.simulate(cfg, trials=8, seed=3)
    b = irsa.simulate(cfg, trials=8, seed=3, threads=2)
    assert a["throughput_samples"] == b["throughput_samples"]
    assert 0.0 <= a["throughput"] <= 0.8 + 1e-12
    assert len(a["plr_samples"]) == 8


def test_theta_and_density_evolution():
    assert irsa.theta_closed_form(irsa.ThetaKind.Theta1, 1, 1, 10.0, 10.0) == pytest.approx(math.exp(-1.0))
    theta = irsa.theta_table(irsa.ThetaKind.Gamma, 40, 16, 10.0, 10.0)
    assert len(theta) == 40
    assert all(0.0 <= t <= 1.0 for t in theta)
    r = irsa.de_fixed_point(0.5, "soliton:8", [1.0] * 40)
    assert r["plr"] == 0.0 and r["throughput"] == 0.5
    inf = irsa.inflection_load("regular:3", [1.0] + [0.0] * 39, 0.5, 1.2, 1e-4)
    assert abs(inf["load"] - 0.818) < 0.005


def test_empirical_theta_single_user():
    t = irsa.empirical_theta(1, 8, 1.0, 8.0, trials=4000, seed=2)
    expect = sum(math.exp(-8.0) * 8.0**k / math.factorial(k) for k in range(8))
    assert abs(t[0] - expect) < 4 * math.sqrt(expect * (1 - expect) / 4000)


def test_estimators_accept_numpy():
    rng = np.random.default_rng(0)
    n, tau, k = 4, 6, 3
    pilots = (rng.standard_normal((tau, k)) + 1j * rng.standard_normal((tau, k))) / math.sqrt(2)
    h = (rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))) / math.sqrt(2)
    y = h @ pilots.conj().T
    est_a, var_a = irsa.mmse_estimate(y, pilots, [1.0] * k, 0.1, "pilot")
    est_b, var_b = irsa.mmse_estimate(y, pilots, [1.0] * k, 0.1, "user")
    assert est_a.shape == (n, k)
    assert np.allclose(est_a, est_b, atol=1e-10)
    assert np.allclose(var_a, var_b, atol=1e-12)
    lc, delta = irsa.lcmmse_estimate(y, pilots, [1, 0, 1], [1.0] * k, 0.1)
    assert np.all(lc[:, 1] == 0)
    assert delta[1] == 0.0


def test_cli_in_process():
    code, out, _ = irsa.run_cli(["presets"])
    assert code == 0
    assert "de_lcmmse" in out
    names = {p["name"] for p in irsa.list_presets()}
    assert "default" in names
    cfg = irsa.load_config("de_lcmmse")
    assert cfg.num_antennas == 16
    assert cfg.estimator == irsa.Estimator.LCMMSE
    code, _, err = irsa.run_cli(["simulate", "--config", "no/such/file.ini"])
    assert code != 0 and err
