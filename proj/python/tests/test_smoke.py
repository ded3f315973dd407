import math

import numpy as np
import pytest

import ncsnaf


def test_advantage_matches_quadratic_form():
    rng = np.random.default_rng(3)
    for m in (1, 2, 3):
        l = rng.normal(size=m * (m + 1) // 2)
        L = ncsnaf.assemble_L(l, m)
        assert np.allclose(np.triu(L, 1), 0.0)
        mu = rng.normal(size=m)
        u = rng.normal(size=m)
        value, P = ncsnaf.advantage(u, mu, L)
        d = u - mu
        assert value <= 0.0
        assert math.isclose(value, -0.5 * d @ (L @ L.T) @ d, rel_tol=1e-12, abs_tol=1e-15)
        assert np.array_equal(P, P.T)
        assert ncsnaf.advantage(mu, mu, L)[0] == 0.0


def test_chua_origin_is_equilibrium():
    assert np.array_equal(ncsnaf.chua_deriv(np.zeros(3)), np.zeros(3))
    x = ncsnaf.simulate_chua(np.zeros(3), 1.0)
    assert np.array_equal(x, np.zeros(3))


def test_chua_derivative_example():
    # phi(1) = 1/7
    dx = ncsnaf.chua_deriv(np.array([1.0, 0.0, 0.0]), 0.5)
    assert dx == pytest.approx([-10.0 / 7.0, 1.5, 0.0], abs=1e-12)


def test_reward_example():
    r1, r2, r3, total = ncsnaf.reward(
        [np.array([0.0, 0.0]), np.array([0.0, 1.0])],
        [np.array([1.0]), np.array([0.0])],
        np.array([1.0, 1.0]),
    )
    assert r1 == pytest.approx(-2.6)
    assert r2 == pytest.approx(-0.8)
    assert r3 == pytest.approx(-0.15)
    assert total == pytest.approx(r1 + r2 + r3)


def test_config_round_trip_and_errors():
    cfg = ncsnaf.Config()
    assert cfg.state_dim == 22
    again = ncsnaf.Config.from_text(cfg.to_ini())
    assert again.to_ini() == cfg.to_ini()
    with pytest.raises(ncsnaf.ConfigError):
        cfg.set("train.no_such_key=1")
    with pytest.raises(ncsnaf.ConfigError):
        ncsnaf.Config.from_text("[bogus]\nx = 1\n")
    assert "train.episodes" in ncsnaf.known_keys()


def test_verify_passes():
    suites = ncsnaf.verify()
    assert [s["name"] for s in suites][0] == "naf_algebra"
    assert all(s["passed"] for s in suites), suites


def test_train_then_evaluate(tmp_path):
    cfg = ncsnaf.Config()
    cfg.episodes = 2
    cfg.seed = 5
    cfg.out = str(tmp_path / "run")
    cfg.set("train.horizon=2")
    run = ncsnaf.train(cfg)
    assert [e["episode"] for e in run["episodes"]] == [1, 2]
    final = run["checkpoints"][-1]
    assert final.name == "final.ckpt"

    traj = tmp_path / "traj.csv"
    roll = ncsnaf.evaluate(final, cfg, np.array([0.1, 0.0, -0.1]), 7, traj)
    assert roll["x"].shape == (33, 3)
    assert roll["x"][0] == pytest.approx([0.1, 0.0, -0.1])
    assert traj.exists() and (tmp_path / "traj_delays.csv").exists()

    with pytest.raises(ncsnaf.DimensionError):
        ncsnaf.evaluate(final, cfg, np.zeros(2))
