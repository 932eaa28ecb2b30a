import json
import math

import pytest

import psurr


def test_ratio_math():
    assert psurr.relative_ratio(1.0, 0.5) == 1.0
    assert psurr.relative_ratio(3.0, 0.5) + psurr.relative_ratio(1 / 3.0, 0.5) == pytest.approx(2.0, abs=1e-12)
    assert psurr.ratio_thresholds(0.1, 0.5, 1)[1] == pytest.approx(11 / 9, abs=1e-12)
    assert psurr.ratio_thresholds(0.1, 0.5, -1)[1] == pytest.approx(9 / 11, abs=1e-12)
    assert psurr.pe_divergence([1.0, 1.0]) == 0.0
    assert psurr.rpe_divergence([0.5, 2.0], 0.0) == psurr.pe_divergence([0.5, 2.0])
    assert psurr.density_ratio(0.0, math.log(2.0)) == pytest.approx(0.5)


def test_surrogate_vertex():
    spec = psurr.SurrogateSpec(psurr.Variant.ppo_rpe, 0.1, 0.0, 0.5)
    rho_eps = psurr.ratio_thresholds(0.1, 0.5, 1)[1]
    assert abs(psurr.evaluate(rho_eps, 2.0, spec).effective_advantage) < 1e-10
    rows = psurr.loss_curve(spec, 1, [0.5, 1.0, 1.5])
    assert rows[1] == (1.0, 1.0, -1.0)


def test_invalid_spec_raises():
    with pytest.raises(ValueError):
        psurr.SurrogateSpec(psurr.Variant.ppo_clip, 0.1, 0.3, 0.5)


def test_log_prob_symmetry():
    lp = psurr.log_prob([0.0], [0.0], [0.3])
    assert lp == pytest.approx(psurr.log_prob([0.0], [0.0], [-0.3]))


def test_env_step():
    env = psurr.Env("bandit2", 0)
    assert list(env.reset()) == [0.0]
    _, reward, done, truncated = env.step([0.5])
    assert done and not truncated
    assert abs(reward - 1.0) < 1.0


def test_train_bandit():
    cfg = {"env": "bandit2", "total_steps": 512, "rollout_len": 256, "minibatch_size": 64, "hidden": [8]}
    rows = psurr.train(json.dumps(cfg))
    assert len(rows) == 2
    assert all(math.isfinite(r["surrogate_loss"]) for r in rows)
    with pytest.raises(psurr.ConfigError):
        psurr.train(json.dumps({"td_gain": 1.0}))


def test_cli_curves(tmp_path):
    code, out, err = psurr.cli(["curves", "--out", str(tmp_path / "c"), "--points", "11"])
    assert code == 0, err
    lines = (tmp_path / "c" / "curve_ppo_rpe_pos.csv").read_text().splitlines()
    assert lines[0] == "rho,neg_loss,dloss_drho"
    assert len(lines) == 12
    assert psurr.cli(["train"])[0] == 2
