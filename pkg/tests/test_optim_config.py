import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from combigrad.errors import ConfigError, InstanceError
from combigrad.learn import AdamState, TrainConfig, adam_step, load_config, lr_for_epoch, preset
from combigrad.learn.config import REPELLENT_C_K


# =========================
# Adam
# =========================

def test_adam_zero_gradient_keeps_params():
    params = {"w": np.array([1.0, -2.0])}
    state = AdamState(lr=0.1)
    for _ in range(3):
        adam_step(params, {"w": np.zeros(2)}, state)
    assert_allclose(params["w"], [1.0, -2.0])
    assert state.step == 3


def test_adam_first_step_moves_by_lr():
    params = {"w": np.array([1.0])}
    adam_step(params, {"w": np.array([1.0])}, AdamState(lr=0.1))
    assert params["w"][0] == pytest.approx(0.9, abs=1e-6)


def test_adam_lr_override_and_shape_check():
    params = {"w": np.array([0.0])}
    adam_step(params, {"w": np.array([-1.0])}, AdamState(lr=0.1), lr=0.01)
    assert params["w"][0] == pytest.approx(0.01, abs=1e-6)
    with pytest.raises(InstanceError):
        adam_step(params, {"w": np.zeros(2)}, AdamState(lr=0.1))


def test_lr_schedule_drops_by_ten():
    assert lr_for_epoch(5e-2, 29, [30, 40]) == pytest.approx(5e-2)
    assert lr_for_epoch(5e-2, 30, [30, 40]) == pytest.approx(5e-3)
    assert lr_for_epoch(5e-2, 45, [30, 40]) == pytest.approx(5e-4)
    assert AdamState(lr=1.0, schedule=[1]).lr_at(1) == pytest.approx(0.1)


# =========================
# Config
# =========================

def test_presets_carry_published_hyperparameters():
    sp = preset("sp", 6)
    assert (sp.lam, sp.batch, sp.epochs, sp.schedule) == (20.0, 70, 50, [30, 40])
    pm = preset("pm", 4)
    assert (pm.lam, pm.epochs, pm.schedule) == (10.0, 50, [30, 40])
    tsp = preset("tsp", 5)
    assert tsp.betas == (0.5, 0.999)
    assert tsp.eps == 1e-3
    assert tsp.repellent_window == (15, 30)
    assert tsp.c_k == REPELLENT_C_K[5] == 2.0


def test_preset_overrides_accept_lambda_alias():
    cfg = preset("sp", 4, **{"lambda": 0.001, "epochs": 2})
    assert cfg.lam == 0.001
    assert cfg.epochs == 2


@pytest.mark.parametrize(
    "data",
    [
        {"family": "sp", "k": 4, "lambda": 0.0},
        {"family": "pm", "k": 3, "lambda": 10.0},
        {"family": "sp", "k": 4, "lambda": 10.0, "solver": "approx"},
        {"family": "tsp", "k": 5, "lambda": 10.0, "repellent_window": [30, 15]},
        {"family": "sp", "k": 4, "lambda": 10.0, "unknown": 1},
        {"family": "knapsack", "k": 4, "lambda": 10.0},
    ],
)
def test_invalid_configs_raise_config_error(data):
    with pytest.raises(ConfigError):
        load_config(data)


def test_load_config_from_file_with_preset(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"family": "tsp", "k": 5, "preset": True, "epochs": 3}))
    cfg = load_config(path)
    assert cfg.epochs == 3
    assert cfg.lam == 20.0


def test_load_config_unreadable(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_config_json_uses_lambda_key_and_hash_is_stable():
    cfg = load_config({"family": "sp", "k": 4, "lambda": 20.0})
    data = cfg.to_json_dict()
    assert data["lambda"] == 20.0 and "lam" not in data
    assert load_config(data).config_hash() == cfg.config_hash()
    assert load_config({**data, "seed": 1}).config_hash() != cfg.config_hash()


def test_repellent_window_is_half_open():
    cfg = TrainConfig(family="tsp", k=5, lam=20.0, repellent_window=(15, 30), c_k=2.0)
    assert [cfg.repellent_active(e) for e in (14, 15, 29, 30)] == [False, True, True, False]
    assert not TrainConfig(family="tsp", k=5, lam=20.0, repellent_window=(0, 5)).repellent_active(1)
