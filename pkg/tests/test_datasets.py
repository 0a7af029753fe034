import numpy as np
import pytest
from numpy.testing import assert_array_equal

from combigrad import settings
from combigrad.errors import CapacityError, InputError, InstanceError
from combigrad.harness.datasets import (
    derive_seed,
    gen_pm,
    gen_sp,
    gen_tsp,
    globe_pool,
    load_dataset,
    make_splits,
    save_dataset,
)
from combigrad.learn import load_config
from combigrad.solvers import GridGraph, GridShortestPath, TravelingSalesman, TspInstance, brute_force_oracle


def test_derive_seed_is_stable_and_tag_dependent():
    assert derive_seed(3, "sp/0") == derive_seed(3, "sp/0")
    assert derive_seed(3, "sp/0") != derive_seed(3, "sp/1")
    assert derive_seed(3, "sp/0") != derive_seed(4, "sp/0")


def test_gen_sp_shapes_and_hidden_costs():
    ds = gen_sp(3, 5, n_terrain_types=4, seed=1, connectivity=4)
    assert len(ds) == 5 and ds.family == "sp" and ds.k == 3
    assert ds[0].features.shape == (9, 4)
    costs = np.asarray(ds.meta["type_costs"])
    assert np.all((costs >= 0.8) & (costs <= 9.2))
    for ex in ds:
        assert_array_equal(ex.true_weights, costs[ex.truth["types"]])


def test_gen_sp_labels_are_optimal_against_oracle():
    ds = gen_sp(3, 10, n_terrain_types=2, seed=2, connectivity=4, type_costs=[1.0, 9.0])
    solver = GridShortestPath(GridGraph(3, 4))
    candidates = list(solver.enumerate())
    for ex in ds:
        best = brute_force_oracle(candidates, ex.true_weights).objective
        assert float(np.dot(ex.true_weights, ex.label)) == pytest.approx(best)


def test_gen_sp_singleton_and_validation():
    assert len(gen_sp(4, 1)) == 1
    with pytest.raises(InputError):
        gen_sp(3, 1, n_terrain_types=1)
    with pytest.raises(InputError):
        gen_sp(3, 1, n_terrain_types=2, type_costs=[1.0, -1.0])


def test_generation_is_reproducible():
    a, b, c = gen_pm(4, 3, seed=5), gen_pm(4, 3, seed=5), gen_pm(4, 3, seed=6)
    for x, y in zip(a, b):
        assert_array_equal(x.features, y.features)
        assert_array_equal(x.label, y.label)
    assert any(not np.array_equal(x.features, z.features) for x, z in zip(a, c))


def test_threaded_generation_matches_sequential(monkeypatch):
    seq = gen_sp(3, 6, seed=9)
    monkeypatch.setattr(settings, "WORKERS", 3)
    par = gen_sp(3, 6, seed=9)
    for x, y in zip(seq, par):
        assert_array_equal(x.features, y.features)
        assert_array_equal(x.label, y.label)


def test_gen_tsp_triangle_and_pool():
    ds = gen_tsp(3, 4, n_cities_pool=10, seed=0)
    for ex in ds:
        assert_array_equal(ex.label, [1, 1, 1])
        assert ex.features.shape == (3, 10)
    locations = np.asarray(ds.meta["pool_locations"])
    np.testing.assert_allclose(np.linalg.norm(locations, axis=1), 1.0)


def test_gen_tsp_labels_match_brute_force():
    ds = gen_tsp(5, 10, n_cities_pool=20, seed=1, flag_dim=8)
    assert ds.n_features == 8
    candidates = list(TravelingSalesman(TspInstance(5)).enumerate())
    for ex in ds:
        best = brute_force_oracle(candidates, ex.true_weights).objective
        assert float(np.dot(ex.true_weights, ex.label)) == pytest.approx(best, abs=1e-12)


def test_globe_pool_flags_are_orthogonal_when_square():
    _, flags = globe_pool(12, 12, seed=3)
    np.testing.assert_allclose(flags @ flags.T, 12 * np.eye(12), atol=1e-9)
    _, wide = globe_pool(12, 20, seed=3)
    np.testing.assert_allclose(wide @ wide.T, 20 * np.eye(12), atol=1e-9)
    _, narrow = globe_pool(12, 5, seed=3)
    assert narrow.shape == (12, 5)


def test_gen_tsp_validation():
    with pytest.raises(InstanceError):
        gen_tsp(5, 1, n_cities_pool=4)
    with pytest.raises(CapacityError):
        gen_tsp(21, 1, n_cities_pool=30)


def test_gen_pm_digit_costs():
    ds = gen_pm(2, 3, seed=0)
    for ex in ds:
        d = ex.truth["digits"]
        assert ex.true_weights[2] == 10 * d[0] + d[2]
        assert ex.features.shape == (4, 10)
    with pytest.raises(InstanceError):
        gen_pm(3, 1)


def test_gen_pm_features_are_one_hot_by_default():
    ds = gen_pm(4, 3, seed=1)
    for ex in ds:
        assert_array_equal(ex.features, np.eye(10)[ex.truth["digits"]])
    noisy = gen_pm(4, 1, seed=1, noise=0.1)
    assert not np.array_equal(noisy[0].features, ds[0].features)


def test_config_noise_defaults_per_family():
    sp = load_config({"family": "sp", "k": 4, "lambda": 20.0})
    pm = load_config({"family": "pm", "k": 4, "lambda": 10.0})
    assert (sp.feature_noise(), pm.feature_noise()) == (0.1, 0.0)
    assert load_config({"family": "pm", "k": 4, "lambda": 10.0, "noise": 0.2}).feature_noise() == 0.2


def test_make_splits_sizes():
    cfg = load_config({"family": "pm", "k": 2, "lambda": 10.0, "train_size": 4, "test_size": 2})
    train_set, test_set = make_splits(cfg)
    assert (len(train_set), len(test_set)) == (4, 2)


def test_dataset_file_roundtrip(tmp_path):
    ds = gen_sp(3, 2, seed=4)
    path = save_dataset(ds, tmp_path / "data" / "train.jsonl")
    assert (tmp_path / "data" / "train.meta.json").exists()
    loaded = load_dataset(path)
    assert (loaded.family, loaded.k, len(loaded)) == ("sp", 3, 2)
    assert_array_equal(loaded[1].label, ds[1].label)
    assert loaded.meta["type_costs"] == ds.meta["type_costs"]


def test_load_dataset_missing(tmp_path):
    with pytest.raises(InputError):
        load_dataset(tmp_path / "nope.jsonl")
