import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fractv.errors import InvalidInputError, InvalidParameterError
from fractv.pipeline import (ExperimentConfig, Workspace, add_noise, grid_search, run_experiment, segment,
                             snr_db, static_baseline, two_stage_denoise)
from fractv.synth import synthesize


@pytest.fixture(scope="module")
def data():
    coords, g, X = synthesize(12, 12, 6, seed=3)
    return g, X


def small_cfg(**kw):
    base = dict(P=2, Q=4, group_length=4, first_stage="median", orders_grid=[(1.0, 1.0)])
    base.update(kw)
    return ExperimentConfig(**base)


class TestSnr:
    def test_examples(self):
        X = np.ones((2, 2))
        assert snr_db(X, X) == 300.0
        assert snr_db(X, np.zeros((2, 2))) == pytest.approx(0.0)
        assert snr_db(X, 0.9 * X, "conventional") == pytest.approx(20.0)
        assert snr_db(X, 0.9 * X) == pytest.approx(10.0)

    def test_zero_reference(self):
        with pytest.raises(InvalidInputError):
            snr_db(np.zeros(3), np.ones(3))

    @settings(max_examples=25, deadline=None)
    @given(st.sampled_from([-5.0, -2.0, 0.0, 5.0, 10.0]), st.sampled_from(["paper", "conventional"]),
           st.integers(0, 2**32 - 1))
    def test_add_noise_hits_target(self, target, conv, seed):
        X = np.random.default_rng(seed).standard_normal((7, 9))
        assert abs(snr_db(X, add_noise(X, target, seed, conv), conv) - target) < 1e-9

    def test_add_noise_deterministic(self):
        X = np.ones((3, 3))
        np.testing.assert_array_equal(add_noise(X, 0, [1, 2]), add_noise(X, 0, [1, 2]))


def test_segment():
    X = np.arange(12).reshape(2, 6)
    blocks = segment(X, 3)
    assert len(blocks) == 2
    np.testing.assert_array_equal(blocks[1], [[3, 4, 5], [9, 10, 11]])
    with pytest.raises(InvalidParameterError):
        segment(X, 4)


class TestConfig:
    def test_round_trip(self):
        cfg = small_cfg(orders_grid=[(0.5, 1)])
        assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg

    def test_unknown_key(self):
        with pytest.raises(InvalidParameterError):
            ExperimentConfig.from_dict({"bogus": 1})

    @pytest.mark.parametrize("kw", [dict(P=5, group_length=4), dict(orders_grid=[(1.5, 0)]),
                                    dict(first_stage="x"), dict(Q=99), dict(group_length=5)])
    def test_validate(self, kw):
        with pytest.raises(InvalidParameterError):
            small_cfg(**kw).validate(12, 12)


class TestTwoStage:
    def test_clean_input_passes_through(self, data):
        g, X = data
        cfg = small_cfg()
        ws = Workspace(g, 4)
        from fractv.pipeline import second_stage
        X_hat, resid, _ = second_stage(X, X, ws, (0.5, 0.5), 2, 4, ridge=0.0)
        assert np.abs(X_hat - X).max() < 1e-8 and resid < 1e-8

    def test_reports_snrs(self, data):
        g, X = data
        Y = add_noise(X, 0.0, 1)
        X2, frag = two_stage_denoise(Y, g, (1.0, 1.0), small_cfg(), X_clean=X)
        assert X2.shape == X.shape and np.isrealobj(X2)
        assert frag["input_snr_db"] == pytest.approx(0.0, abs=1e-9)
        assert frag["second_stage_snr_db"] == pytest.approx(snr_db(X, X2))

    def test_needs_clean_in_experiment_mode(self, data):
        g, X = data
        with pytest.raises(InvalidParameterError):
            two_stage_denoise(X, g, (1, 1), small_cfg())

    def test_second_stage_beats_input(self, data):
        g, X = data
        Y = add_noise(X, -2.0, 5)
        _, frag = two_stage_denoise(Y, g, (1.0, 1.0), small_cfg(), X_clean=X)
        assert frag["second_stage_snr_db"] > frag["input_snr_db"]


class TestGridSearch:
    def test_surface_and_best(self, data):
        g, X = data
        Y = add_noise(X, -2.0, 2)
        grid = [(a, b) for a in (0.0, 0.5, 1.0) for b in (0.0, 0.5, 1.0)]
        rep = grid_search(Y, g, small_cfg(orders_grid=grid), X_clean=X)
        assert len(rep.surface) == 9
        best = max(v for _, _, v in rep.surface)
        assert rep.surface_value(rep.best_orders) == best == rep.second_stage_snr_db
        assert rep.static_best_b in (0.0, 0.5, 1.0)
        assert rep.estimate.shape == X.shape

    def test_deterministic_with_threads(self, data):
        g, X = data
        Y = add_noise(X, -2.0, 2)
        grid = [(0.5, 1.0), (1.0, 1.0)]
        r1 = grid_search(Y, g, small_cfg(orders_grid=grid), X_clean=X)
        r2 = grid_search(Y, g, small_cfg(orders_grid=grid, workers=2), X_clean=X)
        d1, d2 = r1.to_dict(), r2.to_dict()
        d1.pop("config"), d2.pop("config")
        assert d1 == d2

    def test_blind_mode(self, data):
        g, X = data
        Y = add_noise(X, 0.0, 4)
        rep = grid_search(Y, g, small_cfg(mode="blind", orders_grid=[(0.5, 0.5), (1.0, 1.0)]))
        d = rep.to_dict()
        assert rep.ranking == "residual"
        assert "second_stage_snr_db" not in d and "residual" in d["surface"][0]
        assert rep.surface_value(rep.best_orders) == min(v for _, _, v in rep.surface)

    def test_tikhonov_gamma_selected(self, data):
        g, X = data
        Y = add_noise(X, -2.0, 2)
        rep = grid_search(Y, g, small_cfg(first_stage="tikhonov"), X_clean=X)
        assert rep.gamma in ExperimentConfig().gamma_grid


def test_static_baseline_single_step(data):
    g, X = data
    Y = add_noise(X, 0.0, 9)
    b, X_hat, s = static_baseline(Y, X, g, [0.5, 1.0], Q=4, X_clean=X)
    assert b in (0.5, 1.0) and X_hat.shape == X.shape and s == pytest.approx(snr_db(X, X_hat))


def test_run_experiment(data):
    g, X = data
    cfg = small_cfg(trials=2, orders_grid=[(0.5, 1.0), (1.0, 1.0)])
    rep = run_experiment(X, g, cfg)
    assert len(rep.trials) == 2
    for t in rep.trials:
        assert t["input_snr_db"] == pytest.approx(-2.0, abs=1e-9)
    mean = np.mean([t["second_stage_snr_db"] for t in rep.trials])
    assert rep.second_stage_snr_db == pytest.approx(mean)
    assert run_experiment(X, g, cfg).to_dict() == rep.to_dict()
