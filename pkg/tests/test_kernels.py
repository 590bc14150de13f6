import dataclasses

import numpy as np
import pytest

from towbombe import bombe, kernels
from towbombe._pykernels import ReplayStream
from towbombe.env import ChannelModel, CollisionMode
from towbombe.harness import ExperimentConfig, sample_stream, sample_uniforms, simulate_sample
from towbombe.policies import Policy, block_width

needs_compiled = pytest.mark.skipif(not kernels.HAVE_COMPILED, reason="extension not built")


def test_replay_stream_serves_in_order():
    r = ReplayStream(np.arange(6.0).reshape(2, 3))
    assert r.random(2).tolist() == [0, 1]
    assert r.random() == 2.0
    assert r.random(3).tolist() == [3, 4, 5]
    with pytest.raises(IndexError):
        r.random()


def test_block_draw_equals_sequential_draws():
    cfg = ExperimentConfig(horizon=50)
    model = ChannelModel(cfg.probs)
    bcfg = bombe.BombeConfig(cfg.n_users, 5, cfg.omega, cfg.amplitude)
    state, rng = bombe.init(bcfg), sample_stream(cfg.seed, 3)
    rewards = []
    for _ in range(cfg.horizon):
        _, _, out = bombe.run_slot(bcfg, state, model, rng)
        rewards.append(out.rewards)
    assert np.array_equal(np.array(rewards).T, simulate_sample(cfg, 3, "python"))


@pytest.mark.parametrize("policy", list(Policy))
def test_block_width(policy):
    cfg = ExperimentConfig(policy=policy, horizon=7)
    assert sample_uniforms(cfg, 0).shape == (7, block_width(policy, 3, 5))


@needs_compiled
@pytest.mark.parametrize("policy", list(Policy))
@pytest.mark.parametrize("mode", list(CollisionMode))
def test_compiled_matches_python_bit_for_bit(policy, mode):
    for probs, m in [((0.03, 0.05, 0.1, 0.2, 0.9), 3), ((0.6, 0.4), 2), ((0.5, 0.5, 0.7, 0.1), 4)]:
        cfg = ExperimentConfig(probs=probs, n_users=m, policy=policy, collision_mode=mode,
                               horizon=300, amplitude=1.0, epsilon=0.2, tau=0.05)
        for s in range(3):
            a = simulate_sample(cfg, s, "compiled")
            b = simulate_sample(cfg, s, "python")
            assert np.array_equal(a, b), (policy, mode, probs, s)


@needs_compiled
def test_compiled_matches_with_custom_period():
    cfg = ExperimentConfig(period=3, horizon=400)
    assert np.array_equal(simulate_sample(cfg, 1, "compiled"), simulate_sample(cfg, 1, "python"))


def test_backend_selection():
    assert kernels.active_backend("python") == "python"
    with pytest.raises(ValueError):
        kernels.get_simulator("fortran")
    expected = "compiled" if kernels.HAVE_COMPILED else "python"
    assert kernels.active_backend("auto") == expected


@needs_compiled
def test_compiled_rejects_bad_block():
    cfg = ExperimentConfig(horizon=5)
    sim = kernels.get_simulator("compiled")
    with pytest.raises(ValueError):
        sim(0, np.asarray(cfg.probs), 3, np.zeros((5, 4)), 0, 0.08, 1.0, 5, 0.1, 0.1)


def test_fallback_selected_when_extension_missing(monkeypatch):
    import importlib
    import sys

    import towbombe

    monkeypatch.setitem(sys.modules, "towbombe._ckernels", None)
    monkeypatch.delattr(towbombe, "_ckernels", raising=False)
    reloaded = importlib.reload(kernels)
    try:
        assert not reloaded.HAVE_COMPILED
        assert reloaded.active_backend("auto") == "python"
        with pytest.raises(RuntimeError):
            reloaded.get_simulator("compiled")
    finally:
        monkeypatch.undo()
        importlib.reload(kernels)
