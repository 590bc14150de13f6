"""Pure-Python trajectory backend.

Drives the public per-slot operations from a pre-drawn block of uniforms, so
its output is the reference the compiled kernel has to reproduce exactly.
"""
from __future__ import annotations

import numpy as np

from . import bombe
from .baselines import EpsilonGreedy, Softmax, TowMember, UCB1Tuned, independent_team_slot
from .env import ChannelModel
from .policies import Policy


class ReplayStream:
    """Serves ``random(size)`` calls from a flat buffer of uniforms, in order."""

    def __init__(self, uniforms: np.ndarray):
        self._buf = np.ascontiguousarray(uniforms, dtype=np.float64).ravel()
        self._pos = 0

    def random(self, size=None):
        n = 1 if size is None else int(size)
        if self._pos + n > self._buf.size:
            raise IndexError("replay stream exhausted")
        out = self._buf[self._pos:self._pos + n]
        self._pos += n
        return float(out[0]) if size is None else out.copy()

    @property
    def consumed(self) -> int:
        return self._pos


def _team(policy: Policy, n_users, n_channels, omega, amplitude, period, epsilon, tau):
    if policy is Policy.INDEPENDENT_TOW:
        return [TowMember(n_channels, omega, amplitude, period) for _ in range(n_users)]
    if policy is Policy.INDEPENDENT_EG:
        return [EpsilonGreedy(n_channels, epsilon) for _ in range(n_users)]
    if policy is Policy.INDEPENDENT_SOFTMAX:
        return [Softmax(n_channels, tau) for _ in range(n_users)]
    if policy is Policy.INDEPENDENT_UCB1T:
        return [UCB1Tuned(n_channels) for _ in range(n_users)]
    raise ValueError(f"not a team policy: {policy}")


def simulate_rewards(policy: int, probs: np.ndarray, n_users: int, uniforms: np.ndarray,
                     collision_mode: int, omega: float, amplitude: float, period: int,
                     epsilon: float, tau: float) -> np.ndarray:
    """Per-slot rewards, shape ``(n_users, horizon)``."""
    policy = Policy(policy)
    horizon = uniforms.shape[0]
    model = ChannelModel(tuple(probs), collision_mode)
    n = model.n_channels
    rng = ReplayStream(uniforms)
    out = np.empty((n_users, horizon))
    if policy is Policy.BOMBE:
        config = bombe.BombeConfig(n_users, n, omega, amplitude, period)
        state = bombe.init(config)
        for t in range(horizon):
            _, _, outcome = bombe.run_slot(config, state, model, rng)
            out[:, t] = outcome.rewards
    else:
        team = _team(policy, n_users, n, omega, amplitude, period, epsilon, tau)
        for t in range(horizon):
            _, outcome = independent_team_slot(team, model, rng, t)
            out[:, t] = outcome.rewards
    if rng.consumed != uniforms.size:
        raise AssertionError("uniform block layout does not match the policy's draws")
    return out
