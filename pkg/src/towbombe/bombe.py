"""The M-user, N-channel TOW Bombe.

``q[i, k]`` is user ``i``'s estimate for channel ``k``.  When user ``i`` plays
``k`` it adds +1 (rewarded) or ``-omega`` (failed) to its own cell and the same
amount divided by ``M - 1`` is removed from every other user's cell in column
``k``, so column sums never change.  A user's interface heights are
``X[i, k] = q[i, k] - mean of the other N - 1 cells in row i``, which sum to
zero across each row.  Every user picks the highest ``X + osc`` channel.

Oscillations only steer selection; they are never written into ``q``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import env
from .env import ChannelModel, ContractError, SlotOutcome


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BombeConfig:
    n_users: int
    n_channels: int
    omega: float = 0.08
    amplitude: float = 3.0
    period: int | None = None  # defaults to n_channels

    def __post_init__(self):
        if self.n_users < 2 or self.n_channels < 2:
            raise ConfigError(f"the Bombe needs M >= 2 and N >= 2, got M={self.n_users}, N={self.n_channels}")
        if self.omega < 0 or self.amplitude < 0:
            raise ConfigError("omega and amplitude must be nonnegative")
        if self.period is None:
            object.__setattr__(self, "period", self.n_channels)
        if self.period < 2:
            raise ConfigError("oscillation period must be at least 2")

    def osc_table(self) -> np.ndarray:
        """``osc`` for one full period, shape ``(period, N)``; row ``t % period``."""
        return oscillation_table(self.amplitude, self.period, self.n_channels)


@dataclass
class BombeState:
    q: np.ndarray
    t: int = 0
    _osc: np.ndarray | None = field(default=None, repr=False, compare=False)


def oscillation_table(amplitude: float, period: int, n_channels: int) -> np.ndarray:
    # sin is periodic, so reduce the phase index first; keeps values identical
    # for every t in the same residue class.
    table = np.empty((period, n_channels))
    for r in range(period):
        for k in range(n_channels):
            table[r, k] = amplitude * math.sin(2.0 * math.pi * ((r + k) % period) / period)
    return table


def init(config: BombeConfig) -> BombeState:
    return BombeState(q=np.zeros((config.n_users, config.n_channels)), t=0)


def osc(config: BombeConfig, t: int, k: int) -> float:
    """``A sin(2 pi t / period + 2 pi k / period)`` with zero-based channel ``k``."""
    if not 0 <= k < config.n_channels:
        raise ContractError(f"channel index {k} out of range")
    return config.amplitude * math.sin(2.0 * math.pi * ((t + k) % config.period) / config.period)


def _row_sums(q: np.ndarray) -> np.ndarray:
    # left-to-right accumulation; the compiled kernel sums in the same order
    s = q[:, 0].copy()
    for l in range(1, q.shape[1]):
        s += q[:, l]
    return s


def heights(config: BombeConfig, state: BombeState) -> np.ndarray:
    q = state.q
    if q.ndim != 2 or q.shape[1] != config.n_channels:
        raise ContractError(f"state shape {q.shape} does not match N={config.n_channels}")
    others = _row_sums(q)[:, None] - q
    return q - others / (config.n_channels - 1)


def select_all(config: BombeConfig, state: BombeState, rng) -> np.ndarray:
    """Every user's argmax of ``X + osc(t, .)``; ties split by one uniform per user."""
    if state._osc is None:
        state._osc = config.osc_table()
    u = rng.random(config.n_users)
    score = heights(config, state) + state._osc[state.t % config.period]
    choice = np.empty(config.n_users, dtype=np.int64)
    for i, row in enumerate(score):
        best = np.flatnonzero(row == row.max())
        choice[i] = best[min(int(u[i] * best.size), best.size - 1)]
    return choice


def delta_matrix(config: BombeConfig, action, rewarded) -> np.ndarray:
    dq = np.zeros((config.n_users, config.n_channels))
    for i, (k, ok) in enumerate(zip(action, rewarded)):
        dq[i, k] = 1.0 if ok else -config.omega
    return dq


def apply_results(config: BombeConfig, state: BombeState, action, rewarded) -> BombeState:
    """Apply one slot of results in place and return the state."""
    action = np.asarray(action)
    rewarded = np.asarray(rewarded, dtype=bool)
    if action.shape != (config.n_users,) or rewarded.shape != (config.n_users,):
        raise ContractError(
            f"expected {config.n_users} actions and results, got {action.shape} and {rewarded.shape}")
    if action.min() < 0 or action.max() >= config.n_channels:
        raise ContractError(f"channel index out of range: {action.tolist()}")
    dq = delta_matrix(config, action, rewarded)
    col = dq[0].copy()
    for j in range(1, config.n_users):
        col += dq[j]
    state.q += dq - (col - dq) / (config.n_users - 1)
    state.t += 1
    return state


def run_slot(config: BombeConfig, state: BombeState, model: ChannelModel, rng
             ) -> tuple[BombeState, np.ndarray, SlotOutcome]:
    if model.n_channels != config.n_channels:
        raise ContractError(f"model has {model.n_channels} channels, Bombe expects {config.n_channels}")
    action = select_all(config, state, rng)
    outcome = env.step(model, action, rng)
    apply_results(config, state, action, outcome.rewarded)
    return state, action, outcome
