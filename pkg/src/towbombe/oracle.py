"""Brute-force game analysis over all ``N**M`` joint actions.

This is the exponential enumeration the Bombe sidesteps; it is exact and is
used to locate the social maxima and pure Nash equilibria that the
simulations are judged against.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .env import ChannelModel, expected_payoff

DEFAULT_MAX_ENTRIES = 10_000_000
# a deviation must beat the current payoff by more than this to break an NE
NE_TOLERANCE = 1e-12


class ResourceError(RuntimeError):
    pass


@dataclass(frozen=True)
class PayoffTensor:
    """``payoff[a_1, ..., a_M, i]`` is user ``i``'s expected reward."""
    model: ChannelModel
    n_users: int
    payoff: np.ndarray

    @property
    def n_channels(self) -> int:
        return self.model.n_channels

    def __len__(self) -> int:
        return self.n_channels ** self.n_users

    def __getitem__(self, action) -> np.ndarray:
        return self.payoff[tuple(action)]

    def actions(self):
        return itertools.product(range(self.n_channels), repeat=self.n_users)

    def totals(self) -> np.ndarray:
        return self.payoff.sum(axis=-1)


@dataclass(frozen=True)
class GameSolution:
    social_maxima: frozenset
    sm_value: float
    nash_equilibria: frozenset


def build_tensor(model: ChannelModel, n_users: int, max_entries: int = DEFAULT_MAX_ENTRIES) -> PayoffTensor:
    if n_users < 1:
        raise ValueError("need at least one user")
    n = model.n_channels
    size = n ** n_users
    if size > max_entries:
        raise ResourceError(f"payoff tensor would hold {size} joint actions (cap {max_entries})")
    payoff = np.empty((n,) * n_users + (n_users,))
    for action in itertools.product(range(n), repeat=n_users):
        payoff[action] = expected_payoff(model, action)
    return PayoffTensor(model, n_users, payoff)


def social_maxima(tensor: PayoffTensor, atol: float = 1e-12) -> tuple[frozenset, float]:
    totals = tensor.totals()
    best = float(totals.max())
    hits = np.argwhere(totals >= best - atol)
    return frozenset(tuple(int(c) for c in a) for a in hits), best


def nash_equilibria(tensor: PayoffTensor) -> frozenset:
    stable = np.ones(tensor.payoff.shape[:-1], dtype=bool)
    for i in range(tensor.n_users):
        own = tensor.payoff[..., i]
        best_reply = own.max(axis=i, keepdims=True)
        stable &= own >= best_reply - NE_TOLERANCE
    return frozenset(tuple(int(c) for c in a) for a in np.argwhere(stable))


def solve(model: ChannelModel, n_users: int) -> GameSolution:
    tensor = build_tensor(model, n_users)
    sm, value = social_maxima(tensor)
    return GameSolution(sm, value, nash_equilibria(tensor))


def channel_label(k: int) -> str:
    return chr(ord("A") + k) if k < 26 else str(k)
