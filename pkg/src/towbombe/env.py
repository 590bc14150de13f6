"""Time-slotted Bernoulli channel environment with collision sharing.

Each slot, channel ``k`` is free with probability ``probs[k]`` (one draw per
channel, shared by every user on it).  Users on a busy channel get nothing.
Users sharing a free channel split the coin, either by lottery (one uniformly
chosen user takes it) or fractionally (each gets ``1/m``).

A *random stream* is anything with a numpy-style ``random(size)`` method.
``step`` always consumes exactly ``2 * N`` uniforms so that trajectories can be
replayed from a pre-drawn block.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class ContractError(ValueError):
    """An argument violates an operation's preconditions."""


class CollisionMode(enum.IntEnum):
    COIN_LOTTERY = 0
    FRACTIONAL_SPLIT = 1

    @classmethod
    def parse(cls, value: "str | int | CollisionMode") -> "CollisionMode":
        if isinstance(value, cls):
            return value
        if isinstance(value, int):
            return cls(value)
        key = str(value).strip().replace("-", "_").upper()
        aliases = {"COINLOTTERY": "COIN_LOTTERY", "LOTTERY": "COIN_LOTTERY",
                   "FRACTIONALSPLIT": "FRACTIONAL_SPLIT", "FRACTIONAL": "FRACTIONAL_SPLIT",
                   "SPLIT": "FRACTIONAL_SPLIT"}
        key = aliases.get(key, key)
        try:
            return cls[key]
        except KeyError:
            raise ValueError(f"unknown collision mode {value!r}") from None


@dataclass(frozen=True)
class ChannelModel:
    probs: tuple[float, ...]
    collision_mode: CollisionMode = CollisionMode.COIN_LOTTERY

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if len(probs) < 2:
            raise ContractError("a channel model needs at least 2 channels")
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ContractError(f"channel probabilities must lie in [0, 1], got {probs}")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "collision_mode", CollisionMode.parse(self.collision_mode))

    @property
    def n_channels(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class SlotOutcome:
    free: np.ndarray      # bool, (N,)
    rewards: np.ndarray   # float, (M,)
    rewarded: np.ndarray  # bool, (M,)


def _check_action(n_channels: int, action: Sequence[int]) -> np.ndarray:
    choices = np.asarray(action)
    if choices.ndim != 1 or choices.size < 1:
        raise ContractError("a joint action needs at least one user")
    if not np.issubdtype(choices.dtype, np.integer):
        raise ContractError(f"channel indices must be integers, got {action!r}")
    if choices.min() < 0 or choices.max() >= n_channels:
        raise ContractError(f"channel index out of range [0, {n_channels}): {list(action)}")
    return choices.astype(np.int64)


def step(model: ChannelModel, action: Sequence[int], rng) -> SlotOutcome:
    """Play one slot of ``action`` (one channel index per user)."""
    choices = _check_action(model.n_channels, action)
    n = model.n_channels
    probs = np.asarray(model.probs)
    free = rng.random(n) < probs
    lottery = rng.random(n)

    rewards = np.zeros(choices.size)
    for k in range(n):
        users = np.flatnonzero(choices == k)
        m = users.size
        if m == 0 or not free[k]:
            continue
        if model.collision_mode is CollisionMode.COIN_LOTTERY:
            rewards[users[min(int(lottery[k] * m), m - 1)]] = 1.0
        else:
            rewards[users] = 1.0 / m
    return SlotOutcome(free=free, rewards=rewards, rewarded=rewards > 0)


def expected_payoff(model: ChannelModel, action: Sequence[int]) -> np.ndarray:
    """Expected per-user reward of a joint action: ``P[c_i] / m_i``."""
    choices = _check_action(model.n_channels, action)
    counts = np.bincount(choices, minlength=model.n_channels)
    probs = np.asarray(model.probs)
    return probs[choices] / counts[choices]
