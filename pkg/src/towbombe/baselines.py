"""Reference policies: epsilon-greedy, softmax, UCB1-tuned, and independent TOW.

These are the textbook forms, used as comparison scaffolding.  A team of them
plays the channel environment with no coupling between members, which is how
a group of selfish users drifts into the Nash equilibrium.

All selectors consume a fixed number of uniforms per call (``draws``) so a
team trajectory can be replayed from a pre-drawn block.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import env
from .bombe import oscillation_table
from .env import ChannelModel, SlotOutcome


def _pick(candidates: Sequence[int], u: float) -> int:
    return candidates[min(int(u * len(candidates)), len(candidates) - 1)]


def _argmax_ties(values: Sequence[float]) -> list[int]:
    best = max(values)
    return [k for k, v in enumerate(values) if v == best]


class _Policy:
    draws = 1

    def __init__(self, n_arms: int):
        if n_arms < 1:
            raise ValueError("need at least one arm")
        self.n_arms = n_arms
        self.counts = [0] * n_arms
        self.sums = [0.0] * n_arms
        self.sq_sums = [0.0] * n_arms

    def means(self) -> list[float]:
        return [s / n if n else 0.0 for s, n in zip(self.sums, self.counts)]

    def update(self, arm: int, reward: float, rewarded: bool | None = None) -> None:
        self.counts[arm] += 1
        self.sums[arm] += reward
        self.sq_sums[arm] += reward * reward


class EpsilonGreedy(_Policy):
    draws = 2

    def __init__(self, n_arms: int, epsilon: float = 0.1):
        super().__init__(n_arms)
        if not 0 <= epsilon <= 1:
            raise ValueError("epsilon must lie in [0, 1]")
        self.epsilon = epsilon

    def select(self, rng, t: int = 0) -> int:
        explore, u = rng.random(2)
        if explore < self.epsilon:
            return min(int(u * self.n_arms), self.n_arms - 1)
        return _pick(_argmax_ties(self.means()), u)


class Softmax(_Policy):
    def __init__(self, n_arms: int, tau: float = 0.1):
        super().__init__(n_arms)
        if not tau > 0:
            raise ValueError("softmax temperature must be positive")
        self.tau = tau

    def probabilities(self) -> list[float]:
        means = self.means()
        top = max(means)
        weights = [math.exp((m - top) / self.tau) for m in means]
        total = sum(weights)
        return [w / total for w in weights]

    def select(self, rng, t: int = 0) -> int:
        u = float(rng.random())
        means = self.means()
        top = means[0]
        for m in means[1:]:
            if m > top:
                top = m
        weights = [math.exp((m - top) / self.tau) for m in means]
        total = 0.0
        for w in weights:
            total += w
        target = u * total
        acc = 0.0
        for k, w in enumerate(weights):
            acc += w
            if target < acc:
                return k
        return self.n_arms - 1


class UCB1Tuned(_Policy):
    """Pulls each arm once in index order, then maximises the tuned index."""

    def index(self, arm: int) -> float:
        n = self.counts[arm]
        log_t = math.log(sum(self.counts))
        mean = self.sums[arm] / n
        variance = self.sq_sums[arm] / n - mean * mean + math.sqrt(2.0 * log_t / n)
        return mean + math.sqrt(log_t / n * min(0.25, variance))

    def select(self, rng, t: int = 0) -> int:
        u = float(rng.random())
        for k, n in enumerate(self.counts):
            if n == 0:
                return k
        return _pick(_argmax_ties([self.index(k) for k in range(self.n_arms)]), u)


class TowMember:
    """One user's N-channel TOW, i.e. a single Bombe row without the coupling."""
    draws = 1

    def __init__(self, n_arms: int, omega: float = 0.08, amplitude: float = 3.0, period: int | None = None):
        self.n_arms = n_arms
        self.omega = omega
        self.q = np.zeros(n_arms)
        self.period = period or n_arms
        self._osc = oscillation_table(amplitude, self.period, n_arms)

    def heights(self) -> np.ndarray:
        q = self.q
        s = q[0]
        for l in range(1, self.n_arms):
            s += q[l]
        return q - (s - q) / (self.n_arms - 1)

    def select(self, rng, t: int = 0) -> int:
        u = float(rng.random())
        row = self.heights() + self._osc[t % self.period]
        return _pick(np.flatnonzero(row == row.max()), u)

    def update(self, arm: int, reward: float, rewarded: bool | None = None) -> None:
        if rewarded is None:
            rewarded = reward > 0
        self.q[arm] += 1.0 if rewarded else -self.omega


def eg_select(state: EpsilonGreedy, rng) -> int:
    return state.select(rng)


def softmax_select(state: Softmax, rng) -> int:
    return state.select(rng)


def ucb1t_select(state: UCB1Tuned, rng) -> int:
    return state.select(rng)


def policy_update(state: _Policy, arm: int, reward: float) -> None:
    state.update(arm, reward)


eg_update = ucb1t_update = policy_update


def independent_team_slot(team: Sequence, model: ChannelModel, rng, t: int = 0
                          ) -> tuple[np.ndarray, SlotOutcome]:
    """Each member picks from its own state, the channel resolves, each learns alone."""
    action = np.array([member.select(rng, t) for member in team], dtype=np.int64)
    outcome = env.step(model, action, rng)
    for member, arm, reward, ok in zip(team, action, outcome.rewards, outcome.rewarded):
        member.update(int(arm), float(reward), bool(ok))
    return action, outcome
