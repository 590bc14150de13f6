"""Single-user Tug-of-War dynamics over two machines, A (0) and B (1).

Each machine keeps a play count ``N_k`` and a failure count ``L_k``; the
estimate is ``Q_k = N_k - (1 + omega) * L_k``, so a rewarded play adds 1 and a
failed play subtracts ``omega``.  The liquid leans towards A when
``X_A = Q_A - Q_B + delta`` is positive.

The module also carries the algebra behind the nearly optimal weight
``omega0 = gamma / (2 - gamma)``: with that weight the TOW difference
``Q_A - Q_B`` coincides with the difference of the rescaled two-sided
estimates ``Q''_A - Q''_B``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Sequence

A, B = 0, 1


def _other(k: int) -> int:
    if k not in (A, B):
        raise ValueError(f"machine must be 0 (A) or 1 (B), got {k!r}")
    return 1 - k


@dataclass(frozen=True)
class TowState:
    plays: tuple[int, int] = (0, 0)
    failures: tuple[int, int] = (0, 0)
    omega: float = 0.0

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError("omega must be nonnegative")
        for n, l in zip(self.plays, self.failures):
            if not 0 <= l <= n:
                raise ValueError(f"need 0 <= failures <= plays, got L={l}, N={n}")


class FluctuationKind(enum.Enum):
    NONE = "none"
    GAUSSIAN = "gaussian"
    ALTERNATING = "alternating"


@dataclass(frozen=True)
class FluctuationSpec:
    kind: FluctuationKind = FluctuationKind.GAUSSIAN
    scale: float = 1.0  # sigma for GAUSSIAN, amplitude for ALTERNATING

    def __post_init__(self):
        if self.scale < 0:
            raise ValueError("fluctuation scale must be nonnegative")

    def sample(self, rng, t: int) -> float:
        if self.kind is FluctuationKind.NONE:
            return 0.0
        if self.kind is FluctuationKind.GAUSSIAN:
            return float(rng.normal(0.0, self.scale)) if self.scale > 0 else 0.0
        return self.scale if t % 2 == 0 else -self.scale


NO_FLUCTUATION = FluctuationSpec(FluctuationKind.NONE, 0.0)


def q_estimate(state: TowState, k: int) -> float:
    _other(k)
    return state.plays[k] - (1.0 + state.omega) * state.failures[k]


def update(state: TowState, k: int, rewarded: bool) -> TowState:
    _other(k)
    plays = list(state.plays)
    failures = list(state.failures)
    plays[k] += 1
    if not rewarded:
        failures[k] += 1
    return replace(state, plays=tuple(plays), failures=tuple(failures))


def displacement(state: TowState, delta: float = 0.0, k: int = A) -> float:
    """``X_k``; ``X_B = -X_A`` when there is no fluctuation."""
    x_a = q_estimate(state, A) - q_estimate(state, B) + delta
    return x_a if k == A else -x_a


def select(state: TowState, fluct: FluctuationSpec, rng, t: int = 0) -> int:
    """Pick A when the displacement is positive, B when negative.

    Exact ties go to a fair coin from ``rng``.  One uniform is consumed every
    call so the stream layout does not depend on the state.
    """
    delta = fluct.sample(rng, t)
    coin = float(rng.random())
    x = displacement(state, delta)
    if x > 0:
        return A
    if x < 0:
        return B
    return A if coin < 0.5 else B


def omega0(gamma: float) -> float:
    if not 0 <= gamma < 2:
        raise ValueError(f"omega0 needs 0 <= gamma < 2, got {gamma}")
    return gamma / (2.0 - gamma)


def omega0_multi(probs: Sequence[float], n_users: int) -> float:
    """Weight for ``n_users`` players: gamma' is the sum of the M-th and (M+1)-th best probabilities."""
    ranked = sorted((float(p) for p in probs), reverse=True)
    if n_users < 1 or len(ranked) < n_users + 1:
        raise ValueError(f"need at least M+1={n_users + 1} channels, got {len(ranked)}")
    if any(not 0 <= p <= 1 for p in ranked):
        raise ValueError("probabilities must lie in [0, 1]")
    return omega0(ranked[n_users - 1] + ranked[n_users])


@dataclass(frozen=True)
class Counts:
    """Raw (N_A, L_A, N_B, L_B) counts for the two-sided estimate algebra."""
    plays: tuple[int, int] = field(default=(0, 0))
    failures: tuple[int, int] = field(default=(0, 0))


def q_prime(counts: Counts | TowState, gamma: float, k: int) -> float:
    """Expected reward of machine ``k`` when ``gamma = P_A + P_B`` is known."""
    j = _other(k)
    n, l = counts.plays, counts.failures
    return n[k] - l[k] + (gamma - 1.0) * n[j] + l[j]


def q_double_prime(counts: Counts | TowState, gamma: float, k: int) -> float:
    if gamma >= 2:
        raise ValueError(f"q_double_prime needs gamma < 2, got {gamma}")
    return q_prime(counts, gamma, k) / (2.0 - gamma)
