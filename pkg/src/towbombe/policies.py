from __future__ import annotations

import enum


class Policy(enum.IntEnum):
    BOMBE = 0
    INDEPENDENT_TOW = 1
    INDEPENDENT_EG = 2
    INDEPENDENT_SOFTMAX = 3
    INDEPENDENT_UCB1T = 4

    @classmethod
    def parse(cls, value) -> "Policy":
        if isinstance(value, cls):
            return value
        if isinstance(value, int):
            return cls(value)
        key = str(value).strip().replace("-", "_").upper()
        aliases = {"INDEPENDENTTOW": "INDEPENDENT_TOW", "TOW": "INDEPENDENT_TOW",
                   "INDEPENDENTEG": "INDEPENDENT_EG", "EG": "INDEPENDENT_EG",
                   "INDEPENDENTSOFTMAX": "INDEPENDENT_SOFTMAX", "SOFTMAX": "INDEPENDENT_SOFTMAX",
                   "INDEPENDENTUCB1T": "INDEPENDENT_UCB1T", "UCB1T": "INDEPENDENT_UCB1T"}
        key = aliases.get(key, key)
        try:
            return cls[key]
        except KeyError:
            raise ValueError(f"unknown policy {value!r}") from None

    @property
    def draws_per_user(self) -> int:
        """Uniforms each user's selector consumes per slot."""
        return 2 if self is Policy.INDEPENDENT_EG else 1


def block_width(policy: Policy, n_users: int, n_channels: int) -> int:
    """Uniforms consumed per slot: selectors first, then the channel draw (free + lottery)."""
    return policy.draws_per_user * n_users + 2 * n_channels
