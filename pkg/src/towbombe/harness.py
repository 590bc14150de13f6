"""Monte Carlo experiment runner, score metrics and CSV output.

Sample ``s`` of a run draws its uniforms from
``SeedSequence(seed, spawn_key=(s,))``, the same child stream that
``SeedSequence(seed).spawn(...)[s]`` yields.  Each sample is therefore fixed by
``(seed, s)`` alone, and running samples in parallel or in any order cannot
change the output.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import logging
import os
from collections.abc import Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import oracle
from .env import ChannelModel, CollisionMode
from .kernels import get_simulator
from .policies import Policy, block_width

log = logging.getLogger(__name__)

REFERENCE_PROBS = (0.03, 0.05, 0.1, 0.2, 0.9)
# Calibrated once over A in [0, 5] on the reference setup (seeds 20140401, 1, 2; 1000 x 1000)
# see README "Calibration".  Frozen here and in configs/reference.json.
DEFAULT_AMPLITUDE = 3.0
DEFAULT_RADIUS = 150.0
FLOAT_FORMAT = "{:.6g}"


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    probs: tuple[float, ...] = REFERENCE_PROBS
    n_users: int = 3
    policy: Policy = Policy.BOMBE
    omega: float = 0.08
    amplitude: float = DEFAULT_AMPLITUDE
    period: int | None = None
    horizon: int = 1000
    samples: int = 1000
    seed: int = 20140401
    collision_mode: CollisionMode = CollisionMode.COIN_LOTTERY
    epsilon: float = 0.1
    tau: float = 0.1
    per_step: bool = False
    radius: float = DEFAULT_RADIUS
    output_dir: str = "out"

    def __post_init__(self):
        self.probs = tuple(float(p) for p in self.probs)
        self.policy = Policy.parse(self.policy)
        self.collision_mode = CollisionMode.parse(self.collision_mode)

    @property
    def n_channels(self) -> int:
        return len(self.probs)

    @property
    def osc_period(self) -> int:
        return self.period or self.n_channels

    def validate(self) -> "ExperimentConfig":
        if len(self.probs) < 2:
            raise ConfigError("need at least 2 channels")
        if any(not 0 <= p <= 1 for p in self.probs):
            raise ConfigError(f"probabilities must lie in [0, 1]: {self.probs}")
        if self.horizon < 1 or self.samples < 1:
            raise ConfigError("horizon and samples must be at least 1")
        min_users = 2 if self.policy is Policy.BOMBE else 1
        if self.n_users < min_users:
            raise ConfigError(f"{self.policy.name} needs at least {min_users} users")
        if self.omega < 0 or self.amplitude < 0:
            raise ConfigError("omega and amplitude must be nonnegative")
        if self.osc_period < 2:
            raise ConfigError("oscillation period must be at least 2")
        if not 0 <= self.epsilon <= 1:
            raise ConfigError("epsilon must lie in [0, 1]")
        if self.tau <= 0:
            raise ConfigError("softmax temperature must be positive")
        if self.radius <= 0:
            raise ConfigError("cluster radius must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        return self

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["probs"] = list(self.probs)
        out["policy"] = self.policy.name
        out["collision_mode"] = self.collision_mode.name
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        # keys with a leading underscore are annotations, e.g. "_calibration"
        data = {k: v for k, v in data.items() if not k.startswith("_")}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    try:
        with open(path) as fh:
            return ExperimentConfig.from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


@dataclass
class ScoreRecord:
    sample_id: int
    scores: np.ndarray
    cumulative: np.ndarray | None = field(default=None, repr=False)

    @property
    def total(self) -> float:
        return float(self.scores.sum())


@dataclass
class RunSummary:
    samples: int
    mean_per_user: np.ndarray
    mean_total: float
    cluster_counts: dict = field(default_factory=dict)
    ne_count: int = 0
    unclassified_count: int = 0

    @property
    def sm_count(self) -> int:
        return sum(self.cluster_counts.values())


def sample_stream(seed: int, sample: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(sample,)))


def sample_uniforms(config: ExperimentConfig, sample: int) -> np.ndarray:
    width = block_width(config.policy, config.n_users, config.n_channels)
    return sample_stream(config.seed, sample).random((config.horizon, width))


def simulate_sample(config: ExperimentConfig, sample: int, backend: str = "auto") -> np.ndarray:
    """Per-slot rewards of one sample, shape ``(n_users, horizon)``."""
    simulate = get_simulator(backend)
    return simulate(int(config.policy), np.asarray(config.probs, dtype=np.float64), config.n_users,
                    sample_uniforms(config, sample), int(config.collision_mode), config.omega,
                    config.amplitude, config.osc_period, config.epsilon, config.tau)


def _run_chunk(config: ExperimentConfig, sample_ids: Sequence[int], backend: str) -> list[ScoreRecord]:
    records = []
    for s in sample_ids:
        cumulative = np.cumsum(simulate_sample(config, s, backend), axis=1)
        records.append(ScoreRecord(s, cumulative[:, -1].copy(), cumulative if config.per_step else None))
    return records


def run_experiment(config: ExperimentConfig, workers: int = 1, backend: str = "auto") -> list[ScoreRecord]:
    config.validate()
    get_simulator(backend)
    ids = list(range(config.samples))
    if workers <= 1 or config.samples == 1:
        return _run_chunk(config, ids, backend)
    n_chunks = min(config.samples, workers * 4)
    chunks = [ids[i::n_chunks] for i in range(n_chunks)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_run_chunk, [config] * n_chunks, chunks, [backend] * n_chunks)
        records = [r for part in parts for r in part]
    records.sort(key=lambda r: r.sample_id)
    return records


def anchor_points(config: ExperimentConfig) -> tuple[dict, dict]:
    """Score vectors (expected payoff x horizon) of every SM and pure NE joint action."""
    tensor = oracle.build_tensor(ChannelModel(config.probs, config.collision_mode), config.n_users)
    sm, _ = oracle.social_maxima(tensor)
    ne = oracle.nash_equilibria(tensor)
    scale = config.horizon
    return ({a: tensor[a] * scale for a in sorted(sm)},
            {a: tensor[a] * scale for a in sorted(ne)})


def _as_mapping(points) -> dict:
    if isinstance(points, Mapping):
        return {k: np.asarray(v, dtype=float) for k, v in points.items()}
    points = np.atleast_2d(np.asarray(points, dtype=float)) if len(points) else []
    return {i: p for i, p in enumerate(points)}


def classify_samples(records: Sequence[ScoreRecord], sm_points, ne_points=(), radius: float = DEFAULT_RADIUS
                     ) -> tuple[dict, int, int]:
    """Nearest-anchor classification in L1 distance.

    Returns ``(cluster_counts, ne_count, unclassified_count)``; a sample within
    ``radius`` of both an SM and an NE anchor goes to the closer one.
    """
    sm = _as_mapping(sm_points)
    ne = _as_mapping(ne_points)
    if not sm:
        raise ConfigError("classification needs at least one social-maximum point")
    if radius <= 0:
        raise ConfigError("radius must be positive")
    counts = {k: 0 for k in sm}
    ne_count = unclassified = 0
    for rec in records:
        scores = np.asarray(rec.scores, dtype=float)
        d_sm, key = min((float(np.abs(scores - p).sum()), k) for k, p in sm.items())
        d_ne = min((float(np.abs(scores - p).sum()) for p in ne.values()), default=np.inf)
        if d_sm <= radius and d_sm <= d_ne:
            counts[key] += 1
        elif d_ne <= radius:
            ne_count += 1
        else:
            unclassified += 1
    return counts, ne_count, unclassified


def summarize(records: Sequence[ScoreRecord], sm_points=None, ne_points=(), radius: float = DEFAULT_RADIUS
              ) -> RunSummary:
    if not records:
        raise ValueError("cannot summarize an empty run")
    scores = np.stack([r.scores for r in records])
    summary = RunSummary(samples=len(records), mean_per_user=scores.mean(axis=0),
                         mean_total=float(scores.sum(axis=1).mean()))
    if sm_points is None:
        summary.unclassified_count = len(records)
    else:
        summary.cluster_counts, summary.ne_count, summary.unclassified_count = classify_samples(
            records, sm_points, ne_points, radius)
    return summary


def action_label(action) -> str:
    return "".join(oracle.channel_label(k) for k in action) if isinstance(action, tuple) else str(action)


def _fmt(x) -> str:
    return FLOAT_FORMAT.format(float(x))


def _write_rows(path: Path, header: Sequence[str], rows) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise OSError(f"failed writing {path}: {exc}") from exc


def timeseries(records: Sequence[ScoreRecord]) -> np.ndarray:
    """Sample means of cumulative scores, shape ``(horizon, n_users + 1)``; last column is the total."""
    if any(r.cumulative is None for r in records):
        raise ValueError("records carry no per-step data (run with per_step=True)")
    cum = np.stack([r.cumulative for r in records])  # (samples, M, horizon)
    per_user = cum.mean(axis=0).T
    total = cum.sum(axis=1).mean(axis=0)
    return np.column_stack([per_user, total])


def emit_csv(records: Sequence[ScoreRecord], summary: RunSummary, config: ExperimentConfig,
             output_dir: str | os.PathLike | None = None) -> dict[str, Path]:
    out = Path(output_dir if output_dir is not None else config.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    m = config.n_users
    users = [f"user_{i}" for i in range(m)]
    paths = {"scores": out / "scores.csv", "summary": out / "summary.csv", "config": out / "config.json"}

    _write_rows(paths["scores"], ["sample_id", *users],
                ([r.sample_id, *map(_fmt, r.scores)] for r in records))

    rows = [[f"mean_{u}", _fmt(v)] for u, v in zip(users, summary.mean_per_user)]
    rows += [["mean_total", _fmt(summary.mean_total)], ["samples", summary.samples],
             ["sm_count", summary.sm_count], ["ne_count", summary.ne_count],
             ["unclassified_count", summary.unclassified_count]]
    rows += [[f"cluster_{action_label(k)}", v] for k, v in summary.cluster_counts.items()]
    _write_rows(paths["summary"], ["metric", "value"], rows)

    if config.per_step:
        paths["timeseries"] = out / "timeseries.csv"
        series = timeseries(records)
        _write_rows(paths["timeseries"], ["t", *[f"mean_{u}" for u in users], "mean_total"],
                    ([t + 1, *map(_fmt, row)] for t, row in enumerate(series)))

    try:
        paths["config"].write_text(json.dumps(config.to_dict(), indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing {paths['config']}: {exc}") from exc
    return paths


def sweep_omega(config: ExperimentConfig, grid: Sequence[float], workers: int = 1, backend: str = "auto"
                ) -> list[tuple[float, float]]:
    results = []
    for omega in grid:
        cfg = dataclasses.replace(config, omega=float(omega))
        summary = summarize(run_experiment(cfg, workers, backend))
        log.info("omega=%.4f mean_total=%.2f", omega, summary.mean_total)
        results.append((float(omega), summary.mean_total))
    return results
