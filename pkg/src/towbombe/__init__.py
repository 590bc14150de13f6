"""Tug-of-War dynamics and the TOW Bombe for competitive channel access."""
from .env import ChannelModel, CollisionMode, SlotOutcome, expected_payoff, step
from .harness import ExperimentConfig, RunSummary, ScoreRecord, run_experiment, summarize
from .kernels import HAVE_COMPILED
from .policies import Policy

__all__ = [
    "ChannelModel", "CollisionMode", "SlotOutcome", "expected_payoff", "step",
    "ExperimentConfig", "RunSummary", "ScoreRecord", "run_experiment", "summarize",
    "HAVE_COMPILED", "Policy",
]
__version__ = "0.1.0"
