"""Command line entry point: ``towbombe {simulate,oracle,sweep-omega,baseline}``.

Flags mirror :class:`~towbombe.harness.ExperimentConfig`; ``--config FILE``
loads a JSON config first and explicit flags override it.  Set
``TOWBOMBE_LOG_LEVEL`` (e.g. ``DEBUG``) for more output.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import harness, oracle
from .env import ChannelModel
from .harness import ConfigError, ExperimentConfig
from .kernels import BACKENDS, active_backend
from .policies import Policy
from .tow import omega0_multi

log = logging.getLogger("towbombe")

# flag dest -> ExperimentConfig field
_FIELDS = {
    "probs": "probs", "users": "n_users", "policy": "policy", "omega": "omega",
    "amplitude": "amplitude", "period": "period", "horizon": "horizon", "samples": "samples",
    "seed": "seed", "collision": "collision_mode", "epsilon": "epsilon", "tau": "tau",
    "per_step": "per_step", "radius": "radius", "output_dir": "output_dir",
}


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _grid(text: str) -> list[float]:
    """``start:stop:step`` (stop inclusive) or a comma list."""
    if ":" not in text:
        return list(_floats(text))
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    n = int(round((stop - start) / step))
    return [round(start + i * step, 12) for i in range(n + 1)]


def _experiment_flags(p: argparse.ArgumentParser, policy_choices=None) -> None:
    p.add_argument("--config", type=Path, help="JSON config file; flags override its values")
    p.add_argument("--probs", type=_floats, help="channel probabilities, comma-separated")
    p.add_argument("--users", type=int, help="number of users M")
    p.add_argument("--policy", choices=policy_choices or [x.name for x in Policy], type=str.upper)
    p.add_argument("--omega", type=float)
    p.add_argument("--amplitude", type=float, help="oscillation amplitude A")
    p.add_argument("--period", type=int, help="oscillation period (default: number of channels)")
    p.add_argument("--horizon", type=int, help="plays per sample")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--collision", choices=["COIN_LOTTERY", "FRACTIONAL_SPLIT"], type=str.upper)
    p.add_argument("--epsilon", type=float, help="epsilon-greedy exploration rate")
    p.add_argument("--tau", type=float, help="softmax temperature")
    p.add_argument("--per-step", dest="per_step", action="store_const", const=True,
                   help="log cumulative means for every step (timeseries.csv)")
    p.add_argument("--radius", type=float, help="L1 cluster radius for classification")
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
    p.add_argument("--backend", choices=BACKENDS, default="auto")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="towbombe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    _experiment_flags(sub.add_parser("simulate", help="run a Monte Carlo experiment and write CSVs"))
    _experiment_flags(sub.add_parser("baseline", help="run an independent (uncoupled) team"),
                      policy_choices=[x.name for x in Policy if x is not Policy.BOMBE])
    sweep = sub.add_parser("sweep-omega", help="mean total score over a grid of omega values")
    _experiment_flags(sweep)
    sweep.add_argument("--grid", type=_grid, default=_grid("0.0:0.2:0.02"),
                       help="start:stop:step (inclusive) or comma list")

    orc = sub.add_parser("oracle", help="brute-force social maxima and Nash equilibria")
    orc.add_argument("--probs", type=_floats, default=harness.REFERENCE_PROBS)
    orc.add_argument("--users", type=int, default=3)
    orc.add_argument("--csv", type=Path, help="also write the full payoff tensor here")
    return parser


def config_from_args(args: argparse.Namespace, **overrides) -> ExperimentConfig:
    base = harness.load_config(args.config) if getattr(args, "config", None) else ExperimentConfig()
    values = {field: getattr(args, flag) for flag, field in _FIELDS.items()
              if getattr(args, flag, None) is not None}
    values.update(overrides)
    return dataclasses.replace(base, **values).validate()


def _print_summary(summary: harness.RunSummary, config: ExperimentConfig) -> None:
    users = " ".join(f"{v:.2f}" for v in summary.mean_per_user)
    print(f"policy={config.policy.name} M={config.n_users} omega={config.omega} A={config.amplitude} "
          f"horizon={config.horizon} samples={config.samples} seed={config.seed}")
    print(f"mean per user: {users}")
    print(f"mean total:    {summary.mean_total:.2f}")
    print(f"SM clusters:   {summary.sm_count}/{summary.samples}  "
          + " ".join(f"{harness.action_label(k)}={v}" for k, v in summary.cluster_counts.items()))
    print(f"NE:            {summary.ne_count}/{summary.samples}   unclassified: {summary.unclassified_count}")


def _anchors(config: ExperimentConfig):
    try:
        return harness.anchor_points(config)
    except oracle.ResourceError as exc:
        log.warning("skipping classification: %s", exc)
        return None, ()


def cmd_simulate(args, **overrides) -> int:
    config = config_from_args(args, **overrides)
    t0 = time.perf_counter()
    records = harness.run_experiment(config, workers=args.workers, backend=args.backend)
    log.info("%d samples in %.2fs (%s backend)", config.samples, time.perf_counter() - t0,
             active_backend(args.backend))
    sm, ne = _anchors(config)
    summary = harness.summarize(records, sm, ne, config.radius)
    paths = harness.emit_csv(records, summary, config)
    _print_summary(summary, config)
    print("wrote " + ", ".join(str(p) for p in paths.values()))
    return 0


def cmd_baseline(args) -> int:
    if args.policy is None and not args.config:
        args.policy = Policy.INDEPENDENT_UCB1T.name
    config = config_from_args(args)
    if config.policy is Policy.BOMBE:
        raise ConfigError("baseline runs need an independent policy")
    return cmd_simulate(args)


def cmd_sweep(args) -> int:
    config = config_from_args(args)
    rows = harness.sweep_omega(config, args.grid, workers=args.workers, backend=args.backend)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "sweep_omega.csv"
    harness._write_rows(path, ["omega", "mean_total"],
                        ([harness._fmt(w), harness._fmt(v)] for w, v in rows))
    try:
        print(f"omega0 for these probabilities: {omega0_multi(config.probs, config.n_users):.4f}")
    except ValueError:
        pass
    for w, v in rows:
        print(f"{w:8.4f}  {v:10.2f}")
    print(f"wrote {path}")
    return 0


def cmd_oracle(args) -> int:
    model = ChannelModel(args.probs)
    tensor = oracle.build_tensor(model, args.users)
    sm, value = oracle.social_maxima(tensor)
    ne = oracle.nash_equilibria(tensor)
    label = harness.action_label

    def fmt(a):
        return f"({','.join(oracle.channel_label(k) for k in a)}) -> " + \
            ", ".join(f"{x:.6g}" for x in tensor[a])

    print(f"probs={','.join(f'{p:g}' for p in args.probs)} users={args.users} entries={len(tensor)}")
    print(f"social maxima ({len(sm)}), total {value:.6g}:")
    for a in sorted(sm):
        print("  " + fmt(a))
    print(f"pure Nash equilibria ({len(ne)}):")
    for a in sorted(ne):
        print("  " + fmt(a))
    if args.csv:
        users = [f"user_{i}" for i in range(args.users)]
        harness._write_rows(args.csv, ["action", *users, "total"],
                            ([label(a), *map(harness._fmt, tensor[a]), harness._fmt(tensor[a].sum())]
                             for a in tensor.actions()))
        print(f"wrote {args.csv}")
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("TOWBOMBE_LOG_LEVEL", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    handlers = {"simulate": cmd_simulate, "baseline": cmd_baseline,
                "sweep-omega": cmd_sweep, "oracle": cmd_oracle}
    try:
        return handlers[args.command](args)
    except (ConfigError, ValueError, oracle.ResourceError) as exc:
        print(f"towbombe {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"towbombe {args.command}: I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
