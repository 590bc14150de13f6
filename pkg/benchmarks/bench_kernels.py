"""Compiled vs pure-Python trajectory backends on the reference setup.

    python benchmarks/bench_kernels.py [--samples 20] [--horizon 1000]

Both backends see the same uniforms; the script also checks they return
identical rewards.
"""
import argparse
import dataclasses
import time

import numpy as np

from towbombe import kernels
from towbombe.harness import ExperimentConfig, simulate_sample
from towbombe.policies import Policy


def _time(cfg, backend, samples):
    t0 = time.perf_counter()
    out = [simulate_sample(cfg, s, backend) for s in range(samples)]
    return time.perf_counter() - t0, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--samples", type=int, default=20)
    parser.add_argument("--horizon", type=int, default=1000)
    args = parser.parse_args()
    if not kernels.HAVE_COMPILED:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")

    base = ExperimentConfig(horizon=args.horizon)
    print(f"{args.samples} samples x {args.horizon} slots, M=3, N=5")
    print(f"{'policy':<22}{'python s':>10}{'compiled s':>12}{'speedup':>9}  identical")
    for policy in Policy:
        cfg = dataclasses.replace(base, policy=policy)
        t_py, ref = _time(cfg, "python", args.samples)
        t_c, got = _time(cfg, "compiled", args.samples)
        same = all(np.array_equal(a, b) for a, b in zip(ref, got))
        print(f"{policy.name:<22}{t_py:>10.3f}{t_c:>12.4f}{t_py / t_c:>8.0f}x  {same}")

    cfg = dataclasses.replace(base, samples=1000)
    t0 = time.perf_counter()
    for s in range(cfg.samples):
        simulate_sample(cfg, s, "compiled")
    print(f"full reference run (1000 x 1000, Bombe, compiled): {time.perf_counter() - t0:.2f} s")


if __name__ == "__main__":
    main()
