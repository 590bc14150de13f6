"""Backend selection for whole-trajectory simulation.

The compiled kernel is used when it was built; otherwise the pure-Python
backend runs.  Both map the same uniform block to the same rewards.
"""
from __future__ import annotations

import logging

from . import _pykernels

log = logging.getLogger(__name__)

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None
    log.debug("compiled kernels unavailable, using the Python backend")

HAVE_COMPILED = _ckernels is not None
BACKENDS = ("auto", "compiled", "python")


def get_simulator(backend: str = "auto"):
    if backend not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")
    if backend == "python" or (backend == "auto" and not HAVE_COMPILED):
        return _pykernels.simulate_rewards
    if not HAVE_COMPILED:
        raise RuntimeError("compiled kernels requested but the extension is not built")
    return _ckernels.simulate_rewards


def active_backend(backend: str = "auto") -> str:
    return "compiled" if get_simulator(backend) is not _pykernels.simulate_rewards else "python"
