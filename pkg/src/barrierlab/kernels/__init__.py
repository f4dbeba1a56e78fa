"""Kernel backend selection.

The JIT (numba) backend is used when importable; set BARRIERLAB_BACKEND=numpy
to force the pure-numpy fallback, or BARRIERLAB_BACKEND=numba to make a
missing numba an error.  Both backends expose the same three kernels with
identical semantics; `benchmarks/bench_backends.py` compares their speed.
"""
from __future__ import annotations

import os

from . import codes, numpy_backend
from .codes import (
    CODE_CALL,
    CODE_FORWARD_MART,
    CODE_FORWARD_STATIC,
    CODE_NET_DELTA,
    CODE_PUT,
    CODE_SYNTH_CALL,
    CODE_SYNTH_PUT,
    TARGET_CALL,
    TARGET_CONST,
    TARGET_FORWARD,
    TARGET_PUT,
)

_requested = os.environ.get("BARRIERLAB_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"BARRIERLAB_BACKEND must be 'numba', 'numpy' or 'auto', got {_requested!r}"
    )

if _requested == "numpy":
    _active = numpy_backend
    BACKEND_NAME = "numpy"
else:
    try:
        from . import numba_backend as _active

        BACKEND_NAME = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        _active = numpy_backend
        BACKEND_NAME = "numpy"

terminal_values = _active.terminal_values
simulate_paths = _active.simulate_paths
hedge_stats = _active.hedge_stats


def active_backend() -> str:
    return BACKEND_NAME


def set_workers(n_workers: int) -> int:
    """Request a worker count for the JIT backend; returns the count granted.

    Per-path results are independent of the worker count by construction;
    this only affects throughput.  The numpy backend is single-threaded.
    """
    if BACKEND_NAME != "numba":
        return 1
    import numba

    granted = max(1, min(int(n_workers), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(granted)
    return granted
