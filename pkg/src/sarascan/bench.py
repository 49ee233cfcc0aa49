"""Wall-clock scaling of the screen-and-rank stage.

Times the full detection front end (window contrast profile, maximizer
sweep, score ordering) on synthetic noise, per kernel backend.  Each
measurement loops the stage until it exceeds a minimum duration, so
sub-millisecond runs still time reliably; the reported number is the
median per-pass time over several such measurements.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels


@dataclass(frozen=True)
class BenchResult:
    n: int
    backend: str
    median_seconds: float
    loops: int


def _screen_rank(module, y: np.ndarray, h: int) -> np.ndarray:
    profile = module.equal_weight_profile(y, h)
    absd = np.abs(profile)
    kept = module.local_max_keep(absd, h)
    order = np.argsort(-absd[kept], kind="stable")
    return kept[order]


def _resolve_backends(impl: str) -> dict[str, object]:
    available = _kernels.available_backends()
    if impl == "both":
        return dict(available)
    if impl == "auto":
        return {_kernels.backend_name(): available[_kernels.backend_name()]}
    if impl not in available:
        raise ValueError(f"backend {impl!r} not available; built: {sorted(available)}")
    return {impl: available[impl]}


def run_bench(
    n_grid: Sequence[int],
    reps: int = 5,
    h: int | None = None,
    impl: str = "auto",
    seed: int = 0,
    min_time: float = 0.05,
) -> list[BenchResult]:
    """Median screen+rank seconds per n, for one or both backends.

    ``h`` defaults to round(log n) per grid point (the smallest default
    detection bandwidth).  Data generation happens outside the timed region.
    """
    n_grid = [int(n) for n in n_grid]
    if any(b < a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be nondecreasing")
    backends = _resolve_backends(impl)
    rng = np.random.default_rng(seed)
    results = []
    for n in n_grid:
        bandwidth = h if h is not None else max(2, int(round(math.log(n))))
        y = rng.standard_normal(n)
        for name, module in backends.items():
            _screen_rank(module, y, bandwidth)  # warm up
            loops = 1
            times = []
            while True:  # autorange once, then reuse the loop count
                start = time.perf_counter()
                for _ in range(loops):
                    _screen_rank(module, y, bandwidth)
                elapsed = time.perf_counter() - start
                if elapsed >= min_time or loops >= 1 << 20:
                    times.append(elapsed / loops)
                    break
                loops *= 2
            for _ in range(reps - 1):
                start = time.perf_counter()
                for _ in range(loops):
                    _screen_rank(module, y, bandwidth)
                times.append((time.perf_counter() - start) / loops)
            results.append(BenchResult(n, name, float(np.median(times)), loops))
    return results
