"""Wall-clock scaling of the clustering algorithms on sorted inputs."""

import gc
import time

from .core import ClusterParams, cluster_quadratic, cluster_windowed
from .ingest import GeneratorSpec, generate_cases

__all__ = ["bench_input", "time_clustering", "time_pair", "bench_scaling"]

ALGORITHMS = {"windowed": cluster_windowed, "quadratic": cluster_quadratic}


def bench_input(n, seed=0):
    """``n`` distinct sorted values spread over ``[0, 3n)``."""
    return generate_cases(GeneratorSpec("sparse_uniform", n, (0, 3 * n - 1), seed=seed))


def time_clustering(algo, cases, params, repeats=3):
    """Best-of-``repeats`` seconds for one clustering call.

    ``cases`` is already a sorted CaseSet, so no sorting is timed.  One
    untimed warm-up call absorbs JIT compilation; the collector is paused
    while timing.
    """
    fn = ALGORITHMS[algo]
    fn(cases.values[: min(cases.n, 16)], params)
    best = float("inf")
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(max(1, repeats)):
            t0 = time.perf_counter()
            fn(cases, params)
            best = min(best, time.perf_counter() - t0)
    finally:
        if was_enabled:
            gc.enable()
    return best


def time_pair(algo, small, large, params, repeats=5):
    """Best-of-``repeats`` seconds for ``small`` and ``large``, interleaved.

    Alternating the two inputs exposes both to the same background load,
    which keeps their ratio stable on a busy machine.
    """
    fn = ALGORITHMS[algo]
    fn(small.values[: min(small.n, 16)], params)
    best = [float("inf"), float("inf")]
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(max(1, repeats)):
            for k, cases in enumerate((small, large)):
                t0 = time.perf_counter()
                fn(cases, params)
                best[k] = min(best[k], time.perf_counter() - t0)
    finally:
        if was_enabled:
            gc.enable()
    return best[0], best[1]


def bench_scaling(sizes, repeats=3, params=None, algos=("windowed", "quadratic"),
                  quadratic_max=20_000, seed=0):
    """Rows of ``(n, algo, seconds)``; quadratic runs only up to ``quadratic_max``."""
    params = params or ClusterParams("2/5", 64)
    rows = []
    for n in sizes:
        cases = bench_input(n, seed)
        for algo in algos:
            if algo == "quadratic" and n > quadratic_max:
                continue
            rows.append((n, algo, time_clustering(algo, cases, params, repeats)))
    return rows
