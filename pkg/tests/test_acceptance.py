"""Exit criteria for the package, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line (shown even without
``-s``) and then asserts.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from caseclust.bench import bench_input, time_pair
from caseclust.core import (
    ClusterParams,
    cluster_oracle,
    cluster_quadratic,
    cluster_windowed,
    validate_partition,
)
from caseclust.ingest import GeneratorSpec, generate_cases, generate_trace
from caseclust.layout import build_plan, lookup, naive_lookup
from caseclust.predictor import PredictorModel, simulate

DENSITIES = [Fraction(1, 10), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]
MAXES = [1, 2, 4, 8, 25]
# (strict_density, paper_literal_range)
MODES = {
    "corrected": (False, False),
    "paper-literal": (True, True),
    "strict-only": (True, False),
    "literal-range-only": (False, True),
}


@pytest.fixture
def report(capsys):
    def _report(name, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        return ok

    return _report


def random_small_sets(count, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, 13))
        out.append(sorted(rng.choice(25, size=n, replace=False).tolist()))
    return out


def test_oracle_equivalence(report):
    sets = random_small_sets(500, seed=2024)
    t0 = time.perf_counter()
    trials = mismatches = invalid = 0
    for values in sets:
        for d in DENSITIES:
            for m in MAXES:
                for strict, literal in MODES.values():
                    params = ClusterParams(d, m, strict, literal)
                    part = cluster_windowed(values, params)
                    trials += 1
                    if part.cluster_count != cluster_oracle(values, params).count:
                        mismatches += 1
                    if validate_partition(values, params, part):
                        invalid += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and invalid == 0 and elapsed < 60
    report(
        "oracle equivalence",
        ok,
        f"{len(sets)} sets x {len(DENSITIES) * len(MAXES)} params x {len(MODES)} modes = "
        f"{trials} trials, {mismatches} count mismatches, {invalid} invalid, {elapsed:.1f}s (< 60s)",
    )
    assert ok


def test_baseline_equivalence(report):
    rng = np.random.default_rng(77)
    trials = mismatches = invalid = 0
    for k in range(200):
        n = int(rng.integers(1, 2001))
        width = int(rng.choice([n, 2 * n, 10 * n, 1000 * n]))
        values = np.sort(rng.choice(width, size=n, replace=False))
        params = ClusterParams(
            DENSITIES[k % len(DENSITIES)],
            int(rng.choice([1, 2, 8, 64, 300, 2**32])),
            bool(k % 3 == 0),
            bool(k % 4 == 0),
        )
        w = cluster_windowed(values, params)
        q = cluster_quadratic(values, params)
        trials += 1
        mismatches += w.cluster_count != q.cluster_count
        invalid += bool(validate_partition(values, params, w)) + bool(validate_partition(values, params, q))
    ok = mismatches == 0 and invalid == 0
    report("baseline equivalence", ok,
           f"{trials} sets with n <= 2000, {mismatches} count mismatches, {invalid} invalid partitions")
    assert ok


def test_validity_and_trailing_singleton(report):
    checked = problems = 0
    for values in random_small_sets(200, seed=5):
        for d in DENSITIES:
            for m in MAXES:
                for strict, literal in MODES.values():
                    params = ClusterParams(d, m, strict, literal)
                    for fn in (cluster_windowed, cluster_quadratic):
                        part = fn(values, params)
                        checked += 1
                        cover = [i for lo, hi in part.ranges for i in range(lo, hi + 1)]
                        if validate_partition(values, params, part) or cover != list(range(len(values))):
                            problems += 1
    # Optimal partition ends with a lone last element.
    trailing = [0, 1, 2, 3, 50]
    params = ClusterParams("1/2", 8)
    part = cluster_windowed(trailing, params)
    trailing_ok = part.ranges == ((0, 3), (4, 4)) and not validate_partition(trailing, params, part)
    ok = problems == 0 and trailing_ok
    report("validity suite", ok,
           f"{checked} partitions checked, {problems} invalid; trailing-singleton case -> {part.ranges}")
    assert ok


@pytest.mark.slow
def test_complexity(report):
    params = ClusterParams("2/5", 64)
    t0 = time.perf_counter()
    small, large = bench_input(10**5, seed=1), bench_input(10**6, seed=1)
    w_small, w_large = time_pair("windowed", small, large, params, repeats=7)
    q_small_in, q_large_in = bench_input(10**4, seed=1), bench_input(2 * 10**4, seed=1)
    q_small, q_large = time_pair("quadratic", q_small_in, q_large_in, params, repeats=7)
    elapsed = time.perf_counter() - t0
    w_ratio = w_large / w_small
    q_ratio = q_large / q_small
    ok = w_ratio <= 15 and q_ratio >= 3 and elapsed < 120
    report(
        "complexity",
        ok,
        f"windowed 1e5 {w_small * 1e3:.1f}ms -> 1e6 {w_large * 1e3:.1f}ms ratio {w_ratio:.2f} (<= 15); "
        f"quadratic 1e4 {q_small * 1e3:.1f}ms -> 2e4 {q_large * 1e3:.1f}ms ratio {q_ratio:.2f} (>= 3); "
        f"total {elapsed:.1f}s (< 120s)",
    )
    assert ok


def test_lookup_equivalence(report):
    rng = np.random.default_rng(31)
    plans = selectors = disagreements = 0
    for _ in range(120):
        n = int(rng.integers(1, 60))
        base = int(rng.integers(-1000, 1000))
        values = sorted((base + rng.choice(int(rng.integers(n, 8 * n + 1)), size=n, replace=False)).tolist())
        params = ClusterParams(DENSITIES[int(rng.integers(0, 5))], int(rng.choice([1, 4, 16, 64, 10**6])))
        plan = build_plan(values, cluster_windowed(values, params))
        plans += 1
        for s in range(values[0] - 2, values[-1] + 3):
            selectors += 1
            disagreements += lookup(plan, s).label != naive_lookup(values, s)
    ok = disagreements == 0 and plans >= 100
    report("lookup equivalence", ok,
           f"{plans} plans, {selectors} selectors in [min-2, max+2], {disagreements} disagreements")
    assert ok


def test_predictor_premise(report):
    cases = generate_cases(GeneratorSpec("dense_opcode", 256))
    trace = generate_trace(cases, "uniform", 10**5, seed=0)
    model = PredictorModel("capacity_k", 64)
    bounded = build_plan(cases, cluster_windowed(cases, ClusterParams("2/5", 64)))
    single = build_plan(cases, cluster_windowed(cases, ClusterParams("2/5", 2**62)))
    rb = simulate(bounded, trace, model)
    rs = simulate(single, trace, model)
    ok = (
        bounded.table_count == 4
        and single.table_count == 1
        and rb.indirect_mispredicts == 256
        and rs.indirect_mispredict_rate > 0.5
    )
    report(
        "predictor premise",
        ok,
        f"Max=64: {bounded.table_count} tables, {rb.indirect_mispredicts} indirect misses (cold = 256); "
        f"unbounded: {single.table_count} table, miss rate {rs.indirect_mispredict_rate:.3f} (> 0.5)",
    )
    assert ok
