"""Minimum-cluster partitioning of sorted switch case values.

Three exact solvers live here and are expected to agree on the cluster
count for every input:

``cluster_windowed``
    Backward dynamic program whose inner scan only looks ``max_entries``
    positions ahead.  Because case values are distinct integers,
    ``cases[j] - cases[i] >= j - i``, so no cluster that passes the size
    test can end outside that window; the scan is O(n * max_entries).
``cluster_quadratic``
    The same recurrence with the window removed, O(n**2).  Kept as a
    validation baseline.
``cluster_oracle``
    Brute force over every contiguous partition.  Shares no code with the
    other two, including the density predicate.

A cluster ``[lo, hi]`` with ``hi > lo`` becomes a jump table and must be
dense enough and small enough.  One-element clusters lower to a compare
and branch and are always allowed.
"""

from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational

import numpy as np

from .exceptions import PreconditionError, SizeLimitError, ValidationError

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

__all__ = [
    "CaseSet",
    "ClusterParams",
    "Partition",
    "ClusterStats",
    "Violation",
    "OracleResult",
    "density",
    "cluster_windowed",
    "cluster_quadratic",
    "cluster_oracle",
    "validate_partition",
    "structural_violations",
    "cluster_stats",
    "QUADRATIC_LIMIT",
    "ORACLE_LIMIT",
]

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

QUADRATIC_LIMIT = 50_000
ORACLE_LIMIT = 20

# Products formed inside the compiled kernel must stay below this.
_KERNEL_SAFE = 2**62


class CaseSet:
    """Strictly ascending signed 64-bit case values.

    The constructor checks the ordering but never repairs it; use
    :func:`caseclust.ingest.normalize_cases` to sort and deduplicate raw
    input.
    """

    __slots__ = ("_values",)

    def __init__(self, values):
        if isinstance(values, CaseSet):
            self._values = values._values
            return
        arr = _as_int64(values)
        if arr.ndim != 1:
            raise PreconditionError("case values must be one-dimensional")
        if arr.size == 0:
            raise PreconditionError("a case set needs at least one value")
        if arr.size > 1 and not np.all(arr[1:] > arr[:-1]):
            raise PreconditionError(
                "case values must be strictly ascending (sorted, no duplicates)"
            )
        arr = arr.copy()
        arr.flags.writeable = False
        self._values = arr

    @property
    def values(self):
        """Read-only ``int64`` array of the values."""
        return self._values

    @property
    def n(self):
        return int(self._values.size)

    def __len__(self):
        return int(self._values.size)

    def __getitem__(self, k):
        return int(self._values[k])

    def __iter__(self):
        return (int(v) for v in self._values)

    def tolist(self):
        return [int(v) for v in self._values]

    def __eq__(self, other):
        if not isinstance(other, CaseSet):
            return NotImplemented
        return np.array_equal(self._values, other._values)

    def __hash__(self):
        return hash(self._values.tobytes())

    def __repr__(self):
        if self.n <= 8:
            return f"CaseSet({self.tolist()})"
        head = ", ".join(str(v) for v in self.tolist()[:4])
        return f"CaseSet([{head}, ...], n={self.n})"


def _as_int64(values):
    if isinstance(values, np.ndarray):
        arr = values
    else:
        values = list(values)
        for v in values:
            if isinstance(v, bool) or not isinstance(v, (Integral, np.integer)):
                raise PreconditionError(f"case value {v!r} is not an integer")
            if not INT64_MIN <= int(v) <= INT64_MAX:
                raise PreconditionError(f"case value {v} does not fit in 64 bits")
        arr = np.array([int(v) for v in values], dtype=np.int64)
    if arr.dtype.kind == "u":
        if arr.size and arr.max() > INT64_MAX:
            raise PreconditionError("case values do not fit in signed 64 bits")
        arr = arr.astype(np.int64)
    elif arr.dtype.kind != "i":
        raise PreconditionError(f"case values must be integers, got dtype {arr.dtype}")
    return arr.astype(np.int64, copy=False)


@dataclass(frozen=True)
class ClusterParams:
    """Density and size limits a jump-table cluster has to respect.

    ``density_min`` accepts anything :class:`fractions.Fraction` does,
    including strings such as ``"2/5"``; floats are converted exactly, so
    prefer strings or fractions for threshold values.

    ``strict_density`` requires ``density > density_min`` instead of
    ``>=``.  ``paper_literal_range`` bounds ``cases[hi] - cases[lo]`` by
    ``max_entries`` instead of the real entry count
    ``cases[hi] - cases[lo] + 1``.
    """

    density_min: Fraction = Fraction(2, 5)
    max_entries: int = 64
    strict_density: bool = False
    paper_literal_range: bool = False

    def __post_init__(self):
        d = self.density_min
        if isinstance(d, float) or isinstance(d, str) or isinstance(d, Rational):
            try:
                d = Fraction(d)
            except (ValueError, ZeroDivisionError) as exc:
                raise PreconditionError(f"bad density {self.density_min!r}") from exc
        else:
            raise PreconditionError(f"bad density {self.density_min!r}")
        if not 0 < d <= 1:
            raise PreconditionError(f"density must satisfy 0 < D <= 1, got {d}")
        object.__setattr__(self, "density_min", d)
        m = self.max_entries
        if isinstance(m, bool) or not isinstance(m, (Integral, np.integer)) or m < 1:
            raise PreconditionError(f"max_entries must be a positive integer, got {m!r}")
        object.__setattr__(self, "max_entries", int(m))
        object.__setattr__(self, "strict_density", bool(self.strict_density))
        object.__setattr__(self, "paper_literal_range", bool(self.paper_literal_range))

    def admits(self, count, span):
        """True if a table holding ``count`` cases over ``span`` slots is legal."""
        if count == 1:
            return True
        size = span - 1 if self.paper_literal_range else span
        if size > self.max_entries:
            return False
        lhs = span * self.density_min.numerator
        rhs = count * self.density_min.denominator
        return lhs < rhs if self.strict_density else lhs <= rhs


@dataclass(frozen=True)
class Partition:
    """Ordered closed index ranges ``(lo, hi)`` into a :class:`CaseSet`."""

    ranges: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "ranges", tuple((int(lo), int(hi)) for lo, hi in self.ranges)
        )

    @classmethod
    def _trusted(cls, ranges):
        # ranges is already a tuple of (int, int) pairs.
        self = cls.__new__(cls)
        object.__setattr__(self, "ranges", ranges)
        return self

    @property
    def cluster_count(self):
        return len(self.ranges)

    def __len__(self):
        return len(self.ranges)

    def __iter__(self):
        return iter(self.ranges)

    def labels(self, n):
        """Cluster index of every case, as an int array of length ``n``."""
        out = np.empty(n, dtype=np.int64)
        for k, (lo, hi) in enumerate(self.ranges):
            out[lo : hi + 1] = k
        return out


@dataclass(frozen=True)
class ClusterStats:
    lo: int
    hi: int
    count: int
    span: int
    density: Fraction

    @property
    def kind(self):
        return "singleton" if self.count == 1 else "table"

    def to_dict(self):
        return {
            "lo": self.lo,
            "hi": self.hi,
            "count": self.count,
            "span": self.span,
            "density": str(self.density),
            "kind": self.kind,
        }


@dataclass(frozen=True)
class Violation:
    kind: str  # bounds | coverage | overlap | density | size
    range_index: int
    message: str


@dataclass(frozen=True)
class OracleResult:
    count: int
    partition: Partition


def _span(cases, i, j):
    return cases[j] - cases[i] + 1


def density(cases, i, j):
    """Fraction of occupied slots in a jump table over ``cases[i..j]``."""
    cases = CaseSet(cases)
    n = cases.n
    if not (isinstance(i, (Integral, np.integer)) and isinstance(j, (Integral, np.integer))):
        raise PreconditionError("indices must be integers")
    if not 0 <= i <= j < n:
        raise PreconditionError(f"need 0 <= i <= j < {n}, got i={i}, j={j}")
    return Fraction(j - i + 1, _span(cases, i, j))


def _min_clusters(offsets, window, max_entries, d_num, d_den, strict, literal, best, last):
    # Fills best[i] (fewest clusters covering i..n-1) and last[i] (end of
    # the first cluster).  offsets must be ascending and non-negative.
    n = len(offsets)
    best[n - 1] = 1
    last[n - 1] = n - 1
    for i in range(n - 2, -1, -1):
        best[i] = 1 + best[i + 1]
        last[i] = i
        top = i + window
        if top > n - 1:
            top = n - 1
        # Downward scan: on ties the widest cluster wins.
        for j in range(top, i, -1):
            length = offsets[j] - offsets[i]
            if literal:
                if length > max_entries:
                    continue
            elif length + 1 > max_entries:
                continue
            count = j - i + 1
            span = length + 1
            if strict:
                dense = span * d_num < count * d_den
            else:
                dense = span * d_num <= count * d_den
            if not dense:
                continue
            if j == n - 1:
                parts = 1
            else:
                parts = 1 + best[j + 1]
            # A table that only ties the singleton start still replaces it.
            if parts < best[i] or (parts == best[i] and last[i] == i):
                best[i] = parts
                last[i] = j


def _walk_ranges(last, ends):
    # Follows last[] from 0; writes each cluster end into ends and returns
    # the cluster count.  Runs while i <= n - 1 so a trailing singleton
    # is kept.
    n = len(last)
    count = 0
    i = 0
    while i <= n - 1:
        ends[count] = last[i]
        count += 1
        i = last[i] + 1
    return count


if numba is not None:
    _min_clusters_jit = numba.njit(cache=True, nogil=True)(_min_clusters)
    _walk_ranges_jit = numba.njit(cache=True, nogil=True)(_walk_ranges)
else:  # pragma: no cover
    _min_clusters_jit = None
    _walk_ranges_jit = None


def _solve(cases, params, window):
    n = cases.n
    if n == 1:
        return Partition(((0, 0),))
    vals = cases.values
    total = int(vals[-1]) - int(vals[0])
    # Entries beyond the full span never change a decision.
    max_entries = min(params.max_entries, total + 2)
    d_num = params.density_min.numerator
    d_den = params.density_min.denominator
    window = min(window, n)
    fast = (
        _min_clusters_jit is not None
        and total < _KERNEL_SAFE
        and (max_entries + 2) * max(d_num, d_den) < _KERNEL_SAFE
    )
    if fast:
        # No wraparound: the true differences are below 2**62.
        offsets = vals - vals[0]
        best = np.empty(n, dtype=np.int64)
        last = np.empty(n, dtype=np.int64)
        _min_clusters_jit(
            offsets, window, max_entries, d_num, d_den,
            params.strict_density, params.paper_literal_range, best, last,
        )
        ends = np.empty(n, dtype=np.int64)
        count = _walk_ranges_jit(last, ends)
        ends = ends[:count].tolist()
        starts = [0] + [e + 1 for e in ends[:-1]]
        return Partition._trusted(tuple(zip(starts, ends)))
    else:
        base = int(vals[0])
        offsets = [int(v) - base for v in vals]
        best = [0] * n
        last = [0] * n
        _min_clusters(
            offsets, window, max_entries, d_num, d_den,
            params.strict_density, params.paper_literal_range, best, last,
        )
    return _read_ranges(last, n)


def _read_ranges(last, n):
    ranges = []
    i = 0
    while i <= n - 1:
        j = last[i]
        ranges.append((i, j))
        i = j + 1
    return Partition(tuple(ranges))


def cluster_windowed(cases, params):
    """Fewest clusters, scanning at most ``max_entries`` cases ahead.

    Ties between equally short partitions go to the widest first cluster,
    so the result is deterministic.
    """
    cases = CaseSet(cases)
    return _solve(cases, params, params.max_entries)


def cluster_quadratic(cases, params, limit=QUADRATIC_LIMIT):
    """Unwindowed O(n**2) version of :func:`cluster_windowed`."""
    cases = CaseSet(cases)
    if cases.n > limit:
        raise SizeLimitError(
            f"quadratic clustering refused: n={cases.n} exceeds limit {limit}"
        )
    return _solve(cases, params, cases.n)


def _oracle_feasible(cases, params, lo, hi):
    count = hi - lo + 1
    span = cases[hi] - cases[lo] + 1
    entries = span - 1 if params.paper_literal_range else span
    if entries > params.max_entries:
        return False
    d = Fraction(count, span)
    if params.strict_density:
        return params.density_min < d
    return params.density_min <= d


def cluster_oracle(cases, params, limit=ORACLE_LIMIT):
    """Exhaustive minimum over all ``2**(n-1)`` contiguous partitions.

    Bit ``k`` of a mask means "cut between case k and case k+1".  Every
    mask is checked against every infeasible multi-element cluster at
    once, so the cost is O(n**2 * 2**n) vectorized operations.
    """
    cases = CaseSet(cases)
    n = cases.n
    if n > limit:
        raise SizeLimitError(f"oracle refused: n={n} exceeds limit {limit}")
    if n == 1:
        return OracleResult(1, Partition(((0, 0),)))
    masks = np.arange(1 << (n - 1), dtype=np.int64)
    bad = np.zeros(masks.shape, dtype=bool)
    for lo in range(n - 1):
        for hi in range(lo + 1, n):
            if _oracle_feasible(cases, params, lo, hi):
                continue
            inner = ((1 << (hi - lo)) - 1) << lo
            hit = (masks & inner) == 0
            if lo > 0:
                hit &= ((masks >> (lo - 1)) & 1) == 1
            if hi < n - 1:
                hit &= ((masks >> hi) & 1) == 1
            bad |= hit
    good = masks[~bad]
    # The all-cuts mask is always good, so good is never empty.
    cuts = np.zeros(good.shape, dtype=np.int64)
    for k in range(n - 1):
        cuts += (good >> k) & 1
    best = int(cuts.min())
    mask = int(good[np.argmax(cuts == best)])
    ranges = []
    lo = 0
    for k in range(n - 1):
        if (mask >> k) & 1:
            ranges.append((lo, k))
            lo = k + 1
    ranges.append((lo, n - 1))
    return OracleResult(best + 1, Partition(tuple(ranges)))


def structural_violations(n, p):
    out = []
    expect = 0
    for idx, (lo, hi) in enumerate(p.ranges):
        if lo > hi or lo < 0 or hi >= n:
            out.append(Violation("bounds", idx, f"range ({lo}, {hi}) is not within [0, {n - 1}]"))
            continue
        if lo > expect:
            out.append(Violation(
                "coverage", idx, f"elements {expect}..{lo - 1} are not covered"
            ))
        elif lo < expect:
            out.append(Violation(
                "overlap", idx, f"range ({lo}, {hi}) overlaps or precedes earlier ranges"
            ))
        expect = max(expect, hi + 1)
    if expect <= n - 1:
        out.append(Violation(
            "coverage", len(p.ranges), f"elements {expect}..{n - 1} are not covered"
        ))
    return out


def validate_partition(cases, params, p):
    """Every way ``p`` fails to be a legal partition of ``cases``.

    An empty list means the partition is valid.
    """
    cases = CaseSet(cases)
    n = cases.n
    out = structural_violations(n, p)
    for idx, (lo, hi) in enumerate(p.ranges):
        if not 0 <= lo < hi < n:
            continue
        count = hi - lo + 1
        span = _span(cases, lo, hi)
        size = span - 1 if params.paper_literal_range else span
        if size > params.max_entries:
            out.append(Violation(
                "size", idx, f"range ({lo}, {hi}) needs {size} entries > max {params.max_entries}"
            ))
        lhs = span * params.density_min.numerator
        rhs = count * params.density_min.denominator
        if not (lhs < rhs if params.strict_density else lhs <= rhs):
            op = ">" if params.strict_density else ">="
            out.append(Violation(
                "density", idx,
                f"range ({lo}, {hi}) density {Fraction(count, span)} is not {op} {params.density_min}",
            ))
    return out


def cluster_stats(cases, p):
    cases = CaseSet(cases)
    problems = structural_violations(cases.n, p)
    if problems:
        raise ValidationError("; ".join(v.message for v in problems))
    out = []
    for lo, hi in p.ranges:
        count = hi - lo + 1
        span = _span(cases, lo, hi)
        out.append(ClusterStats(lo, hi, count, span, Fraction(count, span)))
    return out
