"""scikit-learn style front end for switch lowering.

    >>> from caseclust import CaseClusterer
    >>> est = CaseClusterer(density="1/2", max_entries=10).fit([0, 1, 2, 100, 101, 102])
    >>> est.n_clusters_
    2
    >>> est.predict([1, 50, 101]).tolist()
    [0, -1, 1]
"""

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .core import (
    CaseSet,
    ClusterParams,
    cluster_quadratic,
    cluster_stats,
    cluster_windowed,
    validate_partition,
)
from .exceptions import PreconditionError
from .layout import DEFAULT, build_plan, lookup

__all__ = ["CaseClusterer", "check_case_values", "check_selectors"]

ALGORITHMS = {"windowed": cluster_windowed, "quadratic": cluster_quadratic}

_FLOAT_EXACT = 2**53


def _as_int_array(X, what):
    arr = np.asarray(X)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise PreconditionError(f"{what} must be 1-D or a single column, got shape {arr.shape}")
    if arr.dtype == object:
        try:
            return np.array([int(v) for v in arr], dtype=np.int64)
        except (TypeError, ValueError, OverflowError) as exc:
            raise PreconditionError(f"{what} must be integers: {exc}") from exc
    if arr.dtype.kind == "b":
        raise PreconditionError(f"{what} must be integers, got booleans")
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)):
            raise PreconditionError(f"{what} contain NaN or infinity")
        if np.any(arr != np.round(arr)) or np.any(np.abs(arr) > _FLOAT_EXACT):
            raise PreconditionError(f"{what} must be integral and exactly representable")
        return arr.astype(np.int64)
    if arr.dtype.kind == "u":
        if arr.size and arr.max() > np.iinfo(np.int64).max:
            raise PreconditionError(f"{what} do not fit in signed 64 bits")
        return arr.astype(np.int64)
    if arr.dtype.kind != "i":
        raise PreconditionError(f"{what} must be integers, got dtype {arr.dtype}")
    return arr.astype(np.int64, copy=False)


def check_case_values(X):
    """Validate raw case values: 1-D (or one column) integers, non-empty.

    Returns ``(cases, inverse)`` where ``cases`` is the sorted,
    deduplicated :class:`CaseSet` and ``inverse[k]`` is the position of
    ``X[k]`` in it.
    """
    arr = _as_int_array(X, "case values")
    if arr.size == 0:
        raise PreconditionError("at least one case value is required")
    uniq, inverse = np.unique(arr, return_inverse=True)
    return CaseSet(uniq), inverse.reshape(-1)


def check_selectors(X):
    return _as_int_array(X, "selectors")


class CaseClusterer(ClusterMixin, BaseEstimator):
    """Partition switch case values into jump tables and singletons.

    Parameters
    ----------
    density : str, Fraction or float, default "2/5"
        Minimum fraction of occupied slots in a jump table.
    max_entries : int, default 64
        Largest jump table allowed, in entries.
    strict_density : bool, default False
        Require density strictly above ``density``.
    paper_literal_range : bool, default False
        Bound ``max - min`` of a table by ``max_entries`` instead of its
        entry count ``max - min + 1``.
    algorithm : {"windowed", "quadratic"}, default "windowed"
    entry_width : {2, 4, 8}, default 4
        Bytes per table entry, used for size accounting only.

    Attributes
    ----------
    cases_ : CaseSet
    duplicates_dropped_ : int
    partition_ : Partition
    n_clusters_ : int
    labels_ : ndarray
        Cluster index of every sample passed to ``fit``.
    stats_ : list of ClusterStats
    plan_ : LoweringPlan
    """

    def __init__(
        self,
        density="2/5",
        max_entries=64,
        strict_density=False,
        paper_literal_range=False,
        algorithm="windowed",
        entry_width=4,
    ):
        self.density = density
        self.max_entries = max_entries
        self.strict_density = strict_density
        self.paper_literal_range = paper_literal_range
        self.algorithm = algorithm
        self.entry_width = entry_width

    def _params(self):
        return ClusterParams(
            self.density,
            self.max_entries,
            self.strict_density,
            self.paper_literal_range,
        )

    def fit(self, X, y=None):
        if self.algorithm not in ALGORITHMS:
            raise PreconditionError(
                f"algorithm must be one of {sorted(ALGORITHMS)}, got {self.algorithm!r}"
            )
        params = self._params()
        cases, inverse = check_case_values(X)
        part = ALGORITHMS[self.algorithm](cases, params)
        self.params_ = params
        self.cases_ = cases
        self.duplicates_dropped_ = int(inverse.size - cases.n)
        self.partition_ = part
        self.n_clusters_ = part.cluster_count
        self.labels_ = part.labels(cases.n)[inverse]
        self.stats_ = cluster_stats(cases, part)
        self.plan_ = build_plan(cases, part, self.entry_width)
        return self

    def predict(self, X):
        """Cluster index handling each selector, or -1 when it hits default."""
        check_is_fitted(self, "plan_")
        sel = check_selectors(X)
        labels = self.dispatch(sel)
        clusters = self.partition_.labels(self.cases_.n)
        return np.where(labels == DEFAULT, DEFAULT, clusters[np.maximum(labels, 0)])

    def dispatch(self, X):
        """Case label each selector reaches through the lowered plan."""
        check_is_fitted(self, "plan_")
        sel = check_selectors(X)
        return np.array([lookup(self.plan_, s).label for s in sel.tolist()], dtype=np.int64)

    def transform(self, X):
        """Per-selector dispatch cost: ``[comparisons, used_table]`` columns."""
        check_is_fitted(self, "plan_")
        sel = check_selectors(X)
        out = np.empty((sel.size, 2), dtype=np.int64)
        for k, s in enumerate(sel.tolist()):
            res = lookup(self.plan_, s)
            out[k, 0] = res.comparisons
            out[k, 1] = res.indirect
        return out

    def violations(self):
        check_is_fitted(self, "partition_")
        return validate_partition(self.cases_, self.params_, self.partition_)
