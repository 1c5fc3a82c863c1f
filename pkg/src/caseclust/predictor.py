"""Replay selector traces through a lowering plan under toy predictors.

Every jump table is one indirect branch.  Its predictor remembers the
``k`` most recently used distinct targets of that branch and predicts
correctly exactly when the actual target is among them (``last_target``
is the ``k = 1`` case).  Dispatch-tree comparisons are conditional
branches, either perfectly predicted or driven by a private 2-bit
saturating counter that starts weakly not-taken.

These are models of "a predictor can only track so many destinations",
not of any particular core.
"""

from collections import OrderedDict
from dataclasses import dataclass, field

from .core import CaseSet, ClusterParams, cluster_windowed
from .exceptions import PreconditionError, SpecError
from .layout import build_plan, lookup

__all__ = [
    "PredictorModel",
    "Penalties",
    "BranchStats",
    "SimReport",
    "LRUTargetPredictor",
    "Bimodal2Bit",
    "simulate",
    "compare_plans",
    "parse_model",
]

KINDS = ("last_target", "capacity_k")
COND_MODELS = ("always_correct", "bimodal_2bit")


@dataclass(frozen=True)
class PredictorModel:
    kind: str = "capacity_k"
    k: int = 64
    cond_model: str = "bimodal_2bit"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"predictor kind must be one of {KINDS}, got {self.kind!r}")
        if self.cond_model not in COND_MODELS:
            raise SpecError(f"cond_model must be one of {COND_MODELS}, got {self.cond_model!r}")
        if self.kind == "last_target":
            object.__setattr__(self, "k", 1)
        if int(self.k) < 1:
            raise SpecError(f"k must be >= 1, got {self.k}")
        object.__setattr__(self, "k", int(self.k))

    def describe(self):
        base = "last_target" if self.kind == "last_target" else f"capacity_k:{self.k}"
        return f"{base}+{self.cond_model}"


def parse_model(text, cond_model="bimodal_2bit"):
    """``"capacity_k:64"``, ``"last_target"`` or a bare integer ``k``."""
    text = text.strip()
    if text == "last_target":
        return PredictorModel("last_target", 1, cond_model)
    if text.startswith("capacity_k:"):
        text = text.split(":", 1)[1]
    try:
        k = int(text)
    except ValueError:
        raise SpecError(f"unknown predictor model {text!r}") from None
    return PredictorModel("capacity_k", k, cond_model)


@dataclass(frozen=True)
class Penalties:
    indirect_miss: float = 20.0
    cond_miss: float = 15.0
    compare: float = 1.0


class LRUTargetPredictor:
    def __init__(self, k):
        self.k = k
        self.recent = OrderedDict()

    def predict_and_update(self, target):
        """Return True if ``target`` was predicted, then record it."""
        hit = target in self.recent
        if hit:
            self.recent.move_to_end(target)
        else:
            self.recent[target] = None
            if len(self.recent) > self.k:
                self.recent.popitem(last=False)
        return hit


class Bimodal2Bit:
    # 0,1 predict not-taken; 2,3 predict taken.
    def __init__(self, state=1):
        self.state = state

    def predict_and_update(self, taken):
        hit = (self.state >= 2) == taken
        if taken:
            self.state = min(self.state + 1, 3)
        else:
            self.state = max(self.state - 1, 0)
        return hit


@dataclass
class BranchStats:
    executions: int = 0
    mispredicts: int = 0

    @property
    def rate(self):
        return self.mispredicts / self.executions if self.executions else 0.0


@dataclass
class SimReport:
    model: PredictorModel
    penalties: Penalties
    dispatches: int = 0
    comparisons: int = 0
    table_dispatches: int = 0
    indirect: dict = field(default_factory=dict)
    conditional: dict = field(default_factory=dict)

    @property
    def indirect_executions(self):
        return sum(s.executions for s in self.indirect.values())

    @property
    def indirect_mispredicts(self):
        return sum(s.mispredicts for s in self.indirect.values())

    @property
    def conditional_executions(self):
        return sum(s.executions for s in self.conditional.values())

    @property
    def conditional_mispredicts(self):
        return sum(s.mispredicts for s in self.conditional.values())

    @property
    def indirect_mispredict_rate(self):
        ex = self.indirect_executions
        return self.indirect_mispredicts / ex if ex else 0.0

    @property
    def conditional_mispredict_rate(self):
        ex = self.conditional_executions
        return self.conditional_mispredicts / ex if ex else 0.0

    @property
    def mean_comparisons(self):
        return self.comparisons / self.dispatches if self.dispatches else 0.0

    @property
    def weighted_cost(self):
        p = self.penalties
        return (
            p.indirect_miss * self.indirect_mispredicts
            + p.cond_miss * self.conditional_mispredicts
            + p.compare * self.comparisons
        )

    @property
    def cost_per_dispatch(self):
        return self.weighted_cost / self.dispatches if self.dispatches else 0.0

    def to_dict(self):
        def branches(d):
            return {
                str(key): {"executions": s.executions, "mispredicts": s.mispredicts}
                for key, s in sorted(d.items(), key=lambda kv: _branch_order(kv[0]))
            }

        return {
            "schema": "caseclust.report/1",
            "model": {
                "kind": self.model.kind,
                "k": self.model.k,
                "cond_model": self.model.cond_model,
            },
            "penalties": {
                "indirect_miss": self.penalties.indirect_miss,
                "cond_miss": self.penalties.cond_miss,
                "compare": self.penalties.compare,
            },
            "indirect": branches(self.indirect),
            "conditional": branches(self.conditional),
            "aggregates": {
                "dispatches": self.dispatches,
                "table_dispatches": self.table_dispatches,
                "indirect_executions": self.indirect_executions,
                "indirect_mispredicts": self.indirect_mispredicts,
                "indirect_mispredict_rate": self.indirect_mispredict_rate,
                "conditional_executions": self.conditional_executions,
                "conditional_mispredicts": self.conditional_mispredicts,
                "conditional_mispredict_rate": self.conditional_mispredict_rate,
                "mean_comparisons": self.mean_comparisons,
                "weighted_cost": self.weighted_cost,
                "cost_per_dispatch": self.cost_per_dispatch,
            },
        }


def _branch_order(key):
    if isinstance(key, int):
        return ("", key)
    head = key.rstrip("0123456789")
    return (head, int(key[len(head):] or 0))


def simulate(plan, trace, model=None, penalties=None):
    """Replay ``trace`` through ``plan`` and count mispredictions.

    Indirect branches are keyed by table index, conditional branches by
    ``"node<i>"`` (tree comparison) or ``"leaf<i>"`` (bounds or equality
    check at a leaf).
    """
    model = model or PredictorModel()
    penalties = penalties or Penalties()
    selectors = getattr(trace, "selectors", trace)
    if len(selectors) == 0:
        raise PreconditionError("cannot simulate an empty trace")
    report = SimReport(model, penalties)
    targets = {}
    counters = {}
    perfect = model.cond_model == "always_correct"
    # Selectors repeat heavily; memoize the routing.
    routes = {}
    for s in selectors:
        res = routes.get(s)
        if res is None:
            res = routes[s] = lookup(plan, s)
        report.dispatches += 1
        report.comparisons += res.comparisons
        for key, taken in res.branches:
            stats = report.conditional.get(key)
            if stats is None:
                stats = report.conditional[key] = BranchStats()
                counters[key] = Bimodal2Bit()
            stats.executions += 1
            if not perfect and not counters[key].predict_and_update(taken):
                stats.mispredicts += 1
        if res.table is not None:
            report.table_dispatches += 1
            stats = report.indirect.get(res.table)
            if stats is None:
                stats = report.indirect[res.table] = BranchStats()
                targets[res.table] = LRUTargetPredictor(model.k)
            stats.executions += 1
            if not targets[res.table].predict_and_update(res.label):
                stats.mispredicts += 1
    return report


def compare_plans(cases, traces, params_list, model=None, penalties=None, entry_width=4):
    """One row per params setting: plan shape plus simulated branch cost.

    With several traces the counts are summed over all of them before
    rates are formed.
    """
    cases = CaseSet(cases)
    model = model or PredictorModel()
    penalties = penalties or Penalties()
    if hasattr(traces, "selectors"):
        traces = [traces]
    rows = []
    for params in params_list:
        if not isinstance(params, ClusterParams):
            raise PreconditionError(f"expected ClusterParams, got {params!r}")
        part = cluster_windowed(cases, params)
        plan = build_plan(cases, part, entry_width)
        reports = [simulate(plan, t, model, penalties) for t in traces]
        ind_ex = sum(r.indirect_executions for r in reports)
        ind_miss = sum(r.indirect_mispredicts for r in reports)
        cond_ex = sum(r.conditional_executions for r in reports)
        cond_miss = sum(r.conditional_mispredicts for r in reports)
        dispatches = sum(r.dispatches for r in reports)
        cost = sum(r.weighted_cost for r in reports)
        rows.append({
            "density": str(params.density_min),
            "max_entries": params.max_entries,
            "cluster_count": part.cluster_count,
            "table_count": plan.table_count,
            "table_bytes": plan.table_bytes,
            "tree_depth": plan.depth,
            "indirect_mispredicts": ind_miss,
            "indirect_mispredict_rate": ind_miss / ind_ex if ind_ex else 0.0,
            "conditional_mispredicts": cond_miss,
            "conditional_mispredict_rate": cond_miss / cond_ex if cond_ex else 0.0,
            "mean_comparisons": (
                sum(r.comparisons for r in reports) / dispatches if dispatches else 0.0
            ),
            "weighted_cost": cost,
            "cost_per_dispatch": cost / dispatches if dispatches else 0.0,
        })
    return rows


COMPARE_COLUMNS = (
    "density",
    "max_entries",
    "cluster_count",
    "table_count",
    "table_bytes",
    "tree_depth",
    "indirect_mispredicts",
    "indirect_mispredict_rate",
    "conditional_mispredicts",
    "conditional_mispredict_rate",
    "mean_comparisons",
    "weighted_cost",
    "cost_per_dispatch",
)
