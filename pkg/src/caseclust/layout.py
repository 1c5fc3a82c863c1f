"""Turn a partition into concrete jump tables plus a dispatch tree.

Case ``k`` of the case set carries label ``k``.  Table slots with no case
hold :data:`DEFAULT`.  Clusters are routed by a balanced binary search on
their lowest value; each leaf is either a bounds-checked jump table or a
single compare against one value.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import CaseSet, structural_violations
from .exceptions import PlanOverflowError, PreconditionError, ValidationError

__all__ = [
    "DEFAULT",
    "MAX_TABLE_SPAN",
    "JumpTable",
    "Leaf",
    "Node",
    "LoweringPlan",
    "LookupResult",
    "build_plan",
    "lookup",
    "naive_lookup",
]

DEFAULT = -1
MAX_TABLE_SPAN = 2**32
ENTRY_WIDTHS = (2, 4, 8)


@dataclass(frozen=True)
class JumpTable:
    base: int
    entries: tuple

    @property
    def size(self):
        return len(self.entries)

    @property
    def occupancy(self):
        return sum(1 for e in self.entries if e != DEFAULT)

    @property
    def top(self):
        return self.base + len(self.entries) - 1

    def target(self, selector):
        return self.entries[selector - self.base]


@dataclass(frozen=True)
class Leaf:
    kind: str  # "table" or "singleton"
    index: int
    lo: int
    hi: int
    leaf_id: int

    @property
    def depth(self):
        return 1


@dataclass(frozen=True)
class Node:
    pivot: int
    left: object
    right: object
    node_id: int
    depth: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "depth", 1 + max(self.left.depth, self.right.depth))


@dataclass(frozen=True)
class LookupResult:
    label: int
    comparisons: int
    table: object  # index of the jump table used, or None
    branches: tuple  # ((branch_key, taken), ...) in execution order

    @property
    def indirect(self):
        return self.table is not None


@dataclass(frozen=True)
class LoweringPlan:
    tables: tuple
    singletons: tuple  # ((value, label), ...)
    tree: object
    entry_width: int = 4

    @property
    def table_bytes(self):
        return sum(t.size for t in self.tables) * self.entry_width

    @property
    def depth(self):
        return self.tree.depth

    @property
    def table_count(self):
        return len(self.tables)

    @property
    def cluster_count(self):
        return len(self.tables) + len(self.singletons)

    def totals(self):
        return {
            "cluster_count": self.cluster_count,
            "table_count": self.table_count,
            "singleton_count": len(self.singletons),
            "table_entries": sum(t.size for t in self.tables),
            "entry_width": self.entry_width,
            "table_bytes": self.table_bytes,
            "max_tree_depth": self.depth,
        }

    def case_map(self):
        """``{value: label}`` for every case reachable through the plan."""
        out = {}
        for t in self.tables:
            for off, label in enumerate(t.entries):
                if label != DEFAULT:
                    out[t.base + off] = label
        for value, label in self.singletons:
            out[value] = label
        return out

    def to_dict(self):
        return {
            "schema": "caseclust.plan/1",
            "tables": [{"base": t.base, "entries": list(t.entries)} for t in self.tables],
            "singletons": [[v, lab] for v, lab in self.singletons],
            "tree": _tree_to_dict(self.tree),
            "totals": self.totals(),
        }

    @classmethod
    def from_dict(cls, data):
        try:
            tables = tuple(
                JumpTable(int(t["base"]), tuple(int(e) for e in t["entries"]))
                for t in data["tables"]
            )
            singletons = tuple((int(v), int(lab)) for v, lab in data["singletons"])
            width = int(data.get("totals", {}).get("entry_width", 4))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed plan: {exc}") from exc
        leaves = [("table", k, t.base, t.top) for k, t in enumerate(tables)]
        leaves += [("singleton", k, v, v) for k, (v, _) in enumerate(singletons)]
        leaves.sort(key=lambda leaf: leaf[2])
        for a, b in zip(leaves, leaves[1:]):
            if a[3] >= b[2]:
                raise ValidationError("plan clusters overlap")
        if not leaves:
            raise ValidationError("plan has no clusters")
        return cls(tables, singletons, _balanced(leaves), width)


def _tree_to_dict(t):
    if isinstance(t, Leaf):
        return {t.kind: t.index}
    return {"pivot": t.pivot, "left": _tree_to_dict(t.left), "right": _tree_to_dict(t.right)}


def _balanced(leaves):
    counter = {"node": 0}

    def build(lo, hi):
        if hi - lo == 1:
            kind, index, vlo, vhi = leaves[lo]
            return Leaf(kind, index, vlo, vhi, lo)
        mid = (lo + hi) // 2
        node_id = counter["node"]
        counter["node"] += 1
        left = build(lo, mid)
        right = build(mid, hi)
        return Node(leaves[mid][2], left, right, node_id)

    return build(0, len(leaves))


def build_plan(cases, p, entry_width=4):
    """Materialize ``p`` over ``cases`` as a :class:`LoweringPlan`."""
    cases = CaseSet(cases)
    if entry_width not in ENTRY_WIDTHS:
        raise PreconditionError(f"entry width must be one of {ENTRY_WIDTHS}, got {entry_width}")
    problems = structural_violations(cases.n, p)
    if problems:
        raise ValidationError("; ".join(v.message for v in problems))
    vals = cases.values
    tables = []
    singletons = []
    leaves = []
    for lo, hi in p.ranges:
        vlo, vhi = int(vals[lo]), int(vals[hi])
        if lo == hi:
            leaves.append(("singleton", len(singletons), vlo, vlo))
            singletons.append((vlo, lo))
            continue
        span = vhi - vlo + 1
        if span > MAX_TABLE_SPAN:
            raise PlanOverflowError(f"cluster ({lo}, {hi}) spans {span} entries > 2**32")
        entries = np.full(span, DEFAULT, dtype=np.int64)
        entries[vals[lo : hi + 1] - vlo] = np.arange(lo, hi + 1)
        leaves.append(("table", len(tables), vlo, vhi))
        tables.append(JumpTable(vlo, tuple(entries.tolist())))
    return LoweringPlan(tuple(tables), tuple(singletons), _balanced(leaves), entry_width)


def lookup(plan, selector):
    """Route ``selector`` through ``plan`` the way lowered code would.

    Each tree node costs one comparison (branch taken means "go right").
    The leaf adds one more: a bounds check for a table, an equality test
    for a singleton (taken means "matched").
    """
    selector = int(selector)
    node = plan.tree
    comparisons = 0
    branches = []
    while isinstance(node, Node):
        comparisons += 1
        go_right = selector >= node.pivot
        branches.append((f"node{node.node_id}", go_right))
        node = node.right if go_right else node.left
    comparisons += 1
    key = f"leaf{node.leaf_id}"
    if node.kind == "table":
        table = plan.tables[node.index]
        hit = table.base <= selector <= table.top
        branches.append((key, hit))
        if hit:
            return LookupResult(table.target(selector), comparisons, node.index, tuple(branches))
        return LookupResult(DEFAULT, comparisons, None, tuple(branches))
    value, label = plan.singletons[node.index]
    hit = selector == value
    branches.append((key, hit))
    return LookupResult(label if hit else DEFAULT, comparisons, None, tuple(branches))


def naive_lookup(cases, selector):
    """Linear scan reference: label of ``selector`` or DEFAULT."""
    for label, value in enumerate(cases):
        if value == selector:
            return label
    return DEFAULT
