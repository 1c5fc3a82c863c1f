import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from caseclust.core import ClusterParams, Partition, cluster_windowed
from caseclust.exceptions import PlanOverflowError, PreconditionError, ValidationError
from caseclust.layout import (
    DEFAULT,
    Leaf,
    LoweringPlan,
    Node,
    build_plan,
    lookup,
    naive_lookup,
)


def inorder(tree):
    if isinstance(tree, Leaf):
        return [tree]
    return inorder(tree.left) + inorder(tree.right)


def test_table_with_hole():
    plan = build_plan([1, 2, 3, 5], Partition([(0, 3)]))
    (t,) = plan.tables
    assert t.base == 1
    assert t.entries == (0, 1, 2, DEFAULT, 3)
    assert t.occupancy == 4
    assert plan.depth == 1


def test_single_singleton():
    plan = build_plan([7], Partition([(0, 0)]))
    assert plan.tables == ()
    assert plan.singletons == ((7, 0),)
    assert plan.depth == 1


def test_dense_256():
    plan = build_plan(list(range(256)), Partition([(0, 255)]))
    (t,) = plan.tables
    assert t.size == 256 and t.occupancy == 256
    assert plan.depth == 1
    assert plan.table_bytes == 1024


def test_lookup_examples():
    plan = build_plan([1, 2, 3, 5], Partition([(0, 3)]))
    r = lookup(plan, 4)
    assert r.label == DEFAULT and r.indirect
    r = lookup(plan, 5)
    assert r.label == 3 and r.indirect and r.table == 0
    r = lookup(plan, -100)
    assert r.label == DEFAULT and not r.indirect


def test_lookup_counts_tree_comparisons():
    values = [0, 1, 2, 100, 101, 102, 500]
    part = Partition([(0, 2), (3, 5), (6, 6)])
    plan = build_plan(values, part)
    # Three leaves: root splits [table0] | [table1, singleton].
    assert plan.depth == 3
    assert lookup(plan, 1).comparisons == 2
    assert lookup(plan, 500).comparisons == 3
    assert [k for k, _ in lookup(plan, 500).branches] == ["node0", "node1", "leaf2"]


def test_entry_width_and_bytes():
    values = [0, 1, 3, 10, 11]
    part = Partition([(0, 2), (3, 4)])
    for w in (2, 4, 8):
        plan = build_plan(values, part, w)
        assert plan.table_bytes == (4 + 2) * w
    with pytest.raises(PreconditionError):
        build_plan(values, part, 3)


def test_invalid_partition_rejected():
    with pytest.raises(ValidationError):
        build_plan([0, 1, 2], Partition([(0, 1)]))


def test_overflowing_table_rejected():
    with pytest.raises(PlanOverflowError):
        build_plan([0, 2**32], Partition([(0, 1)]))


def test_json_shape_and_roundtrip():
    values = [1, 2, 3, 5, 40, 90, 91]
    plan = build_plan(values, Partition([(0, 3), (4, 4), (5, 6)]))
    doc = plan.to_dict()
    assert list(doc) == ["schema", "tables", "singletons", "tree", "totals"]
    assert doc["tables"][0] == {"base": 1, "entries": [0, 1, 2, -1, 3]}
    assert doc["singletons"] == [[40, 4]]
    assert doc["tree"] == {
        "pivot": 40,
        "left": {"table": 0},
        "right": {"pivot": 90, "left": {"singleton": 0}, "right": {"table": 1}},
    }
    back = LoweringPlan.from_dict(json.loads(json.dumps(doc)))
    assert back.to_dict() == doc


def test_from_dict_rejects_overlap():
    doc = {"tables": [{"base": 0, "entries": [0, 1]}], "singletons": [[1, 2]], "totals": {}}
    with pytest.raises(ValidationError):
        LoweringPlan.from_dict(doc)


plan_inputs = st.tuples(
    st.lists(st.integers(-200, 200), min_size=1, max_size=40, unique=True).map(sorted),
    st.sampled_from(["1/10", "1/4", "1/2", "3/4", "1"]),
    st.sampled_from([1, 2, 4, 8, 64, 1000]),
)


@settings(max_examples=150, deadline=None)
@given(plan_inputs)
def test_plan_invariants(inp):
    values, d, m = inp
    part = cluster_windowed(values, ClusterParams(d, m))
    plan = build_plan(values, part)
    leaves = inorder(plan.tree)
    lows = [leaf.lo for leaf in leaves]
    assert lows == sorted(lows)
    assert plan.depth <= math.ceil(math.log2(part.cluster_count)) + 1
    for t in plan.tables:
        assert t.occupancy == sum(e != DEFAULT for e in t.entries)
    assert plan.table_bytes == sum(t.size for t in plan.tables) * plan.entry_width
    cmap = plan.case_map()
    assert cmap == {v: k for k, v in enumerate(values)}
    for s in range(values[0] - 2, values[-1] + 3):
        assert lookup(plan, s).label == naive_lookup(values, s)


def test_plan_nodes_are_balanced():
    values = list(range(0, 700, 7))
    plan = build_plan(values, Partition([(k, k) for k in range(len(values))]))
    assert isinstance(plan.tree, Node)
    assert plan.depth == math.ceil(math.log2(len(values))) + 1
    rng = np.random.default_rng(0)
    for s in rng.integers(-10, 710, size=200).tolist():
        assert lookup(plan, s).label == naive_lookup(values, s)
