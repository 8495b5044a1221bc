from __future__ import annotations

import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wgl.diagonalizer import (
    MonotoneTable,
    PhiEntry,
    StageRecord,
    check_invariants,
    dumps,
    extendible,
    extendible_leaves,
    random_table,
    run_stages,
)


def test_empty_table_run():
    cs = run_stages(2, [0, 1, 0, 1, 1], MonotoneTable([]), 5)
    assert check_invariants(cs) == []
    first = [e for e in cs.events if e["step"] == "2a"]
    assert first[0] == {"stage": 1, "strategy": 0, "step": "2a", "query": "", "marker": ""}
    assert cs.states[0] == 1 and cs.markers[0] == ""
    assert all(rec.states[0] == 1 for rec in cs.history[1:])
    assert len(extendible_leaves(cs.tree, 5)) == 2
    # the only branching node is rho_0, the root
    assert extendible(cs.tree, 5, "0") and extendible(cs.tree, 5, "1")


def test_table_semantics():
    t = MonotoneTable([((0,), "0"), ((0, 1), "01"), ((1,), "1")])
    assert t.value((0,), 1, 0) == ""
    assert t.value((0,), 1, 1) == "0"
    assert t.value((0,), 1, 2) == "01"   # key 01 is a prefix of 0 1 1 1 ...
    assert t.value((), 0, 3) == "0"     # 0 0 0 ... matches key 0
    assert t.value((), 1, 3) == "1"
    assert t.violations() == []


def test_inconsistent_table_rejected():
    t = MonotoneTable([((0,), "01"), ((0, 1), "00")])
    assert t.violations()
    with pytest.raises(ValueError):
        run_stages(2, [0, 1], t, 2)
    with pytest.raises(ValueError):
        MonotoneTable.from_json([{"input": "0", "tail": None, "output": "1"},
                                 {"input": "01", "tail": None, "output": "0"}])


def test_table_file_format():
    t = MonotoneTable.from_json([{"input": "01", "tail": 1, "output": "0"},
                                 {"input": "", "output": ""}])
    assert t.entries[0] == PhiEntry((0, 1, 1), "0")
    assert MonotoneTable.from_json(t.to_json()).entries == t.entries
    with pytest.raises(ValueError):
        MonotoneTable.from_json({"input": "0"})
    with pytest.raises(ValueError):
        MonotoneTable.from_json([{"input": "0", "output": "2"}])


def test_bad_arguments():
    with pytest.raises(ValueError):
        run_stages(2, [0, 1], MonotoneTable(), 3)
    with pytest.raises(ValueError):
        run_stages(2, [0, 2], MonotoneTable(), 2)


def test_injected_leaf_is_reported():
    cs = run_stages(2, [0, 1, 1, 0, 1, 1], MonotoneTable(), 6)
    last = cs.history[-1]
    extra = {"111111", "11111", "1111", "111", "11", "1"} | {"011111", "01111", "0111", "011"}
    cs.history[-1] = StageRecord(last.stage, last.tree | extra, last.states, last.markers)
    problems = check_invariants(cs)
    assert any("(I)" in p for p in problems)


def test_injected_unmarked_branch_is_reported():
    cs = run_stages(3, [0] * 6, MonotoneTable(), 6)
    last = cs.history[-1]
    leaf = extendible_leaves(last.tree, 6)[0]
    sib = leaf[:-1] + ("1" if leaf[-1] == "0" else "0")
    cs.history[-1] = StageRecord(last.stage, last.tree | {sib}, last.states, last.markers)
    assert any("branching" in p for p in check_invariants(cs))


def test_diagonalization_fires():
    """A table that follows the tree's left branch drives strategy 0 to state 2."""
    phi = MonotoneTable([((), ""), ((0,), "0"), ((0, 0), "00")])
    cs = run_stages(1, [0] * 8, phi, 8)
    steps = [e["step"] for e in cs.events]
    assert steps[:2] == ["2a", "3a"]
    assert cs.states[0] == 2 and cs.markers[0] == "1"
    assert check_invariants(cs) == []
    # Phi's answer 0... is no longer extendible
    assert not extendible(cs.tree, 8, "0")


def test_partial_sort_change_initialises():
    phi = MonotoneTable([((1,), ""), ((1, 1), "1")])
    cs = run_stages(2, [1, 1, 0, 1, 1, 1], phi, 6)
    inits = [e for e in cs.events if e["step"] == "1"]
    assert [e["stage"] for e in inits] == [3]
    assert check_invariants(cs) == []


@given(st.integers(1, 4), st.integers(0, 40), st.randoms(use_true_random=False))
def test_random_runs_clean(k, stages, rnd):
    alpha = [rnd.randrange(k) for _ in range(stages)]
    phi = random_table(k, rnd, alpha)
    assert phi.violations() == []
    cs = run_stages(k, alpha, phi, stages)
    assert check_invariants(cs) == []


def test_history_dump():
    cs = run_stages(2, [0, 1, 1], MonotoneTable(), 3)
    doc = json.loads(dumps(cs))
    assert doc["k"] == 2 and doc["alpha"] == "011"
    assert [h["stage"] for h in doc["history"]] == [0, 1, 2, 3]
    assert doc["history"][0]["tree"] == [""]


def test_random_table_monotone():
    rng = random.Random(5)
    for _ in range(50):
        assert random_table(3, rng).violations() == []
