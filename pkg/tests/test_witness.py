from __future__ import annotations

import json
import random

import pytest

from wgl.game import ComparisonGame
from wgl.witness import (
    FactorBook,
    LevelTree,
    LevelTreeError,
    ReductionAttempt,
    p1_to_adversary,
    p2_to_reduction,
    random_attempt,
    random_level_tree,
    trivial_attempt,
)

from conftest import solved


def chain_tree(depth, bound=2):
    return LevelTree([{"0" * s} for s in range(depth + 1)], bound)


def test_level_tree_validation():
    chain_tree(5).validate()
    bad = LevelTree([{""}, {"0", "1"}, {"00", "01", "10"}], 2)
    with pytest.raises(LevelTreeError) as ei:
        bad.validate()
    assert ei.value.level == 2
    with pytest.raises(LevelTreeError):
        LevelTree([{""}, {"0"}, {"11"}], 2).validate()
    with pytest.raises(LevelTreeError):
        LevelTree([{""}, set()], 2).validate()


def test_level_tree_json_round_trip():
    t = random_level_tree(3, 8, random.Random(1))
    t2 = LevelTree.from_json(json.loads(json.dumps(t.to_json())))
    assert t2.levels == t.levels and t2.bound == t.bound


def test_factor_book_starts_with_every_colour():
    book = FactorBook((3, 2))
    trees = book.trees()
    trees.validate()
    assert [len(t.levels[-1]) for t in trees.trees] == [3, 2]
    assert len(trees.journal) == 3


def test_single_path_input():
    res = solved(2, (2,))
    red = p2_to_reduction(res, chain_tree(10))
    assert red.check() == []
    assert red.vertices == ["0" * 10]
    assert not any(e["event"] in ("tap", "split") for e in red.trace)
    game = ComparisonGame(res.params)
    for w in game.box_tokens(red.board[0]):
        choice = [red.live_paths[i][x] for i, x in enumerate(w)]
        assert red.outer(choice) == "0" * 10


def test_root_split_into_two_paths():
    res = solved(2, (2,))
    tree = LevelTree([{""}] + [{"0" * s, "1" + "0" * (s - 1)} for s in range(1, 8)], 2)
    red = p2_to_reduction(res, tree)
    assert red.check() == []
    assert [e["event"] for e in red.trace].count("split") == 1
    assert sorted(red.vertices) == ["0000000", "1000000"]
    outs = set()
    game = ComparisonGame(res.params)
    for m in red.board:
        for w in game.box_tokens(m):
            outs.add(red.outer([red.live_paths[i][x] for i, x in enumerate(w)]))
    assert outs == {"0000000", "1000000"}


def test_dying_path_triggers_tap():
    res = solved(2, (2,))
    # two paths from the root; the 1-path dies after level 2
    levels = [{""}, {"0", "1"}, {"00", "10"}] + [{"0" * s} for s in range(3, 7)]
    red = p2_to_reduction(res, LevelTree(levels, 2))
    taps = [e for e in red.trace if e["event"] == "tap"]
    assert len(taps) == 1 and taps[0]["level"] == 3 and taps[0]["vertex"] == "10"
    assert red.check() == []
    # the removed colours are gone from the factor tree's live paths
    for c in taps[0]["removed"]:
        i, v = c
        assert v not in red.live_paths[i]


def test_bound_violation_rejected():
    res = solved(2, (2,))
    wide = LevelTree([{""}, {"0", "1"}, {"00", "01", "10"}], 3)
    with pytest.raises(LevelTreeError):
        p2_to_reduction(res, wide)


def test_p2_needs_p2_winner():
    with pytest.raises(ValueError):
        p2_to_reduction(solved(3, (2,)), chain_tree(3, 3))


@pytest.mark.parametrize("k,factors", [(2, (2,)), (3, (2, 2)), (4, (2, 2, 2))])
def test_random_trees_sound(k, factors):
    res = solved(k, factors)
    rng = random.Random(k)
    for _ in range(25):
        tree = random_level_tree(k, 20, rng)
        red = p2_to_reduction(res, tree, 20)
        assert red.check() == []
        for t, n in zip(red.factor_trees.trees, factors):
            assert all(1 <= len(lv) <= n for lv in t.levels)


def test_trivial_opponent_is_defeated():
    res = solved(3, (2,))
    adv = p1_to_adversary(res, trivial_attempt(res.params), depth=20)
    assert adv.status == "defeated" and adv.certificate()
    adv.tree.validate()
    assert len(adv.tree.levels[-1]) == 1


def test_small_depth_is_undecided():
    res = solved(3, (2,))
    adv = p1_to_adversary(res, trivial_attempt(res.params), depth=1)
    assert adv.status == "undecided" and not adv.certificate()
    adv.tree.validate()


def test_duplicated_token_rejected():
    res = solved(3, (2,))
    att = trivial_attempt(res.params)
    table = {b: [list(r) for r in rows] for b, rows in att.outer_table.items()}
    for b in table:
        table[b][-1] = table[b][-1] + [(0,)]
    bad = ReductionAttempt(table, att.respond_remove, att.respond_split)
    with pytest.raises(ValueError, match="two boxes"):
        p1_to_adversary(res, bad, depth=20)


@pytest.mark.parametrize("k,factors", [(3, (2,)), (4, (2, 2)), (5, (2, 2, 2))])
def test_random_opponents_defeated(k, factors):
    res = solved(k, factors)
    rng = random.Random(k)
    for _ in range(20):
        adv = p1_to_adversary(res, random_attempt(res.params, rng), depth=30)
        adv.tree.validate()
        assert adv.status == "defeated" and adv.certificate()
