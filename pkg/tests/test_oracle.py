from __future__ import annotations

import pytest

from wgl.oracle import BruteForceGame, OracleTooLarge, brute_force_winner

from conftest import solved


def test_single_box_game_by_hand():
    g = BruteForceGame(1, (2,))
    arena = g.arena()
    # root, one distribution node, the single full box, its tap, boxless end
    assert len(arena) == 5
    assert g.solve()[0] == "P2"


@pytest.mark.parametrize("k,factors,winner", [
    (1, (2,), "P2"), (2, (2,), "P2"), (3, (2,), "P1"),
    (3, (2, 2), "P2"), (4, (2, 2), "P1"), (2, (3,), "P2"),
])
def test_oracle_anchor_points(k, factors, winner):
    assert brute_force_winner(k, factors) == winner


def test_oracle_cap():
    with pytest.raises(OracleTooLarge):
        BruteForceGame(4, (2, 2, 2), cap=1000).arena()


@pytest.mark.parametrize("k,factors,rules", [
    (k, f, r)
    for f in [(2,), (3,), (2, 2), (3, 2)]
    for k in (1, 2, 3, 4)
    for r in ({}, {"adjacency": "successor"}, {"reintro_on_remove": True}, {"drop_on_split": True})
])
def test_solver_matches_oracle_small(k, factors, rules):
    assert solved(k, factors, **rules).winner == brute_force_winner(k, factors, **rules)
