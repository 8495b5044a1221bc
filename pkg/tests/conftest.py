from __future__ import annotations

import functools
import random
import sys

from hypothesis import HealthCheck, settings

from wgl.game import GameParams, Position
from wgl.solver import DIST, Expander, SolveResult, solve, strategy_region

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def solved(k, factors, symmetry=True, **rules):
    from wgl.solver import SolverConfig

    return solve(GameParams(k, tuple(factors), **rules), SolverConfig(symmetry=symmetry))


def oracle_node_to_position(game, node) -> Position:
    """Translate a brute-force oracle node into the solver's position encoding."""
    kind = node[0]
    if kind in ("ROOT", "T1", "T2"):
        return Position(kind)
    if kind == "DIST":
        return Position(DIST, (), node[1])
    board = tuple(game.box_of(b) for b in node[1])
    if kind == "P1":
        return Position("P1", board)
    return Position(kind, board, node[2])


def mutate_strategy(res: SolveResult, rng: random.Random) -> SolveResult:
    """Corrupt one strategy entry on the strategy's own play region."""
    region = strategy_region(res.params, res)
    ex = Expander(res.params, res.symmetry)
    winning = res.winning_region()
    key = rng.choice(region)
    losing = [s for s in ex.successors(key) if s not in winning]
    strat = dict(res.strategy)
    if losing and rng.random() < 0.7:
        strat[key] = rng.choice(losing)
    else:
        strat[key] = Position("P1", (0,))  # not a successor of anything
    return SolveResult(res.params, res.winner, strat, res.stats, res.arena, res.rank, res.symmetry)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
