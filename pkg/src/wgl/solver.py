"""Explicit-state reachability solver for the comparison game.

The arena is explored forward from the root over canonical positions, then
the Player 1 attractor of the empty-box terminal is computed backward with
successor counters.  Player 2 wins exactly on the complement.
"""
from __future__ import annotations

import csv
import io
import logging
import time
from collections import Counter, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .canonical import SymmetryGroup
from .game import (
    P1_TO_MOVE,
    P1_WIN,
    P2_REMOVE,
    P2_SPLIT,
    P2_WIN,
    ComparisonGame,
    GameParams,
    Move,
    Position,
)

log = logging.getLogger(__name__)

ROOT = Position("ROOT")
DIST = "DIST"
T1 = Position(P1_WIN)
T2 = Position(P2_WIN)

P1, P2 = "P1", "P2"


class ResourceLimit(RuntimeError):
    """Arena exploration exceeded the node or time budget."""

    def __init__(self, message, stats):
        super().__init__(message)
        self.stats = stats


@dataclass
class SolverConfig:
    symmetry: bool = True
    node_cap: int = 10_000_000
    time_cap_ms: int = 600_000
    threads: int = 1


def owner(key: Position) -> str:
    if key.phase in ("ROOT", P1_TO_MOVE, P2_WIN):
        return P1
    return P2


class Expander:
    """Successor generation on canonical keys, with the move that leads there."""

    def __init__(self, params: GameParams, symmetry: bool = True):
        self.params = params
        self.game = ComparisonGame(params)
        self.group = SymmetryGroup(self.game, symmetry)

    def key(self, pos: Position) -> Position:
        if pos.phase in (P1_WIN, P2_WIN):
            return Position(pos.phase)
        return self.group.canonical(pos)

    def moves(self, key: Position):
        """Yield (move, successor key); successors may repeat."""
        g = self.game
        phase = key.phase
        if phase == "ROOT":
            for b in range(1, self.params.k + 1):
                yield ("boxes", b), Position(DIST, (), b)
        elif phase == DIST:
            b = key.box
            if b > 1 or len(g.tokens) < b:
                # some assignment leaves a box empty
                yield ("distribute", None), T1
            for boxes in g.partitions(b):
                yield ("distribute", boxes), self.key(Position(P1_TO_MOVE, boxes))
        elif phase == P1_TO_MOVE:
            for mv in g.legal_p1_moves(key):
                yield mv, self.key(g.apply_p1(key, mv))
        elif phase == P2_REMOVE:
            for chain, kill, res in g.remove_responses_with_reintro(key.board, key.box):
                yield ("colours", chain, kill), self.key(res)
        elif phase == P2_SPLIT:
            for chain, p0, p1, res in g.legal_split_responses(key.board, key.box):
                yield ("split", chain, p0, p1), self.key(res)

    def successors(self, key: Position) -> list[Position]:
        out = []
        seen = set()
        for _, s in self.moves(key):
            if s not in seen:
                seen.add(s)
                out.append(s)
        return out


@dataclass
class Arena:
    params: GameParams
    keys: list[Position]
    index: dict[Position, int]
    succ: list[list[int]]
    peak_frontier: int = 0

    @property
    def n_nodes(self) -> int:
        return len(self.keys)

    @property
    def n_edges(self) -> int:
        return sum(len(s) for s in self.succ)

    def owner(self, i: int) -> str:
        return owner(self.keys[i])


def build_arena(params: GameParams, config: SolverConfig | None = None,
                expander: Expander | None = None) -> Arena:
    """Forward-reachable canonical arena from the root, explored level by level."""
    config = config or SolverConfig()
    ex = expander or Expander(params, config.symmetry)
    start = time.perf_counter()
    keys = [ROOT]
    index = {ROOT: 0}
    succ: list[list[int] | None] = [None]
    frontier = [0]
    peak = 1
    pool = ThreadPoolExecutor(config.threads) if config.threads > 1 else None
    try:
        while frontier:
            peak = max(peak, len(frontier))
            work = [keys[i] for i in frontier]
            results = pool.map(ex.successors, work) if pool else map(ex.successors, work)
            nxt = []
            for i, succs in zip(frontier, results):
                ids = []
                for s in succs:
                    j = index.get(s)
                    if j is None:
                        j = len(keys)
                        index[s] = j
                        keys.append(s)
                        succ.append(None)
                        nxt.append(j)
                    ids.append(j)
                succ[i] = ids
                if len(keys) > config.node_cap:
                    raise ResourceLimit(
                        f"node cap {config.node_cap} exceeded",
                        _partial_stats(keys, succ, peak, start),
                    )
            if (time.perf_counter() - start) * 1000 > config.time_cap_ms:
                raise ResourceLimit(
                    f"time cap {config.time_cap_ms} ms exceeded",
                    _partial_stats(keys, succ, peak, start),
                )
            frontier = nxt
    finally:
        if pool:
            pool.shutdown()
    return Arena(params, keys, index, succ, peak)


def _partial_stats(keys, succ, peak, start) -> dict:
    return {
        "nodes": len(keys),
        "edges": sum(len(s) for s in succ if s),
        "peak_frontier": peak,
        "wall_ms": round((time.perf_counter() - start) * 1000),
        "complete": False,
    }


def attractor(arena: Arena, target: set[int]) -> dict[int, int]:
    """Player 1 attractor of ``target`` as node -> rank (0 on the target).

    Player 1 nodes need one successor inside, Player 2 nodes need all.
    Nodes without successors outside the target are never attracted.
    """
    n = arena.n_nodes
    pred: list[list[int]] = [[] for _ in range(n)]
    for i, ss in enumerate(arena.succ):
        for j in ss:
            pred[j].append(i)
    remaining = [len(ss) for ss in arena.succ]
    rank = {t: 0 for t in target}
    queue = deque(target)
    while queue:
        j = queue.popleft()
        for i in pred[j]:
            if i in rank:
                continue
            if arena.owner(i) == P1:
                rank[i] = rank[j] + 1
                queue.append(i)
            else:
                remaining[i] -= 1
                if remaining[i] == 0:
                    rank[i] = rank[j] + 1
                    queue.append(i)
    return rank


@dataclass
class SolveResult:
    params: GameParams
    winner: str
    strategy: dict[Position, Position]
    stats: dict
    arena: Arena | None = field(default=None, repr=False)
    rank: dict[int, int] | None = field(default=None, repr=False)
    symmetry: bool = True

    def winning_region(self) -> set[Position]:
        """Canonical keys from which the winner wins."""
        attracted = {self.arena.keys[i] for i in self.rank}
        if self.winner == P1:
            return attracted
        return {k for k in self.arena.keys if k not in attracted}


def solve(params: GameParams, config: SolverConfig | None = None) -> SolveResult:
    config = config or SolverConfig()
    start = time.perf_counter()
    ex = Expander(params, config.symmetry)
    arena = build_arena(params, config, ex)
    target = {arena.index[T1]} if T1 in arena.index else set()
    rank = attractor(arena, target)
    winner = P1 if 0 in rank else P2
    strategy = {}
    for i, key in enumerate(arena.keys):
        ss = arena.succ[i]
        if not ss or key in (T1, T2):
            continue
        if winner == P1 and owner(key) == P1 and i in rank:
            best = min(ss, key=lambda j: rank.get(j, float("inf")))
            strategy[key] = arena.keys[best]
        elif winner == P2 and owner(key) == P2 and i not in rank:
            safe = next(j for j in ss if j not in rank)
            strategy[key] = arena.keys[safe]
    stats = {
        "nodes": arena.n_nodes,
        "edges": arena.n_edges,
        "peak_frontier": arena.peak_frontier,
        "attractor_size": len(rank),
        "strategy_size": len(strategy),
        "wall_ms": round((time.perf_counter() - start) * 1000),
        "complete": True,
    }
    log.info("solved %s: %s wins (%d nodes)", params.label(), winner, arena.n_nodes)
    return SolveResult(params, winner, strategy, stats, arena, rank, config.symmetry)


def verify_strategy(params: GameParams, result: SolveResult) -> bool:
    """Re-derive the game graph from the rules and check the strategy wins.

    Player 1: every play following the strategy reaches the empty-box
    terminal without revisiting a position.  Player 2: the set of positions
    reachable under the strategy avoids that terminal and every Player 2
    position in it has a legal strategy move.
    """
    ex = Expander(params, result.symmetry)
    strat = result.strategy
    cache: dict[Position, list[Position]] = {}

    def succs(key):
        if key not in cache:
            cache[key] = ex.successors(key)
        return cache[key]

    def follow(key):
        # the strategy move, or None if missing/illegal
        target = strat.get(key)
        if target is None or target not in succs(key):
            return None
        return target

    if result.winner == P2:
        seen = {ROOT}
        stack = [ROOT]
        while stack:
            key = stack.pop()
            if key == T1:
                return False
            if key == T2:
                continue
            if owner(key) == P2:
                nxt = follow(key)
                if nxt is None:
                    return False
                nexts = [nxt]
            else:
                nexts = succs(key)
            for s in nexts:
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        return True

    # Player 1: DFS with colouring; a back edge means Player 2 can loop forever
    state: dict[Position, int] = {}  # 1 on stack, 2 done
    limit = result.stats.get("nodes", 0) + 2
    stack = [(ROOT, None)]
    while stack:
        key, it = stack[-1]
        if it is None:
            if key == T1:
                state[key] = 2
                stack.pop()
                continue
            if key == T2 or len(stack) > limit:
                return False
            if owner(key) == P1:
                nxt = follow(key)
                if nxt is None:
                    return False
                children = [nxt]
            else:
                children = succs(key)
            state[key] = 1
            it = iter(children)
            stack[-1] = (key, it)
        child = next(it, None)
        if child is None:
            state[key] = 2
            stack.pop()
            continue
        st = state.get(child)
        if st == 1:
            return False
        if st is None:
            stack.append((child, None))
    return True


def strategy_region(params: GameParams, result: SolveResult) -> list[Position]:
    """Winner-owned positions visited by plays that follow the strategy."""
    ex = Expander(params, result.symmetry)
    mine = result.winner
    seen = {ROOT}
    stack = [ROOT]
    region = []
    while stack:
        key = stack.pop()
        if key in (T1, T2):
            continue
        if owner(key) == mine:
            region.append(key)
            nxt = result.strategy.get(key)
            nexts = [nxt] if nxt is not None else []
        else:
            nexts = ex.successors(key)
        for s in nexts:
            if s not in seen:
                seen.add(s)
                stack.append(s)
    return region


def describe_move(ex: Expander, key: Position, target: Position):
    """First concrete move from ``key`` whose successor key is ``target``."""
    for mv, s in ex.moves(key):
        if s == target:
            return mv
    raise KeyError(f"{target} is not a successor of {key}")


# -- serialisation -------------------------------------------------------------


def position_json(game: ComparisonGame, key: Position) -> dict:
    """Canonical position with boxes spelled out as token lists."""
    out: dict = {"phase": key.phase}
    if key.phase == DIST:
        out["boxes"] = key.box
        return out
    if key.board:
        out["board"] = [[list(w) for w in game.box_tokens(m)] for m in key.board]
    if key.box is not None:
        out["box"] = key.box
    return out


def _chain_json(chain) -> list:
    steps = []
    for st in chain:
        if hasattr(st, "colours"):
            steps.append({"drop": [list(c) for c in st.colours]})
        else:
            steps.append({"reintroduce": [list(st.c), list(st.d)]})
    return steps


def move_json(game: ComparisonGame, mv) -> dict:
    if isinstance(mv, Move):
        return {"kind": mv.kind, "box": mv.box}
    kind = mv[0]
    if kind == "boxes":
        return {"kind": "boxes", "count": mv[1]}
    if kind == "distribute":
        boxes = mv[1]
        if boxes is None:
            return {"kind": "distribute", "board": None, "note": "leave a box empty"}
        return {"kind": "distribute", "board": [[list(w) for w in game.box_tokens(m)] for m in boxes]}
    if kind == "colours":
        _, chain, kill = mv
        return {"kind": "colours", "steps": _chain_json(chain),
                "removed": [list(c) for c in game._kill_colours[kill]]}
    if kind == "split":
        _, chain, p0, p1 = mv
        return {"kind": "split", "steps": _chain_json(chain),
                "parts": [[list(w) for w in game.box_tokens(p)] for p in (p0, p1)]}
    raise ValueError(f"unknown move {mv!r}")


def params_json(params: GameParams) -> dict:
    return {
        "k": params.k,
        "factors": list(params.factors),
        "adjacency": params.adjacency,
        "reintro_on_remove": params.reintro_on_remove,
        "drop_on_split": params.drop_on_split,
    }


def result_json(result: SolveResult, timing: bool = False) -> dict:
    """``{params, winner, stats, strategy: [{position, move}]}``.

    Wall time is left out unless ``timing`` so that repeated runs print
    identical bytes.
    """
    ex = Expander(result.params, result.symmetry)
    stats = dict(result.stats)
    if not timing:
        stats.pop("wall_ms", None)
    strategy = []
    for key, target in result.strategy.items():
        mv = describe_move(ex, key, target)
        strategy.append({"position": position_json(ex.game, key), "move": move_json(ex.game, mv)})
    return {
        "params": params_json(result.params),
        "winner": result.winner,
        "stats": stats,
        "strategy": strategy,
    }


def _dot_label(game: ComparisonGame, key: Position) -> str:
    if key.phase == "ROOT":
        return "root"
    if key.phase == DIST:
        return f"distribute into {key.box}"
    if key.phase in (P1_WIN, P2_WIN):
        return key.phase
    boxes = []
    for i, m in enumerate(key.board):
        toks = " ".join("".join(map(str, w)) for w in game.box_tokens(m))
        boxes.append(("*" if i == key.box else "") + "{" + toks + "}")
    return key.phase + " " + " ".join(boxes)


def arena_dot(result: SolveResult) -> str:
    """Graphviz text: boxes for Player 1 nodes, ellipses for Player 2, doublecircle terminals.

    Strategy edges are drawn bold.
    """
    arena = result.arena
    game = ComparisonGame(result.params)
    lines = [f'digraph "{result.params.label()}" {{', "  node [fontname=monospace];"]
    for i, key in enumerate(arena.keys):
        if key.phase in (P1_WIN, P2_WIN):
            shape = "doublecircle"
        else:
            shape = "box" if owner(key) == P1 else "ellipse"
        lines.append(f'  n{i} [label="{_dot_label(game, key)}", shape={shape}];')
    for i, ss in enumerate(arena.succ):
        chosen = result.strategy.get(arena.keys[i])
        for j in ss:
            style = " [style=bold]" if chosen == arena.keys[j] else ""
            lines.append(f"  n{i} -> n{j}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- sweeps --------------------------------------------------------------------


@dataclass
class SweepRow:
    k: int
    factors: tuple[int, ...]
    winner: str | None  # None when the point hit a resource limit
    stats: dict
    error: str | None = None


@dataclass
class SweepResult:
    rows: list[SweepRow]
    flags: list[str]

    def winners(self) -> dict[tuple[int, tuple[int, ...]], str | None]:
        return {(r.k, r.factors): r.winner for r in self.rows}

    def csv(self, timing: bool = False) -> str:
        """Rows ``k,factors,winner,nodes,millis``; millis is 0 unless ``timing``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "factors", "winner", "nodes", "millis"])
        for r in self.rows:
            w.writerow([r.k, ",".join(map(str, r.factors)), r.winner or "ERROR",
                        r.stats.get("nodes", ""), r.stats.get("wall_ms", 0) if timing else 0])
        return buf.getvalue()

    def to_json(self, timing: bool = False) -> dict:
        rows = []
        for r in self.rows:
            stats = dict(r.stats)
            if not timing:
                stats.pop("wall_ms", None)
            row = {"k": r.k, "factors": list(r.factors), "winner": r.winner, "stats": stats}
            if r.error:
                row["error"] = r.error
            rows.append(row)
        return {"rows": rows, "flags": self.flags}


def _sub_bag(a, b) -> bool:
    """Multiset inclusion a <= b."""
    ca, cb = Counter(a), Counter(b)
    return all(cb[x] >= n for x, n in ca.items())


def monotonicity_flags(winners: dict) -> list[str]:
    """Violations of: P2 at (k, bag) implies P2 at smaller k and at larger bags."""
    flags = []
    for (k, bag), w in sorted(winners.items()):
        if w != P2:
            continue
        for (k2, bag2), w2 in sorted(winners.items()):
            if w2 != P1:
                continue
            if bag2 == bag and k2 < k:
                flags.append(f"P2 wins k={k} factors={list(bag)} but P1 wins k={k2}")
            if k2 == k and bag2 != bag and _sub_bag(bag, bag2):
                flags.append(f"P2 wins k={k} factors={list(bag)} but P1 wins factors={list(bag2)}")
    return flags


def sweep(k_range, factor_families, config: SolverConfig | None = None, **rules) -> SweepResult:
    """Solve every (k, factors) point; resource errors are recorded per point."""
    rows = []
    for factors in factor_families:
        factors = tuple(sorted(factors, reverse=True))
        for k in k_range:
            params = GameParams(k, factors, **rules)
            try:
                res = solve(params, config)
                rows.append(SweepRow(k, factors, res.winner, res.stats))
            except ResourceLimit as e:
                rows.append(SweepRow(k, factors, None, e.stats, str(e)))
    flags = monotonicity_flags({(r.k, r.factors): r.winner for r in rows if r.winner})
    return SweepResult(rows, flags)
