"""Reduction witnesses and adversarial instances from solved comparison games.

Instances of finite choice with at most k solutions are finite binary trees
with at most k vertices per level.  A Player 2 strategy is turned into a
depth-bounded simulation of the reduction: the input tree drives Player 1,
the strategy's answers grow one tree per factor, and the final board gives
the outer map.  A Player 1 strategy is played against an opponent's
reduction attempt to grow an input tree that defeats it.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable

from .game import (
    P1_TO_MOVE,
    P1_WIN,
    P2_REMOVE,
    P2_SPLIT,
    P2_WIN,
    Colour,
    ComparisonGame,
    Drop,
    GameParams,
    Move,
    Position,
    iter_bits,
)
from .solver import DIST, P1, P2, ROOT, Expander, SolveResult


class LevelTreeError(ValueError):
    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


@dataclass
class LevelTree:
    """Finite binary tree given level by level; ``levels[s]`` holds strings of length s."""

    levels: list[frozenset[str]]
    bound: int

    def __post_init__(self):
        self.levels = [frozenset(lv) for lv in self.levels]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def validate(self) -> None:
        if not self.levels or self.levels[0] != frozenset({""}):
            raise LevelTreeError("level 0 must be the root alone", 0)
        for s, lv in enumerate(self.levels):
            if not 1 <= len(lv) <= self.bound:
                raise LevelTreeError(
                    f"level {s} has {len(lv)} vertices, allowed 1..{self.bound}", s)
            for v in lv:
                if len(v) != s or set(v) - {"0", "1"}:
                    raise LevelTreeError(f"bad vertex {v!r} on level {s}", s)
                if s and v[:-1] not in self.levels[s - 1]:
                    raise LevelTreeError(f"vertex {v!r} has no parent", s)

    def children(self, s: int, v: str) -> list[str]:
        if s + 1 >= len(self.levels):
            return []
        return [c for c in (v + "0", v + "1") if c in self.levels[s + 1]]

    def extendible(self, v: str) -> bool:
        """Whether some deepest-level vertex extends ``v``."""
        return any(w.startswith(v) for w in self.levels[-1])

    def to_json(self) -> dict:
        return {"bound": self.bound, "levels": [sorted(lv) for lv in self.levels]}

    @classmethod
    def from_json(cls, data) -> "LevelTree":
        return cls([frozenset(lv) for lv in data["levels"]], int(data["bound"]))


@dataclass
class FactorTrees:
    trees: list[LevelTree]
    journal: list[tuple[int, str, str, str]] = field(default_factory=list)

    def validate(self) -> None:
        for t in self.trees:
            t.validate()

    def to_json(self) -> dict:
        return {
            "trees": [t.to_json() for t in self.trees],
            "splits": [
                {"factor": i, "parent": p, "children": [a, b]} for i, p, a, b in self.journal
            ],
        }


class FactorBook:
    """Grows one tree per factor; colour (i, j) is the path labelled j in tree i.

    Every call to :meth:`step` adds one level to every tree.  Paths whose
    colour is absent from the board die; a reintroduction splits the path of
    the source colour and hands the right child to the new colour.
    """

    def __init__(self, factors):
        self.factors = tuple(factors)
        self.live: list[dict[int, str]] = [{0: ""} for _ in self.factors]
        self.levels: list[list[set[str]]] = [[{""}] for _ in self.factors]
        self.journal: list[tuple[int, str, str, str]] = []
        # bring every colour to life, one split per level
        everything = {Colour(i, v) for i, n in enumerate(self.factors) for v in range(n)}
        for i, n in enumerate(self.factors):
            for v in range(1, n):
                self.step(everything, (Colour(i, 0), Colour(i, v)))

    def step(self, present, split=None) -> None:
        for i in range(len(self.factors)):
            new = {}
            for v, vert in self.live[i].items():
                if Colour(i, v) not in present:
                    continue
                if split is not None and split[0] == (i, v):
                    new[v] = vert + "0"
                    new[split[1].value] = vert + "1"
                    self.journal.append((i, vert, vert + "0", vert + "1"))
                else:
                    new[v] = vert + "0"
            self.live[i] = new
            self.levels[i].append(set(new.values()))

    def trees(self) -> FactorTrees:
        return FactorTrees(
            [LevelTree([frozenset(l) for l in lv], n) for lv, n in zip(self.levels, self.factors)],
            list(self.journal),
        )

    def colour_of(self, i: int, vertex: str) -> Colour | None:
        for v, vert in self.live[i].items():
            if vert == vertex:
                return Colour(i, v)
        return None


def present_set(game: ComparisonGame, board) -> set[Colour]:
    return set(game.colours_of(game.present_colours(board)))


class StrategyPlayer:
    """Plays a solved strategy on concrete (non-canonical) positions."""

    def __init__(self, result: SolveResult):
        self.result = result
        self.params = result.params
        self.ex = Expander(result.params, result.symmetry)
        self.game = self.ex.game

    def _target(self, pos: Position) -> Position:
        key = pos if pos.phase in ("ROOT", DIST) else self.ex.key(pos)
        try:
            return self.result.strategy[key]
        except KeyError:
            raise KeyError(f"strategy has no move at {key}") from None

    def box_count(self) -> int:
        return self._target(ROOT).box

    def p1_move(self, board) -> Move:
        pos = Position(P1_TO_MOVE, tuple(board))
        target = self._target(pos)
        for mv in self.game.legal_p1_moves(pos):
            if self.ex.key(self.game.apply_p1(pos, mv)) == target:
                return mv
        raise KeyError(f"no concrete move reaches {target}")

    def distribute(self, b: int) -> tuple[int, ...]:
        target = self._target(Position(DIST, (), b))
        for boxes in self.game.partitions(b):
            if self.ex.key(Position(P1_TO_MOVE, boxes)) == target:
                return boxes
        raise KeyError(f"no distribution reaches {target}")

    def remove(self, board, b: int):
        target = self._target(Position(P2_REMOVE, tuple(board), b))
        for chain, kill, res in self.game.remove_responses_with_reintro(tuple(board), b):
            if self.ex.key(res) == target:
                return chain, kill
        raise KeyError(f"no removal reaches {target}")

    def split(self, board, b: int):
        target = self._target(Position(P2_SPLIT, tuple(board), b))
        for chain, p0, p1, res in self.game.legal_split_responses(tuple(board), b):
            if self.ex.key(res) == target:
                return chain, p0, p1
        raise KeyError(f"no split response reaches {target}")


def _apply_chain(game: ComparisonGame, book: FactorBook, board, chain, trace):
    """Apply a step chain to the board, growing the factor trees alongside."""
    for step in chain:
        board = game.apply_steps(board, (step,))
        if isinstance(step, Drop):
            book.step(present_set(game, board))
            trace.append({"event": "drop", "colours": [list(c) for c in step.colours]})
        else:
            book.step(present_set(game, board), step)
            trace.append({"event": "reintroduce", "from": list(step.c), "to": list(step.d)})
    return board


@dataclass
class Reduction:
    """Outcome of simulating a Player 2 strategy against an input tree."""

    params: GameParams
    input_tree: LevelTree
    factor_trees: FactorTrees
    board: tuple[int, ...]
    vertices: list[str]
    live_paths: list[dict[int, str]]
    trace: list[dict]

    def outer(self, choice) -> str | None:
        """Input-tree vertex for one deepest-level vertex per factor tree.

        None when the chosen paths name a token that is no longer on the board.
        """
        game = ComparisonGame(self.params)
        w = []
        for i, vert in enumerate(choice):
            vals = [v for v, p in self.live_paths[i].items() if p == vert]
            if not vals:
                return None
            w.append(vals[0])
        t = game.token_index(w)
        for m, v in zip(self.board, self.vertices):
            if m >> t & 1:
                return v
        return None

    def check(self) -> list[str]:
        """Soundness problems at the simulated depth (empty list when sound)."""
        problems = []
        game = ComparisonGame(self.params)
        try:
            self.factor_trees.validate()
        except LevelTreeError as e:
            problems.append(f"factor tree: {e}")
        deepest = self.input_tree.levels[-1]
        for m, v in zip(self.board, self.vertices):
            if v not in deepest:
                problems.append(f"box at {v!r} is not a deepest-level input vertex")
            for t in iter_bits(m):
                w = game.tokens[t]
                choice = []
                for i, x in enumerate(w):
                    p = self.live_paths[i].get(x)
                    if p is None:
                        problems.append(f"token {w} uses dead colour {(i, x)}")
                        break
                    choice.append(p)
                else:
                    if self.outer(choice) != v:
                        problems.append(f"outer map sends token {w} away from its box {v!r}")
        return problems


def p2_to_reduction(result: SolveResult, tree: LevelTree, depth: int | None = None) -> Reduction:
    """Drive the Player 2 strategy with the input tree up to ``depth`` levels."""
    if result.winner != P2:
        raise ValueError("need a Player 2 strategy")
    params = result.params
    tree.bound = params.k if tree.bound is None else tree.bound
    if tree.bound > params.k:
        raise LevelTreeError(f"tree bound {tree.bound} exceeds k={params.k}")
    tree.validate()
    depth = tree.depth if depth is None else min(depth, tree.depth)
    player = StrategyPlayer(result)
    game = player.game
    book = FactorBook(params.factors)
    trace = []

    # level 0 is a single vertex, so Player 1 opens with one box
    board = player.distribute(1)
    vertices = [""]
    trace.append({"event": "distribute", "boxes": game.board_tokens(board)})

    for s in range(depth):
        kids = {v: tree.children(s, v) for v in vertices}
        for v in [v for v in vertices if not kids[v]]:
            b = vertices.index(v)
            chain, kill = player.remove(board, b)
            board = _apply_chain(game, book, board, chain, trace)
            pos = game.remove_by_kill(board, b, kill)
            if pos.phase != P1_TO_MOVE:
                raise RuntimeError(f"strategy lost on tap of {v!r}: {pos.phase}")
            board = pos.board
            del vertices[b]
            book.step(present_set(game, board))
            trace.append({"event": "tap", "level": s + 1, "vertex": v,
                          "removed": _kill_colours(game, kill)})
        for v in [v for v in vertices if len(kids[v]) == 2]:
            b = vertices.index(v)
            chain, p0, p1 = player.split(board, b)
            board = _apply_chain(game, book, board, chain, trace)
            pos = game.apply_split(board, b, (), p0, p1)
            if pos.phase != P1_TO_MOVE:
                raise RuntimeError(f"strategy lost on split of {v!r}: {pos.phase}")
            board = pos.board
            vertices[b] = v + "0"
            vertices.append(v + "1")
            book.step(present_set(game, board))
            trace.append({"event": "split", "level": s + 1, "vertex": v,
                          "parts": [game.box_tokens(p0), game.box_tokens(p1)]})
        vertices = [kids[v][0] if len(v) == s else v for v in vertices]

    return Reduction(
        params,
        LevelTree(tree.levels[: depth + 1], tree.bound),
        book.trees(),
        board,
        vertices,
        [dict(d) for d in book.live],
        trace,
    )


def _kill_colours(game: ComparisonGame, kill: int) -> list[list[int]]:
    return [list(c) for c in game._kill_colours.get(kill, ())]


# -- Player 1: adversarial instances ------------------------------------------


@dataclass
class ReductionAttempt:
    """An opponent's attempted reduction, read as a Player 2 strategy.

    ``outer_table[b]`` lists, for each of the b initial input paths, the
    tokens (paths through the factor trees) the outer map sends there.  The
    responders answer taps and splits as the opponent's inner map would.
    """

    outer_table: dict[int, list[list[tuple[int, ...]]]]
    respond_remove: Callable
    respond_split: Callable
    name: str = "opponent"

    def board_for(self, game: ComparisonGame, b: int) -> tuple[int, ...]:
        if b not in self.outer_table:
            raise ValueError(f"outer table has no entry for {b} boxes")
        rows = self.outer_table[b]
        if len(rows) != b:
            raise ValueError(f"outer table for {b} boxes lists {len(rows)} boxes")
        seen = set()
        for row in rows:
            for w in row:
                w = tuple(w)
                if w in seen:
                    raise ValueError(f"token {w} appears in two boxes")
                seen.add(w)
        if len(seen) != len(game.tokens):
            raise ValueError("outer table does not place every token")
        return tuple(game.box_of(row) for row in rows)


def trivial_attempt(params: GameParams) -> ReductionAttempt:
    """Everything in the first box, remove all colours, never reintroduce."""
    game = ComparisonGame(params)
    table = {b: [list(game.tokens)] + [[] for _ in range(b - 1)] for b in range(1, params.k + 1)}
    every = (1 << len(game.colours)) - 1

    def remove(game, board, b):
        return (), game.kill_mask(every)

    def split(game, board, b):
        return (), board[b], 0

    return ReductionAttempt(table, remove, split, "trivial")


def random_attempt(params: GameParams, rng: random.Random) -> ReductionAttempt:
    game = ComparisonGame(params)
    table = {}
    for b in range(1, params.k + 1):
        rows = [[] for _ in range(b)]
        for w in game.tokens:
            rows[rng.randrange(b)].append(w)
        table[b] = rows

    def remove(game, board, b):
        opts = list(game.remove_responses_with_reintro(board, b))
        chain, kill, _ = rng.choice(opts)
        return chain, kill

    def split(game, board, b):
        opts = list(game.legal_split_responses(board, b))
        chain, p0, p1, _ = rng.choice(opts)
        return chain, p0, p1

    return ReductionAttempt(table, remove, split, "random")


@dataclass
class Adversary:
    tree: LevelTree
    status: str  # "defeated" | "undecided"
    factor_trees: FactorTrees
    board: tuple[int, ...]
    vertices: list[str]
    empty_box: int | None
    trace: list[dict]
    params: GameParams

    def certificate(self) -> bool:
        """Every token the outer table can still select maps outside the tree."""
        if self.status != "defeated":
            return False
        for m, v in zip(self.board, self.vertices):
            if m and self.tree.extendible(v):
                return False
        return self.tree.extendible(self.vertices[self.empty_box])


def p1_to_adversary(result: SolveResult, attempt: ReductionAttempt, depth: int) -> Adversary:
    """Grow an input tree by playing the Player 1 strategy against ``attempt``."""
    if result.winner != P1:
        raise ValueError("need a Player 1 strategy")
    params = result.params
    player = StrategyPlayer(result)
    game = player.game
    book = FactorBook(params.factors)
    trace = []
    levels = [{""}]
    vertices = [""]

    def grow(new_vertices):
        levels.append(set(new_vertices))
        return list(new_vertices)

    def finish(board, status):
        empty = None
        if status == "defeated":
            empty = next(i for i, m in enumerate(board) if m == 0)
            # every other path dies; the empty box keeps its path
            levels.append({vertices[empty] + "0"})
        return Adversary(LevelTree(levels, params.k), status, book.trees(), tuple(board),
                         list(vertices), empty, trace, params)

    b = player.box_count()
    trace.append({"event": "boxes", "count": b})
    while len(vertices) < b:
        if len(levels) > depth:
            return finish((), "undecided")
        vertices = grow([vertices[0] + "0"] + [v + "0" for v in vertices[1:]] + [vertices[0] + "1"])
    board = attempt.board_for(game, b)
    trace.append({"event": "distribute", "boxes": game.board_tokens(board)})
    pos = game.classify(board)
    while pos.phase == P1_TO_MOVE:
        if len(levels) > depth:
            return finish(board, "undecided")
        mv = player.p1_move(board)
        if mv.kind == "remove":
            chain, kill = attempt.respond_remove(game, board, mv.box)
            new_vertices = [v + "0" for i, v in enumerate(vertices) if i != mv.box]
            trace.append({"event": "tap", "box": mv.box, "vertex": vertices[mv.box]})
            board = _apply_chain(game, book, board, chain, trace)
            pos = game.remove_by_kill(board, mv.box, kill)
        else:
            chain, p0, p1 = attempt.respond_split(game, board, mv.box)
            v = vertices[mv.box]
            new_vertices = [u + "0" for u in vertices] + [v + "1"]
            trace.append({"event": "split", "box": mv.box, "vertex": v})
            board = _apply_chain(game, book, board, chain, trace)
            pos = game.apply_split(board, mv.box, (), p0, p1)
        vertices = grow(new_vertices)
        board = pos.board
        if pos.phase in (P1_TO_MOVE, P1_WIN):
            book.step(present_set(game, board))
    if pos.phase == P2_WIN:
        raise RuntimeError("Player 1 strategy removed every box")
    if len(levels) > depth:
        return finish(board, "undecided")
    trace.append({"event": "empty-box"})
    return finish(board, "defeated")


def random_level_tree(k: int, depth: int, rng: random.Random) -> LevelTree:
    """Random instance: at most k and at least one vertex per level."""
    levels = [frozenset({""})]
    for _ in range(depth):
        nxt = []
        for v in sorted(levels[-1]):
            r = rng.random()
            if r < 0.15:
                continue
            if r < 0.35 and len(nxt) + 2 <= k:
                nxt += [v + "0", v + "1"]
            else:
                nxt.append(v + rng.choice("01"))
        if not nxt:
            v = rng.choice(sorted(levels[-1]))
            nxt.append(v + "0")
        levels.append(frozenset(nxt[:k]))
    return LevelTree(levels, k)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
