"""Rules of the comparison game between finite choice and products of finite choice.

Tokens are the elements of n_0 x ... x n_l, indexed in mixed radix with
coordinate 0 varying fastest.  A box is an int bitmask over token indices and
a board is a tuple of boxes.  Colours are (coord, value) pairs; colour sets
are bitmasks over colour indices.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

ADJACENCY_MODES = ("any", "successor")

# phases
P1_TO_MOVE = "P1"
P2_REMOVE = "RM"
P2_SPLIT = "SP"
P1_WIN = "T1"
P2_WIN = "T2"


class IllegalMove(ValueError):
    """A move or response that the rules do not permit."""


class Colour(NamedTuple):
    coord: int
    value: int


class Position(NamedTuple):
    phase: str
    board: tuple[int, ...] = ()
    box: int | None = None

    @property
    def terminal(self) -> bool:
        return self.phase in (P1_WIN, P2_WIN)


class Move(NamedTuple):
    kind: str  # "remove" | "split"
    box: int


class Reintro(NamedTuple):
    """Reintroduce colour d as a copy of colour c."""
    c: Colour
    d: Colour


class Drop(NamedTuple):
    """Discard every token carrying one of ``colours`` (``drop_on_split`` rule)."""
    colours: tuple[Colour, ...]


@dataclass(frozen=True)
class GameParams:
    k: int
    factors: tuple[int, ...]
    adjacency: str = "any"
    reintro_on_remove: bool = False
    drop_on_split: bool = False

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(int(n) for n in self.factors))
        if self.k < 1:
            raise ValueError(f"box budget k must be >= 1, got {self.k}")
        if not self.factors:
            raise ValueError("need at least one factor")
        if any(n < 1 for n in self.factors):
            raise ValueError(f"factor sizes must be >= 1, got {list(self.factors)}")
        if self.adjacency not in ADJACENCY_MODES:
            raise ValueError(f"unknown adjacency mode {self.adjacency!r}")

    @property
    def n_tokens(self) -> int:
        return math.prod(self.factors)

    @property
    def n_colours(self) -> int:
        return sum(self.factors)

    def label(self) -> str:
        return f"k={self.k} factors={','.join(map(str, self.factors))}"


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass
class ComparisonGame:
    """Move generation and transitions for one parameter point.

    All methods are pure: boards and positions are immutable tuples.
    """

    params: GameParams
    tokens: list[tuple[int, ...]] = field(init=False)
    strides: list[int] = field(init=False)
    colours: list[Colour] = field(init=False)
    colour_mask: list[int] = field(init=False)  # colour index -> token mask

    def __post_init__(self):
        f = self.params.factors
        self.strides = [math.prod(f[:i]) for i in range(len(f))]
        # itertools.product varies the last coordinate fastest; reverse to match strides
        self.tokens = [tuple(reversed(w)) for w in itertools.product(*(range(n) for n in reversed(f)))]
        self.colours = [Colour(i, c) for i, n in enumerate(f) for c in range(n)]
        self._colour_index = {c: j for j, c in enumerate(self.colours)}
        self.colour_mask = []
        for col in self.colours:
            m = 0
            for t, w in enumerate(self.tokens):
                if w[col.coord] == col.value:
                    m |= 1 << t
            self.colour_mask.append(m)
        self.all_tokens = (1 << len(self.tokens)) - 1
        # kill mask for every colour subset; index = colour-set bitmask
        kill = [0] * (1 << len(self.colours))
        for cs in range(1, len(kill)):
            low = cs & -cs
            kill[cs] = kill[cs ^ low] | self.colour_mask[low.bit_length() - 1]
        self._kill = kill
        self._distinct_kills = sorted(set(kill))
        # smallest colour set realising each kill mask
        self._kill_colours = {}
        for cs in sorted(range(len(kill)), key=lambda x: (popcount(x), x)):
            self._kill_colours.setdefault(kill[cs], tuple(self.colours_of(cs)))

    # -- encoding helpers --------------------------------------------------

    def token_index(self, w) -> int:
        w = tuple(w)
        if len(w) != len(self.params.factors) or any(
            not 0 <= x < n for x, n in zip(w, self.params.factors)
        ):
            raise ValueError(f"token {w} out of range for factors {self.params.factors}")
        return sum(x * s for x, s in zip(w, self.strides))

    def colour_index(self, c) -> int:
        c = Colour(*c)
        if c not in self._colour_index:
            raise ValueError(f"colour {tuple(c)} out of range")
        return self._colour_index[c]

    def box_of(self, tokens) -> int:
        m = 0
        for w in tokens:
            m |= 1 << self.token_index(w)
        return m

    def board_of(self, boxes) -> tuple[int, ...]:
        board = tuple(self.box_of(b) for b in boxes)
        check_disjoint(board)
        return board

    def box_tokens(self, mask: int) -> list[tuple[int, ...]]:
        return [self.tokens[t] for t in iter_bits(mask)]

    def board_tokens(self, board) -> list[list[tuple[int, ...]]]:
        return [self.box_tokens(m) for m in board]

    def colour_set_mask(self, colours) -> int:
        m = 0
        for c in colours:
            m |= 1 << self.colour_index(c)
        return m

    def colours_of(self, cmask: int) -> list[Colour]:
        return [self.colours[j] for j in iter_bits(cmask)]

    def kill_mask(self, cmask: int) -> int:
        return self._kill[cmask]

    def present_colours(self, board) -> int:
        union = 0
        for m in board:
            union |= m
        return sum(1 << j for j, cm in enumerate(self.colour_mask) if cm & union)

    # -- positions ---------------------------------------------------------

    def classify(self, board: tuple[int, ...]) -> Position:
        """Win check after a distribution, a removal or a split."""
        if any(m == 0 for m in board):
            return Position(P1_WIN, board)
        if not board:
            return Position(P2_WIN, board)
        return Position(P1_TO_MOVE, board)

    def initial_assignments(self, b: int) -> Iterator[tuple[tuple[int, ...], Position]]:
        """All total maps from the token universe onto ``b`` boxes.

        Yields (assignment, resulting position); assignment[t] is the box of token t.
        """
        if not 1 <= b <= self.params.k:
            raise IllegalMove(f"box count {b} outside 1..{self.params.k}")
        n = len(self.tokens)
        for assign in itertools.product(range(b), repeat=n):
            boxes = [0] * b
            for t, x in enumerate(assign):
                boxes[x] |= 1 << t
            yield assign, self.classify(tuple(boxes))

    def initial_positions(self) -> dict[int, list[tuple[tuple[int, ...], Position]]]:
        """Player 1 picks the box count, then Player 2 assigns every token."""
        return {b: list(self.initial_assignments(b)) for b in range(1, self.params.k + 1)}

    def partitions(self, b: int) -> Iterator[tuple[int, ...]]:
        """Set partitions of the token universe into exactly ``b`` nonempty boxes.

        Restricted growth strings, so each unordered partition appears once.
        """
        n = len(self.tokens)
        boxes = [0] * b

        def rec(t, used):
            if n - t < b - used:
                return
            if t == n:
                yield tuple(boxes)
                return
            for x in range(min(used + 1, b)):
                boxes[x] |= 1 << t
                yield from rec(t + 1, max(used, x + 1))
                boxes[x] ^= 1 << t

        yield from rec(0, 0)

    # -- player 1 ----------------------------------------------------------

    def legal_p1_moves(self, pos: Position) -> list[Move]:
        if pos.phase != P1_TO_MOVE:
            raise IllegalMove(f"player 1 does not move in phase {pos.phase}")
        moves = [Move("remove", b) for b in range(len(pos.board))]
        if len(pos.board) < self.params.k:
            moves += [Move("split", b) for b in range(len(pos.board))]
        return moves

    def apply_p1(self, pos: Position, move: Move) -> Position:
        if move not in self.legal_p1_moves(pos):
            raise IllegalMove(f"{move} is not legal on {pos}")
        phase = P2_REMOVE if move.kind == "remove" else P2_SPLIT
        return Position(phase, pos.board, move.box)

    # -- remove ------------------------------------------------------------

    def covers(self, box: int, cmask: int) -> bool:
        return box & ~self._kill[cmask] == 0

    def legal_remove_responses(self, board, b: int) -> list[frozenset[Colour]]:
        """Every colour set covering box ``b``, including colours absent from it."""
        box = board[b]
        return [
            frozenset(self.colours_of(cs))
            for cs in range(len(self._kill))
            if self.covers(box, cs)
        ]

    def apply_remove(self, board, b: int, colours) -> Position:
        cmask = self.colour_set_mask(colours)
        if not self.covers(board[b], cmask):
            raise IllegalMove(f"colours {sorted(colours)} do not cover box {b}")
        return self.remove_by_kill(board, b, self._kill[cmask])

    def remove_by_kill(self, board, b: int, kill: int) -> Position:
        keep = ~kill
        return self.classify(tuple(m & keep for i, m in enumerate(board) if i != b))

    def distinct_remove_kills(self, box: int) -> list[int]:
        """Kill masks of covering colour sets, one per distinct token set removed."""
        return [km for km in self._distinct_kills if box & ~km == 0]

    # -- reintroduce -------------------------------------------------------

    def adjacent(self, c: Colour, d: Colour) -> bool:
        if c.coord != d.coord or c.value == d.value:
            return False
        if self.params.adjacency == "successor":
            return abs(c.value - d.value) == 1
        return True

    def reintroduce(self, board, c, d) -> tuple[int, ...]:
        c, d = Colour(*c), Colour(*d)
        ci, di = self.colour_index(c), self.colour_index(d)
        if not self.adjacent(c, d):
            raise IllegalMove(f"colours {tuple(c)} and {tuple(d)} are not adjacent")
        if any(m & self.colour_mask[di] for m in board):
            raise IllegalMove(f"colour {tuple(d)} is still on the board")
        return self._reintroduce(board, ci, di)

    def _reintroduce(self, board, ci: int, di: int) -> tuple[int, ...]:
        c, d = self.colours[ci], self.colours[di]
        shift = (d.value - c.value) * self.strides[c.coord]
        sel_mask = self.colour_mask[ci]
        out = []
        for m in board:
            sel = m & sel_mask
            out.append(m | (sel << shift if shift > 0 else sel >> -shift))
        return tuple(out)

    def reintro_steps(self, board) -> Iterator[tuple[int, int]]:
        """Legal (c, d) colour-index pairs that actually add tokens."""
        union = 0
        for m in board:
            union |= m
        for ci, c in enumerate(self.colours):
            if not union & self.colour_mask[ci]:
                continue
            for di, d in enumerate(self.colours):
                if d.coord == c.coord and not union & self.colour_mask[di] and self.adjacent(c, d):
                    yield ci, di

    def reintro_closure(self, board) -> dict[tuple[int, ...], tuple]:
        """Boards reachable by reintroduction chains, each with one witnessing chain.

        Chains that only reintroduce an absent colour from another absent
        colour change nothing and are omitted.
        """
        board = tuple(board)
        seen = {board: ()}
        frontier = [board]
        while frontier:
            nxt = []
            for bd in frontier:
                chain = seen[bd]
                for ci, di in self.reintro_steps(bd):
                    nb = self._reintroduce(bd, ci, di)
                    if nb not in seen:
                        seen[nb] = chain + (Reintro(self.colours[ci], self.colours[di]),)
                        nxt.append(nb)
            frontier = nxt
        return seen

    # -- split -------------------------------------------------------------

    def legal_split_responses(self, board, b: int) -> Iterator[tuple[tuple, int, int, Position]]:
        """(step chain, part 0, part 1, resulting position) for a split of box b.

        One representative chain per reachable post-chain board; every ordered
        bipartition of the post-chain box, including those leaving a side
        empty.  Under ``drop_on_split`` the chain may open with a :class:`Drop`.
        """
        if len(board) >= self.params.k:
            raise IllegalMove(f"cannot split with {len(board)} boxes and k={self.params.k}")
        if not 0 <= b < len(board):
            raise IllegalMove(f"no box {b}")
        starts = {tuple(board): ()}
        if self.params.drop_on_split:
            for km in self._distinct_kills:
                if not km:
                    continue
                dropped = tuple(m & ~km for m in board)
                if any(m == 0 for m in dropped):
                    yield (Drop(self._kill_colours[km]),), 0, 0, Position(P1_WIN, dropped)
                    continue
                starts.setdefault(dropped, (Drop(self._kill_colours[km]),))
        closures = {}
        for start, prefix in starts.items():
            for bd, chain in self.reintro_closure(start).items():
                closures.setdefault(bd, prefix + chain)
        for bd, chain in closures.items():
            box = bd[b]
            rest = bd[:b] + bd[b + 1:]
            sub = box
            while True:
                part0, part1 = sub, box ^ sub
                yield chain, part0, part1, self.classify(rest[:b] + (part0,) + rest[b:] + (part1,))
                if sub == 0:
                    break
                sub = (sub - 1) & box

    def apply_steps(self, board, chain) -> tuple[int, ...]:
        bd = tuple(board)
        for step in chain:
            if isinstance(step, Drop):
                if not self.params.drop_on_split:
                    raise IllegalMove("dropping colours needs the drop_on_split rule")
                km = self._kill[self.colour_set_mask(step.colours)]
                bd = tuple(m & ~km for m in bd)
            else:
                bd = self.reintroduce(bd, *step)
        return bd

    def apply_split(self, board, b: int, chain, part0: int, part1: int) -> Position:
        if len(board) >= self.params.k:
            raise IllegalMove(f"cannot split with {len(board)} boxes and k={self.params.k}")
        bd = self.apply_steps(board, chain)
        if any(m == 0 for m in bd):
            return Position(P1_WIN, bd)
        if part0 & part1 or part0 | part1 != bd[b]:
            raise IllegalMove("split parts must partition the box")
        rest = bd[:b] + bd[b + 1:]
        return self.classify(rest[:b] + (part0,) + rest[b:] + (part1,))

    def remove_responses_with_reintro(self, board, b: int) -> Iterator[tuple[tuple, int, Position]]:
        """(chain, kill mask, result) when reintroductions may precede a removal."""
        closure = self.reintro_closure(board) if self.params.reintro_on_remove else {tuple(board): ()}
        for bd, chain in closure.items():
            for km in self.distinct_remove_kills(bd[b]):
                yield chain, km, self.remove_by_kill(bd, b, km)


def check_disjoint(board) -> None:
    seen = 0
    for m in board:
        if seen & m:
            raise ValueError("a token appears in two boxes")
        seen |= m
