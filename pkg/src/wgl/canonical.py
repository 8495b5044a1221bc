"""Symmetry reduction for comparison-game positions.

The game is invariant under relabelling boxes, permuting the values of a
coordinate, and swapping coordinates of equal size.  Box relabelling is
handled by sorting; the token-level group is enumerated explicitly and the
lexicographically least image is the canonical representative.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .game import (
    P1_TO_MOVE,
    P2_REMOVE,
    P2_SPLIT,
    ComparisonGame,
    GameParams,
    Position,
)


def value_permutations(n: int, adjacency: str) -> list[tuple[int, ...]]:
    if adjacency == "successor":
        # adjacency |c - d| = 1 is only preserved by identity and reversal
        return sorted({tuple(range(n)), tuple(reversed(range(n)))})
    return list(itertools.permutations(range(n)))


def coordinate_permutations(factors) -> list[tuple[int, ...]]:
    m = len(factors)
    return [
        p for p in itertools.permutations(range(m))
        if all(factors[p[i]] == factors[i] for i in range(m))
    ]


@dataclass
class SymmetryGroup:
    """Token permutations induced by value and coordinate relabellings.

    ``perms[g][t]`` is the image of token index t under element g.  Box
    permutations are implicit (the full symmetric group).
    """

    game: ComparisonGame
    enabled: bool = True
    perms: list[tuple[int, ...]] = field(init=False)

    def __post_init__(self):
        g = self.game
        f = g.params.factors
        if not self.enabled:
            self.perms = [tuple(range(len(g.tokens)))]
        else:
            vals = [value_permutations(n, g.params.adjacency) for n in f]
            seen = set()
            for cp in coordinate_permutations(f):
                for vp in itertools.product(*vals):
                    perm = []
                    for w in g.tokens:
                        img = [0] * len(f)
                        for i, x in enumerate(w):
                            img[cp[i]] = vp[i][x]
                        perm.append(g.token_index(img))
                    seen.add(tuple(perm))
            ident = tuple(range(len(g.tokens)))
            seen.discard(ident)
            self.perms = [ident] + sorted(seen)
        self._tables = [self._byte_tables(p) for p in self.perms]

    def __len__(self):
        return len(self.perms)

    @staticmethod
    def _byte_tables(perm) -> list[list[int]]:
        tables = []
        for base in range(0, len(perm), 8):
            tab = [0] * 256
            for byte in range(1, 256):
                low = byte & -byte
                bit = low.bit_length() - 1
                img = 1 << perm[base + bit] if base + bit < len(perm) else 0
                tab[byte] = tab[byte ^ low] | img
            tables.append(tab)
        return tables

    def map_mask(self, g: int, mask: int) -> int:
        out = 0
        for tab in self._tables[g]:
            if not mask:
                break
            out |= tab[mask & 0xFF]
            mask >>= 8
        return out

    def apply(self, g: int, pos: Position, box_perm=None) -> Position:
        """Image of ``pos`` under token element g and an explicit box permutation.

        ``box_perm[i]`` is the new index of box i.  The distinguished box of a
        response phase follows its box.
        """
        board = [self.map_mask(g, m) for m in pos.board]
        if box_perm is None:
            return Position(pos.phase, tuple(board), pos.box)
        out = [0] * len(board)
        for i, m in enumerate(board):
            out[box_perm[i]] = m
        box = None if pos.box is None else box_perm[pos.box]
        return Position(pos.phase, tuple(out), box)

    # -- canonical forms -------------------------------------------------

    def canonical(self, pos: Position) -> Position:
        """Least image of ``pos`` under the group; used as its hashable key.

        Response phases put the distinguished box first and sort the rest.
        """
        phase = pos.phase
        if phase == P1_TO_MOVE:
            if not self.enabled:
                return pos
            best = None
            for g in range(len(self.perms)):
                img = tuple(sorted(self.map_mask(g, m) for m in pos.board))
                if best is None or img < best:
                    best = img
            return Position(phase, best)
        if phase in (P2_REMOVE, P2_SPLIT):
            if not self.enabled:
                return pos
            b = pos.box
            others = pos.board[:b] + pos.board[b + 1:]
            best = None
            for g in range(len(self.perms)):
                img = (self.map_mask(g, pos.board[b]),) + tuple(
                    sorted(self.map_mask(g, m) for m in others)
                )
                if best is None or img < best:
                    best = img
            return Position(phase, best, 0)
        return Position(phase)

    def canonical_exhaustive(self, pos: Position) -> Position:
        """Same as :meth:`canonical` but by brute force over all box orders."""
        if pos.phase not in (P1_TO_MOVE, P2_REMOVE, P2_SPLIT):
            return Position(pos.phase)
        if not self.enabled:
            return pos
        n = len(pos.board)
        best = None
        for g in range(len(self.perms)):
            for order in itertools.permutations(range(n)):
                if pos.box is not None and order[0] != pos.box:
                    continue
                img = tuple(self.map_mask(g, pos.board[i]) for i in order)
                if best is None or img < best:
                    best = img
        box = None if pos.phase == P1_TO_MOVE else 0
        return Position(pos.phase, best, box)


def symmetry_group(params: GameParams, enabled: bool = True) -> SymmetryGroup:
    return SymmetryGroup(ComparisonGame(params), enabled)
