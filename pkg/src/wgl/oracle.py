"""Brute-force reference solver for the comparison game.

Deliberately naive and independent of :mod:`wgl.game`: tokens are tuples,
boxes are frozensets kept in order, nothing is canonicalised, responses are
enumerated without deduplication, and the winner comes from iterating the
attractor equations to a fixpoint.  Only usable on small parameter points.
"""
from __future__ import annotations

import itertools


class OracleTooLarge(RuntimeError):
    pass


def _colours_of(w):
    return {(i, x) for i, x in enumerate(w)}


class BruteForceGame:
    def __init__(self, k, factors, adjacency="any", reintro_on_remove=False,
                 drop_on_split=False, cap=100_000):
        self.k = k
        self.factors = tuple(factors)
        self.adjacency = adjacency
        self.reintro_on_remove = reintro_on_remove
        self.drop_on_split = drop_on_split
        self.cap = cap
        self.tokens = list(itertools.product(*(range(n) for n in self.factors)))
        self.colours = [(i, c) for i, n in enumerate(self.factors) for c in range(n)]

    # rules, restated from scratch

    def _outcome(self, boxes):
        boxes = tuple(boxes)
        if any(len(b) == 0 for b in boxes):
            return ("T1",)
        if not boxes:
            return ("T2",)
        return ("P1", boxes)

    def _reintro_boards(self, boxes):
        seen = {boxes}
        stack = [boxes]
        while stack:
            bd = stack.pop()
            present = set().union(*(_colours_of(w) for b in bd for w in b)) if bd else set()
            for (i, c) in self.colours:
                for (j, d) in self.colours:
                    if i != j or c == d or (i, d) in present:
                        continue
                    if self.adjacency == "successor" and abs(c - d) != 1:
                        continue
                    new = tuple(
                        b | frozenset(w[:i] + (d,) + w[i + 1:] for w in b if w[i] == c)
                        for b in bd
                    )
                    if new not in seen:
                        seen.add(new)
                        stack.append(new)
        return seen

    def _drops(self, boxes):
        out = [boxes]
        if self.drop_on_split:
            for r in range(1, len(self.colours) + 1):
                for cs in itertools.combinations(self.colours, r):
                    cs = set(cs)
                    out.append(tuple(frozenset(w for w in b if not _colours_of(w) & cs) for b in boxes))
        return out

    def successors(self, node):
        kind = node[0]
        if kind == "ROOT":
            return [("DIST", b) for b in range(1, self.k + 1)]
        if kind == "DIST":
            b = node[1]
            out = set()
            for assign in itertools.product(range(b), repeat=len(self.tokens)):
                boxes = [set() for _ in range(b)]
                for w, x in zip(self.tokens, assign):
                    boxes[x].add(w)
                out.add(self._outcome(frozenset(s) for s in boxes))
            return sorted(out, key=repr)
        if kind == "P1":
            boxes = node[1]
            out = [("RM", boxes, i) for i in range(len(boxes))]
            if len(boxes) < self.k:
                out += [("SP", boxes, i) for i in range(len(boxes))]
            return out
        if kind == "RM":
            _, boxes, i = node
            out = set()
            starts = self._reintro_boards(boxes) if self.reintro_on_remove else {boxes}
            for bd in starts:
                for r in range(len(self.colours) + 1):
                    for cs in itertools.combinations(self.colours, r):
                        cs = set(cs)
                        if all(_colours_of(w) & cs for w in bd[i]):
                            rest = [frozenset(w for w in b if not _colours_of(w) & cs)
                                    for j, b in enumerate(bd) if j != i]
                            out.add(self._outcome(rest))
            return sorted(out, key=repr)
        if kind == "SP":
            _, boxes, i = node
            out = set()
            for dropped in self._drops(boxes):
                if any(not b for b in dropped):
                    out.add(("T1",))
                    continue
                for bd in self._reintro_boards(dropped):
                    box = sorted(bd[i])
                    for bits in itertools.product((0, 1), repeat=len(box)):
                        b0 = frozenset(w for w, x in zip(box, bits) if x == 0)
                        b1 = frozenset(w for w, x in zip(box, bits) if x == 1)
                        new = list(bd)
                        new[i] = b0
                        new.append(b1)
                        out.add(self._outcome(new))
            return sorted(out, key=repr)
        return []

    def arena(self, root=("ROOT",)):
        succ = {}
        stack = [root]
        succ[root] = None
        while stack:
            node = stack.pop()
            ss = self.successors(node)
            succ[node] = ss
            for s in ss:
                if s not in succ:
                    succ[s] = None
                    stack.append(s)
                    if len(succ) > self.cap:
                        raise OracleTooLarge(f"more than {self.cap} raw states")
        return succ

    @staticmethod
    def owner(node):
        return "P1" if node[0] in ("ROOT", "P1", "T2") else "P2"

    def solve(self, root=("ROOT",)):
        """Return (winner, number of raw states) for play starting at ``root``."""
        succ = self.arena(root)
        win = {n for n in succ if n[0] == "T1"}
        changed = True
        while changed:
            changed = False
            for n, ss in succ.items():
                if n in win or not ss:
                    continue
                if self.owner(n) == "P1":
                    ok = any(s in win for s in ss)
                else:
                    ok = all(s in win for s in ss)
                if ok:
                    win.add(n)
                    changed = True
        return ("P1" if root in win else "P2"), len(succ)


def brute_force_winner(k, factors, **kw):
    return BruteForceGame(k, factors, **kw).solve()[0]
