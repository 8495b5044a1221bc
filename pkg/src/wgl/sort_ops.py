"""Sorting eventually-constant streams, and the reductions built around it.

A :class:`FinSeq` is ``prefix . tail^omega`` over the alphabet ``range(d)``.
On such streams sorting is exactly computable, so each reduction below can
be checked extensionally against :func:`sort_d`.
"""
from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence


@dataclass(frozen=True)
class FinSeq:
    d: int
    prefix: tuple[int, ...]
    tail: int

    def __post_init__(self):
        prefix = tuple(int(x) for x in self.prefix)
        if self.d < 1:
            raise ValueError(f"alphabet size must be >= 1, got {self.d}")
        if not 0 <= self.tail < self.d or any(not 0 <= x < self.d for x in prefix):
            raise ValueError(f"symbol outside alphabet of size {self.d}")
        # strip trailing copies of the tail so equality is extensional
        n = len(prefix)
        while n and prefix[n - 1] == self.tail:
            n -= 1
        object.__setattr__(self, "prefix", prefix[:n])

    def __getitem__(self, i: int) -> int:
        return self.prefix[i] if i < len(self.prefix) else self.tail

    def take(self, n: int) -> tuple[int, ...]:
        return tuple(self[i] for i in range(n))

    def __str__(self):
        return encode(self)


def encode(x: FinSeq) -> str:
    """Text form ``prefix|tail``; symbols joined by commas once d > 10."""
    if x.d <= 10:
        return "".join(map(str, x.prefix)) + "|" + str(x.tail)
    return ",".join(map(str, x.prefix)) + "|" + str(x.tail)


def decode(text: str, d: int) -> FinSeq:
    try:
        pre, tail = text.split("|")
        if d <= 10:
            prefix = [int(c) for c in pre.strip()]
        else:
            prefix = [int(c) for c in pre.split(",") if c.strip()]
        return FinSeq(d, tuple(prefix), int(tail))
    except ValueError as e:
        raise ValueError(f"cannot parse {text!r} as prefix|tail over {d} symbols: {e}") from None


def sort_d(x: FinSeq) -> FinSeq:
    """0^c0 1^c1 ... t^omega where t is the least symbol occurring infinitely often."""
    counts = Counter(s for s in x.prefix if s < x.tail)
    out = []
    for s in range(x.tail):
        out += [s] * counts[s]
    return FinSeq(x.d, tuple(out), x.tail)


def u_partial_sort(eta: Sequence[int], u: int) -> tuple[int, ...]:
    """Symbols of ``eta`` below ``u`` in increasing order, with multiplicity."""
    counts = Counter(eta)
    return tuple(s for s in range(u) for _ in range(counts[s]))


def strip_zeros_decrement(x: FinSeq) -> tuple[FinSeq, int]:
    """Delete the (finitely many) zeros and lower every other symbol by one."""
    if x.tail == 0:
        raise ValueError("stream has infinitely many zeros")
    if x.d < 2:
        raise ValueError("need at least two symbols")
    y = FinSeq(x.d - 1, tuple(s - 1 for s in x.prefix if s), x.tail - 1)
    return y, sum(1 for s in x.prefix if s == 0)


def restore_zeros(sorted_y: FinSeq, zeros: int) -> FinSeq:
    """Inverse bookkeeping: prepend the zeros and shift the sorted stream up."""
    return FinSeq(sorted_y.d + 1, (0,) * zeros + tuple(s + 1 for s in sorted_y.prefix),
                  sorted_y.tail + 1)


# -- binary product translation ----------------------------------------------


def product_translate(n: int, x: FinSeq) -> list[FinSeq]:
    """Split a stream over n+1 symbols into n binary streams.

    Component i marks with 0 the positions holding a symbol <= i.
    """
    if x.d != n + 1:
        raise ValueError(f"expected a stream over {n + 1} symbols, got {x.d}")
    return [
        FinSeq(2, tuple(0 if s <= i else 1 for s in x.prefix), 0 if x.tail <= i else 1)
        for i in range(n)
    ]


def product_recombine(sorted_parts: Sequence[FinSeq]) -> FinSeq:
    """Rebuild the sorted stream from the sorted binary components.

    Sorted component i is 0^m 1^omega with m = #{symbols <= i}, or 0^omega
    once symbol i occurs infinitely often.
    """
    n = len(sorted_parts)
    least = n
    for i, p in enumerate(sorted_parts):
        if p.tail == 0:
            least = i
            break
    out = []
    below = 0
    for i in range(least):
        upto = len(sorted_parts[i].prefix)
        out += [i] * (upto - below)
        below = upto
    return FinSeq(n + 1, tuple(out), least)


# -- graphs and connected components -----------------------------------------


@dataclass
class GraphInstance:
    """Finite segment 0..size-1 of a graph with at most ``bound`` components."""

    size: int
    active: frozenset[int]
    edges: frozenset[tuple[int, int]]
    bound: int

    def __post_init__(self):
        self.active = frozenset(self.active)
        self.edges = frozenset((min(a, b), max(a, b)) for a, b in self.edges)
        if any(not 0 <= v < self.size for v in self.active):
            raise ValueError("active vertex outside the segment")
        for a, b in self.edges:
            if a not in self.active or b not in self.active:
                raise ValueError(f"edge {(a, b)} touches an inactive vertex")

    @classmethod
    def from_edge_list(cls, text: str) -> "GraphInstance":
        """Parse ``size N`` / ``bound n`` / ``active v...`` / ``a b`` lines.

        ``#`` starts a comment.  Without an ``active`` line every vertex of
        the segment is active.
        """
        size = bound = None
        active = None
        edges = []
        for line in text.splitlines():
            line = line.split("#")[0].strip()
            if not line:
                continue
            head, *rest = line.split()
            try:
                if head == "size":
                    size = int(rest[0])
                elif head == "bound":
                    bound = int(rest[0])
                elif head == "active":
                    active = {int(v) for v in rest}
                else:
                    (other,) = rest
                    edges.append((int(head), int(other)))
            except (ValueError, IndexError):
                raise ValueError(f"bad edge-list line: {line!r}") from None
        if size is None or bound is None:
            raise ValueError("edge list needs 'size' and 'bound' lines")
        if active is None:
            active = set(range(size))
        return cls(size, frozenset(active), frozenset(edges), bound)

    def to_edge_list(self) -> str:
        lines = [f"size {self.size}", f"bound {self.bound}",
                 "active " + " ".join(map(str, sorted(self.active)))]
        lines += [f"{a} {b}" for a, b in sorted(self.edges)]
        return "\n".join(lines) + "\n"


def connected(g: GraphInstance, a: int, b: int) -> bool:
    """Breadth-first path search from a to b."""
    if a == b:
        return True
    adj: dict[int, list[int]] = {}
    for x, y in g.edges:
        adj.setdefault(x, []).append(y)
        adj.setdefault(y, []).append(x)
    seen = {a}
    queue = deque([a])
    while queue:
        v = queue.popleft()
        for w in adj.get(v, ()):
            if w == b:
                return True
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return False


class ComponentBoundError(ValueError):
    pass


def _subsets(g: GraphInstance, i: int):
    return list(itertools.combinations(sorted(g.active), i))


def _independent(g: GraphInstance, vs) -> bool:
    return not any(connected(g, a, b) for a, b in itertools.combinations(vs, 2))


def fcc_to_sort(g: GraphInstance) -> tuple[FinSeq, Callable[[FinSeq], dict[int, bool]]]:
    """Encode a component-finding instance as a sorting instance.

    For each i = 2..n, the enumeration step l writes the symbol i-2 while none
    of the first l+1 i-element subsets is independent (pairwise disconnected).
    A filler n-1 follows every enumeration step.  Returns the sorting input
    and a decoder taking the sorted stream to the characteristic function of
    vertex 0's component on the active vertices.
    """
    n = g.bound
    if n < 2:
        raise ValueError("component bound must be at least 2")
    if 0 not in g.active:
        raise ValueError("vertex 0 must be active")
    if len(g.active) > n and any(_independent(g, vs) for vs in _subsets(g, n + 1)):
        raise ComponentBoundError(f"graph has more than {n} components")
    first = {}
    for i in range(2, n + 1):
        for j, vs in enumerate(_subsets(g, i)):
            if _independent(g, vs):
                first[i] = j
                break
    components = 1 + len(first)
    steps = max(first.values(), default=-1) + 1
    prefix = []
    for l in range(steps):
        for i in range(2, n + 1):
            if i not in first or l < first[i]:
                prefix.append(i - 2)
        prefix.append(n - 1)
    # past this point the true stream keeps cycling through the symbols i-2
    # (i > components) and the filler; only the least of them matters to the
    # sorted output, so it becomes the constant tail
    tail = components - 1 if components < n else n - 1
    sort_input = FinSeq(n, tuple(prefix), tail)

    def decode_component(sorted_q: FinSeq) -> dict[int, bool]:
        return fcc_decode(g, sorted_q)

    return sort_input, decode_component


def fcc_decode(g: GraphInstance, q: FinSeq) -> dict[int, bool]:
    """Read the sorted stream 0^l2 1^l3 ... (m-1)^omega back into a component.

    Block length l_i indexes the first independent i-set; the one for i = m
    holds a representative of every component, and a vertex is in 0's
    component iff a path links it to the representative that 0 reaches.
    """
    m = q.tail + 1
    if m == 1:
        return {v: True for v in sorted(g.active)}
    counts = Counter(q.prefix)
    reps = _subsets(g, m)[counts[m - 2]]
    anchor = next(r for r in reps if connected(g, 0, r))
    return {v: connected(g, anchor, v) for v in sorted(g.active)}


# -- Sort <= FCC --------------------------------------------------------------


class SortGraph:
    """Graph encoding a binary stream, built up to a finite horizon.

    Odd vertices all hang off 0.  The pending even vertex (initially 2) stands
    for the next zero not yet read.  Reading the symbol at time t >= 2: a 0
    links 2t+1 to the pending vertex and makes 2t the new pending one; a 1
    links 2t+1 to 2t.

    The horizon covers the prefix and two tail symbols.  Past the prefix the
    stream is constant, so the construction repeats the same step forever
    and the answer is already decided: with tail 1 the pending vertex stays
    unlinked, with tail 0 it is linked at the first tail read.
    """

    def __init__(self, x: FinSeq):
        if x.d != 2:
            raise ValueError("binary streams only")
        self.x = x
        self.horizon = len(x.prefix) + 4
        self.adj: dict[int, set[int]] = {}
        self._link(0, 1)
        self._link(0, 3)
        pending = 2
        for t in range(2, self.horizon):
            self._link(0, 2 * t + 1)
            if x[t - 2] == 0:
                self._link(2 * t + 1, pending)
                pending = 2 * t
            else:
                self._link(2 * t + 1, 2 * t)
        self.pending = pending

    def _link(self, a, b):
        self.adj.setdefault(a, set()).add(b)
        self.adj.setdefault(b, set()).add(a)

    def vertices(self) -> range:
        return range(2 * self.horizon)

    def component(self, v: int) -> set[int]:
        seen = {v}
        queue = deque([v])
        while queue:
            u = queue.popleft()
            for w in self.adj.get(u, ()):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return seen


def fcc_solve(graph: SortGraph, pick_zero: bool = True) -> set[int]:
    """An FCC answer on the truncated graph: 0's component or its complement."""
    comp = graph.component(0)
    if pick_zero:
        return comp
    return set(graph.vertices()) - comp


def sort_via_fcc(x: FinSeq, pick_zero: bool = True) -> FinSeq:
    """Sort a binary stream through one component query on :class:`SortGraph`.

    Follows the chain of pending vertices: each one inside 0's component is
    one more output 0, and the first one outside starts 1^omega.  A zero read
    past the prefix means the tail is 0 and the rest of the output is 0^omega.
    """
    g = SortGraph(x)
    comp = fcc_solve(g, pick_zero)
    if 0 not in comp:
        comp = set(g.vertices()) - comp
    out = []
    pending = 2
    while pending in comp:
        out.append(0)
        # a linked pending vertex has exactly one odd neighbour 2t+1, added
        # when the zero at time t was read; 2t is the next pending vertex
        t = next((w - 1) // 2 for w in g.adj[pending] if w % 2)
        if t - 2 >= len(x.prefix):
            return FinSeq(2, tuple(out), 0)
        pending = 2 * t
    return FinSeq(2, tuple(out), 1)


# -- one-dimensional convex choice --------------------------------------------


def rationals01() -> Iterable[Fraction]:
    """0, 1, 1/2, 1/3, 2/3, 1/4, 3/4, ... (each rational in [0,1] once)."""
    yield Fraction(0)
    yield Fraction(1)
    q = 2
    while True:
        for p in range(1, q):
            if Fraction(p, q).denominator == q:
                yield Fraction(p, q)
        q += 1


def _check_nested(intervals) -> list[tuple[Fraction, Fraction]]:
    ivs = [(Fraction(a), Fraction(b)) for a, b in intervals]
    if not ivs:
        raise ValueError("empty interval stream")
    for s, (a, b) in enumerate(ivs):
        if not 0 <= a <= b <= 1:
            raise ValueError(f"interval {s} is not a nonempty subinterval of [0,1]")
        if s and not (ivs[s - 1][0] <= a and b <= ivs[s - 1][1]):
            raise ValueError(f"interval {s} is not nested in interval {s - 1}")
    return ivs


def xc1_via_sort(intervals) -> tuple[FinSeq, Callable[[FinSeq], list[Fraction]]]:
    """Encode a shrinking interval stream as a binary sorting instance.

    At each stage the current rational point is tested against the current
    interval; a confirmed exclusion writes 0 and moves on to the next
    rational.  A filler 1 is written at every stage.  After the last given
    stage the interval is taken as fixed, so the search ends at a rational
    inside it.  The decoder returns one approximation per given stage.
    """
    ivs = _check_nested(intervals)
    qs = iter(rationals01())
    q = next(qs)
    prefix = []
    s = 0
    while True:
        a, b = ivs[min(s, len(ivs) - 1)]
        if not a <= q <= b:
            prefix.append(0)
            q = next(qs)
        elif s >= len(ivs):
            break
        prefix.append(1)
        s += 1
    sort_input = FinSeq(2, tuple(prefix), 1)

    def decode_points(sorted_q: FinSeq) -> list[Fraction]:
        return xc1_decode(ivs, sorted_q)

    return sort_input, decode_points


def xc1_decode(intervals, sorted_q: FinSeq) -> list[Fraction]:
    """Approximations per stage: midpoints while reading 0s, then the pinned rational."""
    ivs = _check_nested(intervals)
    qs = iter(rationals01())
    pinned = None
    out = []
    for s, (a, b) in enumerate(ivs):
        if pinned is None:
            q = next(qs)
            if sorted_q[s] == 1:
                # exactly s exclusions happened, so the s-th rational survives
                pinned = q
        out.append(pinned if pinned is not None else (a + b) / 2)
    return out
