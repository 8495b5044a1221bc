"""Finite-stage simulation of the priority construction that defeats a
candidate reduction of ``C_{#<=k+1}`` to ``Sort_k``.

Given a finite alpha over ``range(k)`` and a monotone table approximating the
candidate output functional Phi, :func:`run_stages` builds the trees
``T_0 <= T_1 <= ...`` together with the strategy states and markers, keeping
the whole history so that :func:`check_invariants` can audit every stage.

Binary strings are plain ``str`` over ``"01"``; alpha and table keys are
tuples of ints.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .sort_ops import u_partial_sort

# -- Phi as a finite table -----------------------------------------------------


def _is_prefix(a, b) -> bool:
    return len(a) <= len(b) and tuple(b[: len(a)]) == tuple(a)


@dataclass(frozen=True)
class PhiEntry:
    key: tuple[int, ...]
    output: str


class MonotoneTable:
    """Finitely many (input prefix, output) pairs, in a fixed order.

    ``value(q, s)`` is the stage-s approximation: the longest output among
    the first ``s`` entries whose key is a prefix of the query.
    """

    def __init__(self, entries=()):
        self.entries: list[PhiEntry] = []
        for e in entries:
            if not isinstance(e, PhiEntry):
                key, out = e
                e = PhiEntry(tuple(key), str(out))
            if set(e.output) - {"0", "1"}:
                raise ValueError(f"output {e.output!r} is not a binary string")
            self.entries.append(e)

    def __len__(self):
        return len(self.entries)

    def violations(self) -> list[str]:
        """Pairs breaking 'key1 <= key2 implies output1 <= output2'."""
        bad = []
        for i, a in enumerate(self.entries):
            for j, b in enumerate(self.entries):
                if i != j and _is_prefix(a.key, b.key) and not _is_prefix(a.output, b.output):
                    bad.append(f"entries {i} and {j}: key {_fmt(a.key)} <= {_fmt(b.key)} "
                               f"but output {a.output!r} is not a prefix of {b.output!r}")
        return bad

    def check(self):
        bad = self.violations()
        if bad:
            raise ValueError("inconsistent Phi table: " + bad[0])

    def value(self, prefix, tail: int, s: int) -> str:
        """Phi(prefix . tail^omega)[s]."""
        best = ""
        for e in self.entries[:s]:
            if len(e.output) > len(best) and _matches(e.key, prefix, tail):
                best = e.output
        return best

    # file format: JSON list of {"input": "0101", "tail": 1 | null, "output": "01"}

    @classmethod
    def from_json(cls, data) -> "MonotoneTable":
        if not isinstance(data, list):
            raise ValueError("Phi table must be a JSON list")
        entries = []
        for n, row in enumerate(data):
            try:
                key = tuple(int(c) for c in str(row["input"]))
                tail = row.get("tail")
                if tail is not None:
                    key += (int(tail),)
                entries.append(PhiEntry(key, str(row["output"])))
            except (KeyError, TypeError, ValueError) as e:
                raise ValueError(f"bad Phi table row {n}: {e}") from None
        table = cls(entries)
        table.check()
        return table

    def to_json(self) -> list[dict]:
        return [{"input": _fmt(e.key), "tail": None, "output": e.output} for e in self.entries]


def _matches(key, prefix, tail) -> bool:
    n = len(prefix)
    return all((prefix[i] if i < n else tail) == c for i, c in enumerate(key))


def _fmt(seq) -> str:
    return "".join(map(str, seq))


def random_table(k: int, rng: random.Random, alpha=None, size: int | None = None,
                 max_len: int = 12) -> MonotoneTable:
    """Random consistent table whose keys look like partial sorts plus a tail.

    Keys are generated first; each output extends the output of the longest
    proper prefix key by zero to two bits, which keeps the table monotone.
    Entry order is shuffled afterwards (order only affects staging).
    """
    size = size if size is not None else rng.randint(0, 40)
    keys = set()
    for _ in range(size):
        u = rng.randrange(k)
        if alpha is not None and rng.random() < 0.7:
            cut = rng.randint(0, len(alpha))
            body = list(u_partial_sort(alpha[:cut], u))
        else:
            body = sorted(rng.randrange(u) for _ in range(rng.randint(0, 4))) if u else []
        key = body + [u] * rng.randint(0, 3)
        if rng.random() < 0.1:
            key.append(rng.randrange(k))
        keys.add(tuple(key[:max_len]))
    outputs: dict[tuple, str] = {}
    for key in sorted(keys, key=len):
        parent = max((p for p in outputs if _is_prefix(p, key)), key=len, default=None)
        base = outputs[parent] if parent is not None else ""
        outputs[key] = base + "".join(rng.choice("01") for _ in range(rng.choice((0, 1, 1, 2))))
    entries = [PhiEntry(key, out) for key, out in outputs.items()]
    rng.shuffle(entries)
    return MonotoneTable(entries)


# -- trees ---------------------------------------------------------------------


def extendible(tree: frozenset[str], height: int, node: str) -> bool:
    """``node`` lies below some leaf of full height."""
    if len(node) > height or node not in tree:
        return False
    return any(len(t) == height and t.startswith(node) for t in tree)


def extendible_leaves(tree, height) -> list[str]:
    return sorted(t for t in tree if len(t) == height)


def _leftmost_leaf_above(tree, height, node) -> str:
    return min(t for t in tree if len(t) == height and t.startswith(node))


# -- the construction ----------------------------------------------------------


@dataclass
class StageRecord:
    stage: int
    tree: frozenset[str]
    states: tuple[int, ...]
    markers: tuple[str | None, ...]

    def to_json(self) -> dict:
        return {
            "stage": self.stage,
            "tree": sorted(self.tree, key=lambda t: (len(t), t)),
            "states": list(self.states),
            "markers": list(self.markers),
        }


@dataclass
class ConstructionState:
    """Result of a run: the final stage plus the full history and action log."""

    k: int
    alpha: tuple[int, ...]
    phi: MonotoneTable
    history: list[StageRecord]
    events: list[dict] = field(default_factory=list)

    @property
    def stage(self) -> int:
        return self.history[-1].stage

    @property
    def tree(self) -> frozenset[str]:
        return self.history[-1].tree

    @property
    def states(self) -> tuple[int, ...]:
        return self.history[-1].states

    @property
    def markers(self) -> tuple[str | None, ...]:
        return self.history[-1].markers

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "alpha": _fmt(self.alpha),
            "history": [r.to_json() for r in self.history],
            "events": self.events,
        }


def run_stages(k: int, alpha, phi: MonotoneTable, stages: int) -> ConstructionState:
    alpha = tuple(int(a) for a in alpha)
    if k < 1:
        raise ValueError("k must be at least 1")
    if any(not 0 <= a < k for a in alpha):
        raise ValueError(f"alpha has a symbol outside range({k})")
    if not 0 <= stages <= len(alpha):
        raise ValueError(f"stage count {stages} must lie in [0, len(alpha)={len(alpha)}]")
    phi.check()

    # T_0 is the tree holding only the root, so that it has height 0 and one
    # extendible leaf; rho_0 starts as the root
    tree = frozenset({""})
    states = [0] * k
    rho: list[str | None] = [""] + [None] * (k - 1)
    history = [StageRecord(0, tree, tuple(states), tuple(rho))]
    events: list[dict] = []

    for s in range(stages):
        old_rho = list(rho)
        for u in range(k):
            now = u_partial_sort(alpha[: s + 1], u)
            before = u_partial_sort(alpha[:s], u)
            if now != before:
                states[u] = 0
                rho[u] = None
                events.append({"stage": s + 1, "strategy": u, "step": "1"})
                continue
            out = phi.value(before, u, s)
            if states[u] == 0:
                # (2): an extendible node not below any higher-priority marker
                ok = extendible(tree, s, out) and not any(
                    old_rho[v] is not None and _is_prefix(out, old_rho[v]) for v in range(u)
                )
                if ok:
                    rho[u] = _leftmost_leaf_above(tree, s, out)
                    states[u] = 1
                    _injure(states, rho, u)
                    events.append({"stage": s + 1, "strategy": u, "step": "2a",
                                   "query": out, "marker": rho[u]})
                    break
            elif states[u] == 1:
                # (3): Phi has committed to one side of the branch at rho_u
                side = next((i for i in (0, 1)
                             if out.startswith(rho[u] + str(i)) and extendible(tree, s, out)), None)
                if side is not None:
                    rho[u] = rho[u] + str(1 - side)
                    states[u] = 2
                    _injure(states, rho, u)
                    events.append({"stage": s + 1, "strategy": u, "step": "3a",
                                   "query": out, "marker": rho[u]})
                    break

        tree = _grow(tree, s, states, rho)
        history.append(StageRecord(s + 1, tree, tuple(states), tuple(rho)))

    return ConstructionState(k, alpha, phi, history, events)


def _injure(states, rho, u):
    for v in range(u + 1, len(states)):
        states[v] = 0
        rho[v] = None


def _grow(tree, s, states, rho) -> frozenset[str]:
    """T_{s+1} = T_s plus one full-height node per leaf of T*_{s+1}."""
    tops = set()
    for u, st in enumerate(states):
        if st == 1:
            tops.update((rho[u] + "0", rho[u] + "1"))
        elif st == 2:
            tops.add(rho[u])
    if states[0] == 0:
        # only before S_0 first acts; keeps the root alive
        tops.add(rho[0])
    star = {t[:i] for t in tops for i in range(len(t) + 1)}
    leaves = [t for t in star if not any(o != t and o.startswith(t) for o in star)]
    new = set()
    for leaf in leaves:
        if len(leaf) == s + 1:
            new.add(leaf)
        else:
            new.add(_leftmost_leaf_above(tree, s, leaf) + "0")
    return tree | frozenset(new)


# -- auditing ------------------------------------------------------------------


def check_invariants(cs: ConstructionState, k: int | None = None) -> list[str]:
    """Every violated stage-wise condition, as readable messages (empty if none)."""
    k = cs.k if k is None else k
    out: list[str] = []
    hist = cs.history
    acted = {}
    for e in cs.events:
        acted.setdefault(e["stage"], []).append(e)

    for rec in hist:
        s, tree = rec.stage, rec.tree
        if any(t[:-1] not in tree for t in tree if t):
            out.append(f"stage {s}: tree is not downward closed")
        height = max(map(len, tree), default=-1)
        if height != s:
            out.append(f"stage {s}: height {height}, expected {s}")
        leaves = extendible_leaves(tree, s)
        if not 1 <= len(leaves) <= k + 1:
            out.append(f"stage {s}: (I) {len(leaves)} extendible leaves, allowed 1..{k + 1}")
        if rec.markers[0] is None:
            out.append(f"stage {s}: rho_0 undefined")
        for u in range(k):
            st, r = rec.states[u], rec.markers[u]
            if st == 1 and (r is None or not all(extendible(tree, s, r + i) for i in "01")):
                out.append(f"stage {s}: strategy {u} in state 1 without two extendible children")
            if st == 2 and (r is None or not extendible(tree, s, r)):
                out.append(f"stage {s}: strategy {u} in state 2 with non-extendible marker")
        marks = {r for r in rec.markers if r is not None}
        for node in tree:
            if (extendible(tree, s, node + "0") and extendible(tree, s, node + "1")
                    and node not in marks):
                out.append(f"stage {s}: branching extendible node {node!r} is not a marker")

    for prev, rec in zip(hist, hist[1:]):
        s = prev.stage
        for t in rec.tree - prev.tree:
            if len(t) != s + 1 or not extendible(prev.tree, s, t[:-1]):
                out.append(f"stage {s + 1}: (II) new node {t!r} does not extend an extendible leaf")
        for e in acted.get(s + 1, ()):
            u = e["strategy"]
            if e["step"] in ("2a", "3a"):
                lower = range(u + 1, k)
                if any(rec.states[v] != 0 or rec.markers[v] is not None for v in lower):
                    out.append(f"stage {s + 1}: strategy {u} acted but a lower strategy survived")
            if e["step"] == "1" and (u_partial_sort(cs.alpha[: s + 1], u)
                                     == u_partial_sort(cs.alpha[:s], u)):
                out.append(f"stage {s + 1}: strategy {u} initialised without a partial-sort change")
        for u in range(k):
            if rec.states[u] != 2:
                continue
            q = u_partial_sort(cs.alpha[: s + 1], u)
            val = cs.phi.value(q, u, s + 1)[: s + 1]
            if extendible(rec.tree, s + 1, val):
                out.append(f"stage {s + 1}: strategy {u} in state 2 but Phi value {val!r} "
                           f"is extendible")
    return out


def dumps(cs: ConstructionState) -> str:
    return json.dumps(cs.to_json(), indent=2, sort_keys=True)
