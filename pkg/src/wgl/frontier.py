"""Compare a computed winner table for factors of 2 with the two stated bounds.

The bounds are phrased with an index l for parameters n_0, ..., n_l.  With
m factors that index is m - 1 if read literally, or m if l is taken to count
the factors; both readings are evaluated.
"""
from __future__ import annotations

from dataclasses import dataclass

from .solver import P1, P2, SweepResult, sweep

CONVENTIONS = {
    "l = #factors - 1": lambda m: m - 1,
    "l = #factors": lambda m: m,
}


@dataclass
class ClaimCheck:
    convention: str
    claim: str
    predicted: str
    agree: list[tuple[int, int]]     # (k, m) points where the claim applies and holds
    disagree: list[tuple[int, int]]  # points where it applies and fails
    silent: list[tuple[int, int]]    # points where it makes no prediction


def _applies(claim: str, k: int, ell: int) -> bool:
    if claim == "P2 if k+1 <= l":
        return k + 1 <= ell
    return k + 1 >= 2 ** (ell - 1)


def check_claims(table: dict[tuple[int, int], str]) -> list[ClaimCheck]:
    """``table`` maps (k, number of factors) to the computed winner."""
    out = []
    for name, index in CONVENTIONS.items():
        for claim, predicted in (("P2 if k+1 <= l", P2), ("P1 if k+1 >= 2^(l-1)", P1)):
            chk = ClaimCheck(name, claim, predicted, [], [], [])
            for (k, m), winner in sorted(table.items()):
                if not _applies(claim, k, index(m)):
                    chk.silent.append((k, m))
                elif winner == predicted:
                    chk.agree.append((k, m))
                else:
                    chk.disagree.append((k, m))
            out.append(chk)
    return out


def frontier(table: dict[tuple[int, int], str]) -> dict[int, int]:
    """Largest k won by Player 2, per number of factors (0 if none)."""
    best: dict[int, int] = {}
    for (k, m), w in table.items():
        best.setdefault(m, 0)
        if w == P2:
            best[m] = max(best[m], k)
    return dict(sorted(best.items()))


def run(k_max: int = 4, m_max: int = 3, config=None) -> tuple[SweepResult, dict]:
    res = sweep(range(1, k_max + 1), [(2,) * m for m in range(1, m_max + 1)], config)
    table = {(r.k, len(r.factors)): r.winner for r in res.rows if r.winner}
    return res, table


def render(res: SweepResult, table: dict, checks: list[ClaimCheck] | None = None) -> str:
    checks = checks if checks is not None else check_claims(table)
    ks = sorted({k for k, _ in table})
    ms = sorted({m for _, m in table})
    lines = ["# Winner table, all factors equal to 2", ""]
    lines.append("| k | " + " | ".join(f"{m} factor{'s' * (m > 1)}" for m in ms) + " |")
    lines.append("|---" * (len(ms) + 1) + "|")
    for k in ks:
        lines.append(f"| {k} | " + " | ".join(table.get((k, m), "?") for m in ms) + " |")
    lines.append("")
    lines.append("Player 2 frontier (largest k won by Player 2): "
                 + ", ".join(f"{m} factor(s): k <= {kk}" for m, kk in frontier(table).items()))
    lines.append("")
    lines.append("Monotonicity flags: " + ("none" if not res.flags else "; ".join(res.flags)))
    errors = [r for r in res.rows if r.winner is None]
    if errors:
        lines.append("Resource errors: " + "; ".join(f"k={r.k} {list(r.factors)}: {r.error}"
                                                     for r in errors))
    lines.append("")
    for conv in CONVENTIONS:
        lines.append(f"## Convention {conv}")
        lines.append("")
        for chk in (c for c in checks if c.convention == conv):
            verdict = "matches" if not chk.disagree else "CONTRADICTED"
            lines.append(f"- `{chk.claim}`: {verdict}; applies at {len(chk.agree) + len(chk.disagree)} "
                         f"point(s), agrees at {_pts(chk.agree)}, disagrees at {_pts(chk.disagree)}")
        lines.append("")
    return "\n".join(lines)


def _pts(points) -> str:
    return ", ".join(f"(k={k}, m={m})" for k, m in points) or "none"
