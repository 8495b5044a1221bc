"""Sweep k = 1..K over 1..M factors of 2 and report against the stated bounds.

    python3 scripts/frontier_report.py [--k-max 4] [--m-max 3] [--out report.md]
"""
from __future__ import annotations

import argparse
import time

from wgl import frontier
from wgl.solver import SolverConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k-max", type=int, default=4)
    ap.add_argument("--m-max", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out")
    args = ap.parse_args()
    t0 = time.perf_counter()
    res, table = frontier.run(args.k_max, args.m_max, SolverConfig(threads=args.threads))
    text = frontier.render(res, table)
    text += f"\nSweep time: {time.perf_counter() - t0:.1f} s\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(text)


if __name__ == "__main__":
    main()
