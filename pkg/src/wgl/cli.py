"""Command-line entry point: ``wgl solve|sweep|witness|sort|diag``.

Exit codes: 0 success, 1 malformed arguments or invalid input (including a
diagonalizer run whose invariant report is not clean), 2 resource limit hit
(partial statistics are still printed).

Defaults come from :class:`Config`; a JSON file named by the ``WGL_CONFIG``
environment variable overrides them, and explicit flags override both.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import random
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import diagonalizer, sort_ops, witness
from .game import ADJACENCY_MODES, ComparisonGame, GameParams
from .solver import (
    ResourceLimit,
    SolverConfig,
    arena_dot,
    result_json,
    solve,
    sweep,
)

FORMATS = ("json", "csv", "dot", "text")


@dataclass
class Config:
    adjacency: str = "any"
    reintro_on_remove: bool = False
    drop_on_split: bool = False
    symmetry: bool = True
    node_cap: int = 10_000_000
    time_cap_ms: int = 600_000
    threads: int = 1
    format: str | None = None  # None: json for solve, csv for sweep

    def validate(self):
        if self.adjacency not in ADJACENCY_MODES:
            raise ValueError(f"adjacency must be one of {ADJACENCY_MODES}")
        if self.node_cap <= 0 or self.time_cap_ms <= 0 or self.threads <= 0:
            raise ValueError("node cap, time cap and thread count must be positive")
        if self.format is not None and self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")

    def solver_config(self) -> SolverConfig:
        return SolverConfig(self.symmetry, self.node_cap, self.time_cap_ms, self.threads)

    def rules(self) -> dict:
        return {"adjacency": self.adjacency, "reintro_on_remove": self.reintro_on_remove,
                "drop_on_split": self.drop_on_split}


def load_config(env=None) -> Config:
    env = os.environ if env is None else env
    cfg = Config()
    path = env.get("WGL_CONFIG")
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ValueError(f"cannot read WGL_CONFIG file {path}: {e}") from None
        known = {f.name for f in dataclasses.fields(Config)}
        for key, val in data.items():
            name = key.replace("-", "_")
            if name == "time_cap_millis":
                name = "time_cap_ms"
            if name not in known:
                raise ValueError(f"unknown config key {key!r} in {path}")
            if name == "symmetry" and isinstance(val, str):
                val = val == "on"
            setattr(cfg, name, val)
    return cfg


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for resource limits
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def parse_factors(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"factors must be a comma list of integers: {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty factor list")
    # the winner is invariant under permuting factors; fix one order
    return tuple(sorted(vals, reverse=True))


def parse_range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N, N..M or a comma list: {text!r}")


def _add_config_flags(p):
    g = p.add_argument_group("solver configuration")
    g.add_argument("--adjacency", choices=ADJACENCY_MODES)
    g.add_argument("--reintro-on-remove", action="store_true", default=None)
    g.add_argument("--drop-on-split", action="store_true", default=None)
    g.add_argument("--symmetry", choices=("on", "off"))
    g.add_argument("--node-cap", type=int)
    g.add_argument("--time-cap-ms", type=int)
    g.add_argument("--threads", type=int)
    g.add_argument("--format", choices=FORMATS)
    g.add_argument("--timing", action="store_true", help="include wall-clock times in output")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="wgl", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="decide the comparison game for one parameter point")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--factors", type=parse_factors, required=True)
    _add_config_flags(p)

    p = sub.add_parser("sweep", help="winner table over a grid")
    p.add_argument("--k", type=parse_range, required=True)
    p.add_argument("--factors", type=parse_factors, action="append", required=True,
                   help="one factor family; repeat the flag for more")
    _add_config_flags(p)

    p = sub.add_parser("witness", help="simulate reduction witnesses from a solved game")
    wsub = p.add_subparsers(dest="side", required=True, parser_class=_Parser)
    w2 = wsub.add_parser("p2", help="Player 2 strategy against an input tree")
    w1 = wsub.add_parser("p1", help="Player 1 strategy against an opponent")
    for w in (w1, w2):
        w.add_argument("--k", type=int, required=True)
        w.add_argument("--factors", type=parse_factors, required=True)
        w.add_argument("--depth", type=int, default=20)
        w.add_argument("--seed", type=int, default=0)
        _add_config_flags(w)
    w2.add_argument("--tree", help="LevelTree JSON file (default: random tree from --seed)")
    w1.add_argument("--opponent", choices=("trivial", "random"), default="trivial")

    p = sub.add_parser("sort", help="sorting pipelines on prefix|tail streams")
    ssub = p.add_subparsers(dest="op", required=True, parser_class=_Parser)
    for name in ("eval", "strip", "via-fcc", "product"):
        s = ssub.add_parser(name)
        s.add_argument("--d", type=int, default=2)
        s.add_argument("--prefix", default="")
        s.add_argument("--tail", type=int, required=True)
        if name == "product":
            s.add_argument("--n", type=int)
    s = ssub.add_parser("fcc", help="component of vertex 0 via sorting")
    s.add_argument("--graph", required=True, help="edge-list file")
    s = ssub.add_parser("xc1", help="convex choice in [0,1] via sorting")
    s.add_argument("--intervals", required=True,
                   help="semicolon list of a:b rational intervals, e.g. '0:1;1/4:1/2'")

    p = sub.add_parser("diag", help="priority-construction diagonalizer")
    dsub = p.add_subparsers(dest="op", required=True, parser_class=_Parser)
    d = dsub.add_parser("run")
    d.add_argument("--k", type=int, required=True)
    d.add_argument("--alpha", required=True)
    d.add_argument("--phi", required=True, help="Phi table JSON file")
    d.add_argument("--stages", type=int)
    d.add_argument("--dump", help="write the stage history as JSON here")
    return ap


def _config(args) -> Config:
    cfg = load_config()
    for name in ("adjacency", "reintro_on_remove", "drop_on_split", "node_cap",
                 "time_cap_ms", "threads", "format"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    if getattr(args, "symmetry", None) is not None:
        cfg.symmetry = args.symmetry == "on"
    cfg.validate()
    return cfg


def _emit(obj, out):
    out.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def cmd_solve(args, out) -> int:
    cfg = _config(args)
    params = GameParams(args.k, args.factors, **cfg.rules())
    try:
        res = solve(params, cfg.solver_config())
    except ResourceLimit as e:
        stats = dict(e.stats)
        if not args.timing:
            stats.pop("wall_ms", None)
        _emit({"error": str(e), "stats": stats}, out)
        return 2
    if cfg.format == "dot":
        out.write(arena_dot(res))
    elif cfg.format == "text":
        out.write(f"{params.label()}: {res.winner} wins ({res.stats['nodes']} nodes)\n")
    elif cfg.format == "csv":
        out.write("k,factors,winner,nodes,millis\n")
        millis = res.stats["wall_ms"] if args.timing else 0
        out.write(f'{params.k},"{",".join(map(str, params.factors))}",{res.winner},'
                  f'{res.stats["nodes"]},{millis}\n')
    else:
        out.write(json.dumps(result_json(res, args.timing), indent=2, sort_keys=True) + "\n")
    return 0


def cmd_sweep(args, out) -> int:
    cfg = _config(args)
    fmt = cfg.format or "csv"
    if fmt not in ("csv", "json"):
        raise ValueError("sweep output is csv or json")
    families = list(dict.fromkeys(args.factors))
    res = sweep(args.k, families, cfg.solver_config(), **cfg.rules())
    if fmt == "json":
        out.write(json.dumps(res.to_json(args.timing), indent=2, sort_keys=True) + "\n")
    else:
        out.write(res.csv(args.timing))
    for f in res.flags:
        print(f"monotonicity: {f}", file=sys.stderr)
    return 2 if any(r.winner is None for r in res.rows) else 0


def cmd_witness(args, out) -> int:
    cfg = _config(args)
    params = GameParams(args.k, args.factors, **cfg.rules())
    try:
        res = solve(params, cfg.solver_config())
    except ResourceLimit as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    rng = random.Random(args.seed)
    if args.side == "p2":
        if res.winner != "P2":
            raise ValueError(f"Player 1 wins {params.label()}; no reduction to simulate")
        if args.tree:
            with open(args.tree) as fh:
                tree = witness.LevelTree.from_json(json.load(fh))
        else:
            tree = witness.random_level_tree(params.k, args.depth, rng)
        red = witness.p2_to_reduction(res, tree, args.depth)
        problems = red.check()
        out.write(witness.dumps({
            "input_tree": red.input_tree.to_json(),
            "factor_trees": red.factor_trees.to_json(),
            "boxes": [{"vertex": v, "tokens": [list(w) for w in red_tokens]}
                      for v, red_tokens in zip(red.vertices, _board_tokens(params, red.board))],
            "trace": red.trace,
            "problems": problems,
        }) + "\n")
        return 1 if problems else 0
    if res.winner != "P1":
        raise ValueError(f"Player 2 wins {params.label()}; no adversary to build")
    if args.opponent == "trivial":
        attempt = witness.trivial_attempt(params)
    else:
        attempt = witness.random_attempt(params, rng)
    adv = witness.p1_to_adversary(res, attempt, args.depth)
    out.write(witness.dumps({
        "status": adv.status,
        "certificate": adv.certificate(),
        "tree": adv.tree.to_json(),
        "factor_trees": adv.factor_trees.to_json(),
        "trace": adv.trace,
    }) + "\n")
    return 0


def _board_tokens(params, board):
    return ComparisonGame(params).board_tokens(board)


def _finseq(args) -> sort_ops.FinSeq:
    return sort_ops.decode(f"{args.prefix}|{args.tail}", args.d)


def _parse_intervals(text: str):
    ivs = []
    for part in text.split(";"):
        if not part.strip():
            continue
        try:
            a, b = part.split(":")
            ivs.append((Fraction(a.strip()), Fraction(b.strip())))
        except ValueError:
            raise ValueError(f"bad interval {part!r}; expected a:b") from None
    return ivs


def cmd_sort(args, out) -> int:
    op = args.op
    if op == "eval":
        out.write(sort_ops.encode(sort_ops.sort_d(_finseq(args))) + "\n")
    elif op == "strip":
        y, zeros = sort_ops.strip_zeros_decrement(_finseq(args))
        out.write(f"{sort_ops.encode(y)} {zeros}\n")
    elif op == "via-fcc":
        if args.d != 2:
            raise ValueError("via-fcc works on binary streams (--d 2)")
        out.write(sort_ops.encode(sort_ops.sort_via_fcc(_finseq(args))) + "\n")
    elif op == "product":
        x = _finseq(args)
        n = args.n if args.n is not None else x.d - 1
        parts = sort_ops.product_translate(n, x)
        sorted_parts = [sort_ops.sort_d(p) for p in parts]
        for p, sp in zip(parts, sorted_parts):
            out.write(f"{sort_ops.encode(p)} -> {sort_ops.encode(sp)}\n")
        out.write(sort_ops.encode(sort_ops.product_recombine(sorted_parts)) + "\n")
    elif op == "fcc":
        with open(args.graph) as fh:
            g = sort_ops.GraphInstance.from_edge_list(fh.read())
        q, dec = sort_ops.fcc_to_sort(g)
        comp = dec(sort_ops.sort_d(q))
        out.write(f"input {sort_ops.encode(q)}\n")
        out.write("component " + " ".join(str(v) for v, inside in comp.items() if inside) + "\n")
    elif op == "xc1":
        ivs = _parse_intervals(args.intervals)
        q, dec = sort_ops.xc1_via_sort(ivs)
        sq = sort_ops.sort_d(q)
        out.write(f"sorted {sort_ops.encode(sq)}\n")
        for s, p in enumerate(dec(sq)):
            out.write(f"{s} {p}\n")
    return 0


def cmd_diag(args, out) -> int:
    try:
        with open(args.phi) as fh:
            phi = diagonalizer.MonotoneTable.from_json(json.load(fh))
    except (OSError, json.JSONDecodeError) as e:
        raise ValueError(f"cannot read Phi table {args.phi}: {e}") from None
    alpha = [int(c) for c in args.alpha]
    stages = len(alpha) if args.stages is None else args.stages
    cs = diagonalizer.run_stages(args.k, alpha, phi, stages)
    problems = diagonalizer.check_invariants(cs)
    if args.dump:
        with open(args.dump, "w") as fh:
            fh.write(diagonalizer.dumps(cs) + "\n")
    if problems:
        for p in problems:
            out.write(p + "\n")
        return 1
    out.write("ok\n")
    return 0


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "witness": cmd_witness,
            "sort": cmd_sort, "diag": cmd_diag}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1
    if args.verbose:
        logging.basicConfig(level=logging.INFO)
    try:
        return COMMANDS[args.command](args, out)
    except ResourceLimit as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
