"""Command-line entry point: entropy, invariant suites and experiments."""
from __future__ import annotations

import argparse
import ast
import csv
import hashlib
import io
import json
import logging
import operator
import sys

import numpy as np

from . import rose as rose_mod
from .bounds import rank2_check, sqrt_bound_check
from .errors import ConfigError, ThermographError
from .graph import read_graph, standard_graph
from .metrics import path_length
from .separating import aitken_limit, escape_path_separating, separate, shortcut_experiment
from .spectral import entropy, normalize_unit_entropy
from .suites import SUITES, run_suite

log = logging.getLogger("thermograph")

EXPERIMENTS = ("escape-rose", "escape-separating", "thin-part", "shortcut", "rank2-bounds")

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow, ast.USub: operator.neg,
        ast.UAdd: operator.pos}


def parse_number(text: str) -> float:
    """Evaluate a plain arithmetic expression such as ``1-1e-8`` or ``2^-3``."""
    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ConfigError(f"not a number: {text!r}")

    try:
        value = float(ev(ast.parse(text.strip().replace("^", "**"), mode="eval").body))
    except (SyntaxError, ZeroDivisionError, OverflowError) as exc:
        raise ConfigError(f"not a number: {text!r}") from exc
    if not np.isfinite(value):
        raise ConfigError(f"not a finite number: {text!r}")
    return value


def parse_list(text: str) -> list[float]:
    items = [s for s in text.split(",") if s.strip()]
    if not items:
        raise ConfigError("empty list")
    return [parse_number(s) for s in items]


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    return str(x)


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def to_csv(columns, rows, config: dict) -> str:
    """Render rows with a header; every row carries the config hash."""
    h = config_hash(config)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(columns) + ["config_hash"])
    for row in rows:
        w.writerow([_fmt(x) for x in row] + [h])
    return buf.getvalue()


def _load_graph(args):
    if args.graph_file:
        graph, lengths = read_graph(args.graph_file)
        return graph, lengths
    return standard_graph(args.family), None


# commands ---------------------------------------------------------------

def cmd_entropy(args) -> str:
    graph, file_lengths = _load_graph(args)
    if args.len is not None:
        lengths = np.array(parse_list(args.len))
    elif file_lengths is not None:
        lengths = file_lengths
    else:
        raise ConfigError("no lengths given; use --len or a graph file with len lines")
    if len(lengths) != graph.n_edges:
        raise ConfigError(f"{graph.name} has {graph.n_edges} edges but {len(lengths)} lengths")
    h = entropy(graph, lengths)
    unit = normalize_unit_entropy(graph, lengths)
    return f"{h!r}\n" + ",".join(repr(float(x)) for x in unit) + "\n"


def cmd_verify(args):
    if args.suite != "all" and args.suite not in SUITES:
        raise ConfigError(f"unknown suite {args.suite!r}")
    checks = run_suite(args.suite, args.seed)
    config = {"command": "verify", "suite": args.suite, "seed": args.seed}
    rows = [(c.suite, c.name, c.measured, c.tolerance, c.status, c.note) for c in checks]
    text = to_csv(("suite", "check", "measured", "tolerance", "status", "note"), rows, config)
    failed = [c for c in checks if c.status == "fail"]
    for c in failed:
        log.error("FAILED %s/%s: measured %.3e > %.3e %s", c.suite, c.name, c.measured,
                  c.tolerance, c.note)
    return text, (1 if failed else 0)


def _side_points(sg):
    for g in (sg.graph1, sg.graph2):
        if g.rank() < 2:
            raise ConfigError(f"side {g.name} has rank {g.rank()}; metric experiments need rank >= 2")
    unit1 = normalize_unit_entropy(sg.graph1, np.ones(sg.graph1.n_edges))
    unit2 = normalize_unit_entropy(sg.graph2, np.ones(sg.graph2.n_edges))
    return unit1, unit2


def _separated(args):
    graph, _ = _load_graph(args)
    return separate(graph, args.bridge)


def experiment_rows(args):
    """Columns and rows of one experiment."""
    name = args.name
    if name == "escape-rose":
        t_max = parse_number(args.tmax)
        path = rose_mod.escape_path(args.r, t_max)
        return (("r", "t_max", "tol", "length", "envelope"),
                [(args.r, t_max, args.tol, path_length(path, tol=args.tol),
                  rose_mod.escape_bound(args.r))])
    if name == "escape-separating":
        t_max = parse_number(args.tmax)
        sg = _separated(args)
        unit1, unit2 = _side_points(sg)
        path = escape_path_separating(sg, unit1, args.side2_scale * unit2, t_max)
        coarse = path_length(path, tol=args.tol)
        fine = path_length(path, tol=args.tol * 1e-2)
        return (("t_max", "tol", "length", "length_fine", "difference"),
                [(t_max, args.tol, coarse, fine, abs(coarse - fine))])
    if name == "thin-part":
        eps = parse_list(args.eps) if args.eps else [2.0**-k for k in range(2, 9)]
        i = args.i - 1
        if not 0 <= i < args.r:
            raise ConfigError(f"petal index must be in 1..{args.r}")
        res = [rose_mod.slice_diameter(args.r, i, e, args.samples, args.seed) for e in eps]
        c, factor = rose_mod.fit_decay(eps, [d for d, _ in res])
        return (("r", "petal", "eps", "diameter_bound", "shape", "fitted_C", "fit_factor"),
                [(args.r, args.i, e, d, s, c, factor) for e, (d, s) in zip(eps, res)])
    if name == "shortcut":
        deltas = parse_list(args.delta) if args.delta else [0.1, 0.01, 0.001]
        sg = _separated(args)
        unit1, unit2 = _side_points(sg)
        a = args.side2_scale * unit2
        b = a + np.linspace(0.6, 0.1, len(a))
        rows = shortcut_experiment(sg, deltas, unit1, a, b, args.growth, args.tol)
        out = []
        for k, row in enumerate(rows):
            totals = [r[-2] for r in rows[: k + 1]]
            out.append((*row, aitken_limit(totals) if len(totals) >= 3 else float("nan")))
        legs = [f"leg{k + 1}" for k in range(len(rows[0]) - 3)]
        return (("delta", *legs, "total", "max_bridge", "extrapolated"), out)
    if name == "rank2-bounds":
        rng = np.random.default_rng(args.seed)
        rows = []
        for family in ("rose", "barbell", "theta"):
            for k in range(args.samples):
                length, bound = rank2_check(family, rng, args.tol)
                rows.append((family, k, length, bound, length - bound))
        for k in range(max(1, args.samples // 2)):
            length, bound = sqrt_bound_check(4, rng, args.tol)
            rows.append(("sqrt_bound_r4", k, length, bound, length - bound))
        return ("family", "index", "length", "bound", "margin"), rows
    raise ConfigError(f"unknown experiment {name!r}")


def cmd_experiment(args) -> str:
    columns, rows = experiment_rows(args)
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "func", "verbose")}
    return to_csv(columns, rows, config)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thermograph",
                                description="Entropy and pressure metrics on metric graphs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(q, family="rose:2"):
        q.add_argument("--family", default=family, help="rose:r, theta:r, barbell, G:n1,n2, rose_theta:r")
        q.add_argument("--graph-file", help="graph in the line format (v/e/len lines)")
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--tol", type=float, default=1e-8)
        q.add_argument("--samples", type=int, default=16)
        q.add_argument("--out", help="write output here instead of stdout")

    q = sub.add_parser("entropy", help="entropy and unit-entropy normalization")
    common(q)
    q.add_argument("--len", help="comma-separated edge lengths")
    q.set_defaults(func=cmd_entropy)

    q = sub.add_parser("verify", help="run invariant suites")
    common(q)
    q.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES)} or all")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("experiment", help="run an experiment and emit CSV")
    common(q, family="G:2,2")
    q.add_argument("name", choices=EXPERIMENTS)
    q.add_argument("--r", type=int, default=3)
    q.add_argument("--i", type=int, default=1, help="pinned petal, counted from 1")
    q.add_argument("--tmax", default="1-1e-8")
    q.add_argument("--eps", help="comma-separated petal lengths")
    q.add_argument("--delta", help="comma-separated inflation factors")
    q.add_argument("--bridge", default="e0")
    q.add_argument("--growth", type=float, default=1.0)
    q.add_argument("--side2-scale", type=float, default=1.25)
    q.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "experiment" and args.samples < 1:
        print("error: --samples must be positive", file=sys.stderr)
        return ConfigError.exit_code
    try:
        result = args.func(args)
    except ThermographError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    text, code = result if isinstance(result, tuple) else (result, 0)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
