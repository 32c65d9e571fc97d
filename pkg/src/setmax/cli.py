"""``setmax`` command line: gen, solve, bench.

Exit codes: 0 success, 2 usage or instance error, 3 a checked bound or audit failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .io import dump_instance, load_instance, pretty_json
from .model import InvalidInstanceError, SizeLimitError
from .runner import ALGORITHMS, UsageError, generate, rows_to_csv, run_bench, solve, summary_table

EXIT_OK, EXIT_USAGE, EXIT_FALSIFIED = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits with 2 already; keep the message terse
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_gen(sub: argparse._SubParsersAction) -> None:
    gen = sub.add_parser("gen", help="write an instance file")
    gsub = gen.add_subparsers(dest="generator", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("-o", "--output", help="instance file (default: stdout)")
        p.add_argument("--seed", type=int, default=0)

    for name in ("tight-supermodular", "tight-dependency"):
        p = gsub.add_parser(name)
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--eps", default="1/10", help="positive rational, e.g. 1/10")
        common(p)

    p = gsub.add_parser("kdm", help="r-dimensional matching reduction")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--r", type=int, help="sides per edge (default k(d+1))")
    p.add_argument("--edges", type=int, default=6, help="number of random edges")
    p.add_argument("--vertices", type=int, default=3, help="vertices per side for random edges")
    p.add_argument("--edges-file", help="JSON list of edges (one vertex per side) instead of random ones")
    common(p)

    p = gsub.add_parser("welfare", help="welfare maximization over bidder-item pairs")
    p.add_argument("--bidders", type=int, default=2)
    p.add_argument("--items", type=int, default=4)
    p.add_argument("--d", type=int, default=1, help="degree bound of each random utility")
    p.add_argument("--bidders-file", help='JSON {"items": m, "bidders": [hypergraph, ...]}')
    common(p)

    p = gsub.add_parser("graph-uniform", help="densest-subgraph style instance")
    p.add_argument("--delta", default="1/2")
    p.add_argument("--vertices", type=int, default=8)
    p.add_argument("--p", default="1/2", help="edge probability of the random graph")
    p.add_argument("--graph-file", help='JSON {"num_vertices": n, "edges": [[a, b], ...]}')
    common(p)

    p = gsub.add_parser("random", help="random monotone hypergraph function")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--constraint", choices=("uniform", "partition", "intersection"), default="uniform")
    p.add_argument("--k", type=int, help="rank for --constraint uniform (random if omitted)")
    p.add_argument("--submodular-fraction", default="0", help="share of pair edges given negative weight")
    common(p)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="setmax", description="Greedy maximization of set functions with bounded dependency degree.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add_gen(sub)

    p = sub.add_parser("solve", help="run solvers on an instance file")
    p.add_argument("instance")
    p.add_argument("--alg", action="append", choices=ALGORITHMS, help="repeatable; default ext-super")
    p.add_argument("--opt", dest="opt", action="store_true", default=True, help="compute OPT and ratios (default)")
    p.add_argument("--no-opt", dest="opt", action="store_false")
    p.add_argument("--audit", action="store_true", help="run the hybrid and oracle-soundness audits")
    p.add_argument("-o", "--output", help="write the JSON report here (default: stdout)")
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; solvers are deterministic")

    p = sub.add_parser("bench", help="run a benchmark matrix")
    p.add_argument("config", help="JSON matrix config")
    p.add_argument("-o", "--output", default="bench.csv", help="CSV output; the aggregate goes next to it as .json")
    p.add_argument("--seed", type=int, default=0, help="default seed for specs without one")
    return parser


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _cmd_gen(args: argparse.Namespace) -> int:
    params = {k: v for k, v in vars(args).items() if k not in ("command", "generator", "output")}
    inst = generate(args.generator, params)
    _write(dump_instance(inst), args.output)
    if args.output:
        print(f"wrote {args.output} (n={inst.n})", file=sys.stderr)
    return EXIT_OK


def _cmd_solve(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    outcome = solve(inst, args.alg or ["ext-super"], with_opt=args.opt, audit=args.audit)
    text = pretty_json(outcome.report)
    if args.output:
        Path(args.output).write_text(text)
        print(summary_table(outcome.report))
    else:
        sys.stdout.write(text)
        print(summary_table(outcome.report), file=sys.stderr)
    return EXIT_OK if outcome.ok else EXIT_FALSIFIED


def _cmd_bench(args: argparse.Namespace) -> int:
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    for spec in config.get("instances", []):
        if "seeds" not in spec and "seed" not in spec:
            spec["seed"] = args.seed
    rows, agg, ok = run_bench(config)
    out = Path(args.output)
    out.write_text(rows_to_csv(rows))
    out.with_suffix(".json").write_text(pretty_json(agg))
    print(f"{len(rows)} rows -> {out}, aggregate -> {out.with_suffix('.json')}")
    return EXIT_OK if ok else EXIT_FALSIFIED


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"gen": _cmd_gen, "solve": _cmd_solve, "bench": _cmd_bench}[args.command]
    try:
        return handler(args)
    except (UsageError, InvalidInstanceError, SizeLimitError, ValueError, OSError) as exc:
        print(f"setmax: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
