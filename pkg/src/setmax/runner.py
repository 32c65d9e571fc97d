"""Solve/audit pipeline and the benchmark matrix, shared by the command line."""

from __future__ import annotations

import csv
import io as _io
import json
import time
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .audit import (
    HYBRID_CAP,
    SOUNDNESS_CAP,
    OptCertificate,
    approximation_ratio,
    brute_force_opt,
    check_bounds,
    dep_soundness_audit,
    hybrid_audit,
)
from .constructions import (
    Instance,
    build_tight_dependency,
    build_tight_supermodular,
    graph_to_uniform_instance,
    random_bidders,
    random_graph,
    random_instance,
    random_kdm_edges,
    reduce_kdm,
    welfare_to_instance,
)
from .io import hypergraph_from_json, instance_fingerprint, jsonable
from .model import InvalidInstanceError, SizeLimitError, as_fraction, fraction_str
from .solvers import (
    GreedyTrace,
    SolveResult,
    extendible_greedy_dependency,
    extendible_greedy_supermodular,
    guess_greedy_uniform,
    simple_greedy_uniform,
)
from .systems import UniformMatroid

ALGORITHMS = ("ext-super", "ext-dep", "simple", "guess", "brute")
GENERATORS = ("tight-supermodular", "tight-dependency", "kdm", "welfare", "graph-uniform", "random")


class UsageError(ValueError):
    """Bad parameters or an algorithm that does not fit the constraint (exit code 2)."""


# ---------------------------------------------------------------- generation


def _int(params: Mapping[str, Any], key: str, default: int | None = None) -> int:
    v = params.get(key, default)
    if v is None:
        raise UsageError(f"missing parameter {key!r}")
    try:
        return int(v)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"parameter {key!r} must be an integer, got {v!r}") from exc


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def generate(kind: str, params: Mapping[str, Any]) -> Instance:
    """Build an instance from generator parameters (the ``gen`` subcommands)."""
    p = {k.replace("-", "_"): v for k, v in params.items() if v is not None}
    seed = _int(p, "seed", 0)
    if kind in ("tight-supermodular", "tight-dependency"):
        build = build_tight_supermodular if kind == "tight-supermodular" else build_tight_dependency
        return build(_int(p, "k"), _int(p, "d"), as_fraction(p.get("eps", "1/10")))
    if kind == "kdm":
        k, d = _int(p, "k"), _int(p, "d")
        if "edges_file" in p:
            edges = _read_json(p["edges_file"])
            if isinstance(edges, Mapping):
                edges = edges["edges"]
        else:
            edges = random_kdm_edges(_int(p, "edges", 6), _int(p, "r", k * (d + 1)), _int(p, "vertices", 3), seed)
        inst = reduce_kdm(edges, k, d, p.get("r") and int(p["r"]))
        inst.meta["seed"] = seed
        return inst
    if kind == "welfare":
        if "bidders_file" in p:
            doc = _read_json(p["bidders_file"])
            items = int(doc["items"])
            bidders = [hypergraph_from_json(items, b) for b in doc["bidders"]]
        else:
            bidders = random_bidders(_int(p, "bidders", 2), _int(p, "items", 4), _int(p, "d", 1), seed)
        inst = welfare_to_instance(bidders)
        inst.meta["seed"] = seed
        return inst
    if kind == "graph-uniform":
        delta = as_fraction(p.get("delta", "1/2"))
        if "graph_file" in p:
            doc = _read_json(p["graph_file"])
            edges = [tuple(e) for e in doc["edges"]]
            num_vertices = doc.get("num_vertices")
        else:
            num_vertices = _int(p, "vertices", 8)
            edges = random_graph(num_vertices, p.get("p", "1/2"), seed)
        inst = graph_to_uniform_instance(edges, delta, num_vertices)
        inst.meta["seed"] = seed
        return inst
    if kind == "random":
        constraint: Any = p.get("constraint", "uniform")
        if constraint == "uniform" and "k" in p:
            constraint = {"type": "uniform", "k": _int(p, "k")}
        return random_instance(
            _int(p, "n"), _int(p, "d"), constraint, seed, p.get("submodular_fraction", 0)
        )
    raise UsageError(f"unknown generator {kind!r}")


# ---------------------------------------------------------------- solving


def run_algorithm(inst: Instance, alg: str, brute_cap: Any = None) -> SolveResult:
    oracles = inst.oracles()
    f, system = inst.f, inst.system
    if alg == "ext-super":
        return extendible_greedy_supermodular(f, system, oracles)
    if alg == "ext-dep":
        return extendible_greedy_dependency(f, system, oracles)
    if alg in ("simple", "guess"):
        if not isinstance(system, UniformMatroid):
            raise UsageError(f"--alg {alg} needs a uniform-matroid constraint, got {system.kind}")
        solver = simple_greedy_uniform if alg == "simple" else guess_greedy_uniform
        return solver(f, system.k, oracles)
    if alg == "brute":
        v0 = f.counter.get("value")
        i0 = system.counter.get("independence")
        cert = _brute(inst, brute_cap)
        queries = {
            "value": f.counter.get("value") - v0,
            "independence": system.counter.get("independence") - i0,
        }
        return SolveResult("brute", cert.opt_set, cert.opt_value, GreedyTrace(), 0, queries, {"enumerated": cert.enumerated_count})
    raise UsageError(f"unknown algorithm {alg!r}")


def _brute(inst: Instance, cap: Any) -> OptCertificate:
    if cap is None:
        return brute_force_opt(inst.f, inst.system)
    return brute_force_opt(inst.f, inst.system, cap=cap)


def compute_opt(inst: Instance, cap: Any = None) -> tuple[OptCertificate, str]:
    """Brute-force optimum; falls back to a certified optimum when the size cap is hit."""
    try:
        return _brute(inst, cap), "brute-force"
    except SizeLimitError:
        cert_set = inst.certified.get("opt_set")
        if cert_set is None:
            raise
        opt_set = frozenset(cert_set)
        if not inst.system.is_independent(opt_set):
            raise InvalidInstanceError("certified optimum is not independent")
        value = inst.f.value(opt_set)
        if value != inst.certified["opt_value"]:
            raise InvalidInstanceError("certified optimum value does not match f")
        return OptCertificate(opt_set, value, 0), "certified"


@dataclass
class SolveOutcome:
    report: dict[str, Any]
    ok: bool
    results: dict[str, SolveResult] = field(default_factory=dict)


def solve(
    inst: Instance,
    algorithms: Sequence[str],
    with_opt: bool = True,
    audit: bool = False,
    brute_cap: Any = None,
) -> SolveOutcome:
    """Run each algorithm, attach OPT, ratios, bound checks and (optionally) audits."""
    for alg in algorithms:
        if alg not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {alg!r}")
        if alg in ("simple", "guess") and not isinstance(inst.system, UniformMatroid):
            raise UsageError(f"--alg {alg} needs a uniform-matroid constraint, got {inst.system.kind}")
    fp = instance_fingerprint(inst)
    ok = True
    report: dict[str, Any] = {
        "instance": fp,
        "n": inst.n,
        "constraint": inst.system.kind,
        "k": inst.system.extendibility,
        "meta": inst.meta,
    }
    cert = None
    if with_opt or audit:
        cert, source = compute_opt(inst, brute_cap)
        cert.fingerprint = fp
        report["opt"] = {
            "value": fraction_str(cert.opt_value),
            "set": sorted(cert.opt_set),
            "enumerated": cert.enumerated_count,
            "source": source,
        }
    results: dict[str, SolveResult] = {}
    runs: dict[str, Any] = {}
    audits: dict[str, Any] = {}
    for alg in algorithms:
        start = time.perf_counter()
        res = run_algorithm(inst, alg, brute_cap)
        ms = (time.perf_counter() - start) * 1000
        res.info["fingerprint"] = fp
        results[alg] = res
        entry: dict[str, Any] = {
            "solution": sorted(res.solution),
            "value": fraction_str(res.value),
            "d_used": res.d_used,
            "queries": dict(sorted(res.queries.items())),
            "iterations": len(res.trace),
            "info": jsonable({k: v for k, v in res.info.items() if k != "fingerprint"}),
            "ms": round(ms, 3),
        }
        if cert is not None:
            entry["ratio"] = fraction_str(approximation_ratio(res, cert))
            checks = check_bounds(res, cert, inst.system, inst.oracles())
            entry["bounds"] = [c.as_dict() for c in checks]
            ok = ok and all(c.ok for c in checks)
        runs[alg] = entry
        if audit and alg in ("ext-super", "ext-dep"):
            audits[alg] = _audit(inst, res, cert, alg)
            ok = ok and audits[alg].get("ok", True)
    report["algorithms"] = runs
    if audit:
        report["audits"] = audits
    report["ok"] = ok
    return SolveOutcome(report, ok, results)


def _audit(inst: Instance, res: SolveResult, cert: OptCertificate, alg: str) -> dict[str, Any]:
    mode = "supermodular" if alg == "ext-super" else "dependency"
    out: dict[str, Any] = {}
    if inst.n > HYBRID_CAP:
        out["hybrid"] = {"skipped": f"n={inst.n} exceeds the hybrid audit cap {HYBRID_CAP}"}
    else:
        rep = hybrid_audit(inst.f, inst.system, res, cert, mode)
        out["hybrid"] = rep.as_dict()
        out["ok"] = rep.ok
    if inst.n > SOUNDNESS_CAP:
        out["soundness"] = {"skipped": f"n={inst.n} exceeds the soundness audit cap {SOUNDNESS_CAP}"}
    else:
        oracles = inst.oracles()
        sets = oracles.sdep if mode == "supermodular" else oracles.dep
        sound = dep_soundness_audit(inst.f, sets, mode)
        out["soundness"] = {"ok": sound.ok, "witness": jsonable(sound.witness) if sound.witness else None}
        out["ok"] = out.get("ok", True) and sound.ok
    out.setdefault("ok", True)
    return out


def summary_table(report: Mapping[str, Any]) -> str:
    lines = [f"instance {report['instance'][:12]}  n={report['n']}  constraint={report['constraint']}"]
    if "opt" in report:
        lines.append(f"OPT = {report['opt']['value']} ({report['opt']['source']})")
    lines.append(f"{'algorithm':<10} {'value':>10} {'ratio':>10} {'bounds':>7} {'queries':>9} {'ms':>9}")
    for alg, e in report["algorithms"].items():
        bounds = e.get("bounds")
        flag = "-" if bounds is None else ("ok" if all(b["ok"] for b in bounds) else "FAIL")
        lines.append(
            f"{alg:<10} {e['value']:>10} {e.get('ratio', '-'):>10} {flag:>7} {e['queries'].get('value', 0):>9} {e['ms']:>9.1f}"
        )
    for alg, a in report.get("audits", {}).items():
        lines.append(f"audit {alg}: {'ok' if a['ok'] else 'FAIL'}")
    return "\n".join(lines)


# ---------------------------------------------------------------- bench


CSV_COLUMNS = [
    "instance",
    "seed",
    "algorithm",
    "n",
    "k",
    "d",
    "value",
    "opt",
    "ratio",
    "bound",
    "bound_ok",
    "value_queries",
    "independence_queries",
    "ms",
    "error",
]


def _matrix(config: Mapping[str, Any]) -> list[tuple[str, int | None, Instance | Exception]]:
    from .io import load_instance

    out = []
    for i, spec in enumerate(config.get("instances", [])):
        if "file" in spec:
            label = spec.get("label", spec["file"])
            try:
                out.append((label, None, load_instance(spec["file"])))
            except Exception as exc:  # recorded per row
                out.append((label, None, exc))
            continue
        kind = spec.get("gen")
        label = spec.get("label", f"{i:03d}-{kind}")
        seeds = spec.get("seeds", [spec.get("seed", 0)])
        for seed in seeds:
            try:
                out.append((label, seed, generate(kind, {**spec.get("params", {}), "seed": seed})))
            except Exception as exc:
                out.append((label, seed, exc))
    return out


def run_bench(config: Mapping[str, Any], brute_cap: Any = None) -> tuple[list[dict[str, Any]], dict[str, Any], bool]:
    """Rows of the benchmark table, an aggregate summary, and whether every bound held."""
    algorithms = list(config.get("algorithms", ["ext-super", "ext-dep"]))
    with_opt = bool(config.get("opt", True))
    rows: list[dict[str, Any]] = []
    ok = True
    for label, seed, inst in _matrix(config):
        for alg in algorithms:
            row: dict[str, Any] = {c: "" for c in CSV_COLUMNS}
            row.update(instance=label, seed="" if seed is None else seed, algorithm=alg)
            if isinstance(inst, Exception):
                row["error"] = f"{type(inst).__name__}: {inst}"
                rows.append(row)
                continue
            row.update(n=inst.n, k=inst.system.extendibility if inst.system.extendibility is not None else "")
            try:
                outcome = solve(inst, [alg], with_opt=with_opt, brute_cap=brute_cap)
            except (UsageError, InvalidInstanceError, SizeLimitError) as exc:
                row["error"] = f"{type(exc).__name__}: {exc}"
                rows.append(row)
                continue
            e = outcome.report["algorithms"][alg]
            res = outcome.results[alg]
            if alg in ("simple", "guess"):
                row["k"] = res.info["k"]
            row.update(
                d=e["d_used"],
                value=e["value"],
                value_queries=e["queries"].get("value", 0),
                independence_queries=e["queries"].get("independence", 0),
                ms=e["ms"],
            )
            if with_opt:
                row.update(opt=outcome.report["opt"]["value"], ratio=e["ratio"])
                bounds = e["bounds"]
                if bounds:
                    row["bound"] = bounds[0]["factor"]
                row["bound_ok"] = all(b["ok"] for b in bounds)
                ok = ok and row["bound_ok"]
            rows.append(row)
    rows.sort(key=lambda r: (str(r["instance"]), str(r["seed"]).zfill(12), r["algorithm"]))
    return rows, aggregate(rows), ok


def aggregate(rows: Sequence[Mapping[str, Any]]) -> dict[str, Any]:
    """Per-algorithm counts and worst observed ratio."""
    out: dict[str, Any] = {}
    for r in rows:
        a = out.setdefault(r["algorithm"], {"rows": 0, "errors": 0, "bound_violations": 0, "min_ratio": None})
        a["rows"] += 1
        if r["error"]:
            a["errors"] += 1
            continue
        if r["bound_ok"] is False:
            a["bound_violations"] += 1
        if r["ratio"] != "":
            ratio = Fraction(r["ratio"])
            if a["min_ratio"] is None or ratio < Fraction(a["min_ratio"]):
                a["min_ratio"] = fraction_str(ratio)
    return {"algorithms": dict(sorted(out.items())), "rows": len(rows)}


def rows_to_csv(rows: Sequence[Mapping[str, Any]]) -> str:
    buf = _io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r)
    return buf.getvalue()
