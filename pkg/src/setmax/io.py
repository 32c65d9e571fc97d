"""JSON encodings for instances and reports.

Rationals are written as "p/q" strings and id lists are sorted, so an instance
survives a write/read cycle byte for byte.
"""

from __future__ import annotations

import hashlib
import json
from collections.abc import Mapping
from fractions import Fraction
from pathlib import Path
from typing import Any

from .constructions import (
    Instance,
    TightDependencyFunction,
    TightSupermodularFunction,
    build_tight_dependency,
    build_tight_supermodular,
)
from .model import HypergraphFunction, InvalidInstanceError, SetFunction, as_fraction, fraction_str
from .systems import IndependenceSystem, Intersection, PartitionMatroid, UniformMatroid

SCHEMA_VERSION = 1


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def pretty_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def fingerprint(doc: Mapping[str, Any]) -> str:
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


# ---------------------------------------------------------------- functions


def hypergraph_to_json(f: HypergraphFunction) -> dict[str, Any]:
    return {
        "type": "hypergraph",
        "edges": [{"members": sorted(e), "weight": fraction_str(w)} for e, w in f.edges],
    }


def function_to_json(f: SetFunction) -> dict[str, Any]:
    if isinstance(f, HypergraphFunction):
        return hypergraph_to_json(f)
    if isinstance(f, TightSupermodularFunction):
        return {"type": "tight-supermodular", "k": f.k, "d": f.d, "eps": fraction_str(f.eps)}
    if isinstance(f, TightDependencyFunction):
        return {"type": "tight-dependency", "k": f.k, "d": f.d, "eps": fraction_str(f.eps)}
    raise InvalidInstanceError(f"cannot serialize a {type(f).__name__}")


def hypergraph_from_json(n: int, doc: Mapping[str, Any]) -> HypergraphFunction:
    try:
        return HypergraphFunction(n, [(e["members"], as_fraction(e["weight"])) for e in doc["edges"]])
    except (KeyError, TypeError) as exc:
        raise InvalidInstanceError(f"malformed hypergraph record: {exc}") from exc


# ---------------------------------------------------------------- constraints


def constraint_to_json(system: IndependenceSystem) -> dict[str, Any]:
    if isinstance(system, UniformMatroid):
        return {"type": "uniform", "k": system.k}
    if isinstance(system, PartitionMatroid):
        return {
            "type": "partition",
            "parts": [list(p) for p in system.parts],
            "capacities": list(system.capacities),
        }
    if isinstance(system, Intersection):
        return {"type": "intersection", "of": [constraint_to_json(s) for s in system.systems]}
    raise InvalidInstanceError(f"cannot serialize a {type(system).__name__}")


def constraint_from_json(doc: Mapping[str, Any], n: int) -> IndependenceSystem:
    kind = doc.get("type")
    try:
        if kind == "uniform":
            return UniformMatroid(n, int(doc["k"]))
        if kind == "partition":
            return PartitionMatroid(n, doc["parts"], doc.get("capacities"))
        if kind == "intersection":
            return Intersection([constraint_from_json(d, n) for d in doc["of"]])
    except (KeyError, TypeError) as exc:
        raise InvalidInstanceError(f"malformed constraint record: {exc}") from exc
    raise InvalidInstanceError(f"unknown constraint type {kind!r}")


# ---------------------------------------------------------------- instances


def instance_to_json(inst: Instance) -> dict[str, Any]:
    return {
        "schema": SCHEMA_VERSION,
        "n": inst.n,
        "function": function_to_json(inst.f),
        "constraint": constraint_to_json(inst.system),
        "meta": inst.meta,
    }


def instance_from_json(doc: Mapping[str, Any]) -> Instance:
    if doc.get("schema") != SCHEMA_VERSION:
        raise InvalidInstanceError(f"unsupported schema version {doc.get('schema')!r}")
    try:
        n = int(doc["n"])
        fdoc = doc["function"]
        cdoc = doc["constraint"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInstanceError(f"malformed instance: {exc}") from exc
    meta = dict(doc.get("meta", {}))
    kind = fdoc.get("type")
    if kind in ("tight-supermodular", "tight-dependency"):
        build = build_tight_supermodular if kind == "tight-supermodular" else build_tight_dependency
        inst = build(int(fdoc["k"]), int(fdoc["d"]), as_fraction(fdoc["eps"]))
        if inst.n != n:
            raise InvalidInstanceError(f"construction has {inst.n} elements, file says {n}")
        if canonical_json(constraint_to_json(inst.system)) != canonical_json(cdoc):
            raise InvalidInstanceError("constraint does not match the tagged construction")
        inst.meta = meta
        return inst
    if kind != "hypergraph":
        raise InvalidInstanceError(f"unknown function type {kind!r}")
    f = hypergraph_from_json(n, fdoc)
    return Instance(f, constraint_from_json(cdoc, n), meta)


def instance_fingerprint(inst: Instance) -> str:
    return fingerprint(instance_to_json(inst))


def dump_instance(inst: Instance) -> str:
    return pretty_json(instance_to_json(inst))


def save_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(dump_instance(inst))


def load_instance(path: str | Path) -> Instance:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInstanceError(f"{path}: not valid JSON ({exc})") from exc
    return instance_from_json(doc)


def jsonable(obj: Any) -> Any:
    """Recursively turn Fractions into "p/q" and sets into sorted lists."""
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, Mapping):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj
