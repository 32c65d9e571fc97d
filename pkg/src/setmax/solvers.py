"""Greedy maximizers driven by (supermodular) dependency oracles.

All four solvers share ``best_pair``: pick an element u and a subset D of its
oracle set, scored either jointly, f(D + u | S), or conditionally,
f(u | D ∪ S). Ties go to the smallest u, then the lexicographically smallest
sorted D, so traces are reproducible.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Literal, Union

from .model import OracleBundle, SetFunction, _as_oracle, check_members, to_mask
from .systems import IndependenceSystem, UniformMatroid

Objective = Literal["joint", "conditional"]


@dataclass(frozen=True)
class Iteration:
    element: int
    added: frozenset[int]
    gain: Fraction
    score: Fraction
    value_queries: int
    independence_queries: int


@dataclass
class GreedyTrace:
    start: frozenset[int] = frozenset()
    iterations: list[Iteration] = field(default_factory=list)
    sets: list[frozenset[int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.sets:
            self.sets.append(self.start)

    def push(self, it: Iteration) -> None:
        self.iterations.append(it)
        self.sets.append(self.sets[-1] | it.added | {it.element})

    def __len__(self) -> int:
        return len(self.iterations)


@dataclass
class SolveResult:
    algorithm: str
    solution: frozenset[int]
    value: Fraction
    trace: GreedyTrace
    d_used: int
    queries: dict[str, int] = field(default_factory=dict)
    info: dict[str, Any] = field(default_factory=dict)


OracleLike = Union[Callable[[int], Iterable[int]], Mapping[int, Iterable[int]], Sequence[Iterable[int]], OracleBundle]


def _oracle(f: SetFunction, sets: OracleLike, which: str) -> Callable[[int], frozenset[int]]:
    if isinstance(sets, OracleBundle):
        fn = sets.sdep if which == "sdep" else sets.dep
    else:
        fn = _as_oracle(f.n, sets)
    cache: dict[int, frozenset[int]] = {}

    def lookup(u: int) -> frozenset[int]:
        out = cache.get(u)
        if out is None:
            out = frozenset(fn(u)) - {u}
            check_members(f.n, out)
            cache[u] = out
        return out

    return lookup


def _max_degree(f: SetFunction, dep_of: Callable[[int], frozenset[int]]) -> int:
    return max((len(dep_of(u)) for u in range(f.n)), default=0)


class _Memo:
    """Per-solve cache of f on bitmasks; each distinct mask costs one value query."""

    def __init__(self, f: SetFunction) -> None:
        self.f = f
        self.values: dict[int, Fraction] = {}

    def __call__(self, mask: int) -> Fraction:
        v = self.values.get(mask)
        if v is None:
            v = self.f.value_mask(mask)
            self.values[mask] = v
        return v


@dataclass(frozen=True)
class Pair:
    element: int
    added: tuple[int, ...]
    score: Fraction
    value_after: Fraction


def best_pair(
    f: SetFunction,
    system: IndependenceSystem | None,
    s: Iterable[int],
    candidates: Iterable[int],
    dep_of: Callable[[int], Iterable[int]],
    objective: Objective = "joint",
    size_cap: int | None = None,
    *,
    _memo: _Memo | None = None,
) -> Pair | None:
    """Best (u, D) with u a candidate outside S and D a subset of dep_of(u) minus S.

    ``system=None`` skips feasibility checks (uniform solvers guarantee them by
    counting). ``size_cap`` bounds |D|. Returns None when no pair is feasible.
    """
    if objective not in ("joint", "conditional"):
        raise ValueError(f"unknown objective {objective!r}")
    s = frozenset(s)
    smask = to_mask(s)
    memo = _memo or _Memo(f)
    f_s = None
    best: Pair | None = None
    for u in sorted(set(candidates) - s):
        bu = 1 << u
        if system is not None and not system.is_independent_mask(smask | bu):
            continue
        pool = sorted(frozenset(dep_of(u)) - s - {u})
        top = len(pool) if size_cap is None else min(size_cap, len(pool))
        for r in range(top + 1):
            for d in itertools.combinations(pool, r):
                base = smask | to_mask(d)
                if system is not None and d and not system.is_independent_mask(base | bu):
                    continue
                after = memo(base | bu)
                if objective == "joint":
                    if f_s is None:
                        f_s = memo(smask)
                    score = after - f_s
                else:
                    score = after - memo(base)
                if best is None or score > best.score or (
                    score == best.score and (u, d) < (best.element, best.added)
                ):
                    best = Pair(u, d, score, after)
    return best


class _Meter:
    def __init__(self, f: SetFunction, system: IndependenceSystem | None) -> None:
        self.f, self.system = f, system
        self.v0 = f.counter.get("value")
        self.i0 = system.counter.get("independence") if system is not None else 0
        self.mark()

    def mark(self) -> None:
        self._v = self.f.counter.get("value")
        self._i = self.system.counter.get("independence") if self.system is not None else 0

    def since_mark(self) -> tuple[int, int]:
        v = self.f.counter.get("value") - self._v
        i = (self.system.counter.get("independence") - self._i) if self.system is not None else 0
        self.mark()
        return v, i

    def total(self) -> dict[str, int]:
        v = self.f.counter.get("value") - self.v0
        i = (self.system.counter.get("independence") - self.i0) if self.system is not None else 0
        return {"value": v, "independence": i}


def _extendible_greedy(
    name: str, f: SetFunction, system: IndependenceSystem, dep_of, objective: Objective
) -> SolveResult:
    if system.n != f.n:
        raise ValueError("function and system disagree on the ground set size")
    meter = _Meter(f, system)
    memo = _Memo(f)
    d_used = _max_degree(f, dep_of)
    trace = GreedyTrace(frozenset())
    current = frozenset()
    value = memo(0)
    everything = range(f.n)
    while True:
        pair = best_pair(f, system, current, everything, dep_of, objective, _memo=memo)
        if pair is None:
            break
        added = frozenset(pair.added)
        gain = pair.value_after - value
        vq, iq = meter.since_mark()
        trace.push(Iteration(pair.element, added, gain, pair.score, vq, iq))
        current = current | added | {pair.element}
        value = pair.value_after
    return SolveResult(name, current, value, trace, d_used, meter.total())


def extendible_greedy_supermodular(f: SetFunction, system: IndependenceSystem, sdep: OracleLike) -> SolveResult:
    """Greedy for k-extendible systems using the supermodular oracle.

    Each step adds the feasible pair (u, D ⊆ sdep(u)) of largest joint gain
    f(D + u | S) and stops once S is a base. Guarantees
    f(S) >= OPT / (k(d + 1) + 1) for d the largest oracle set.
    """
    return _extendible_greedy("ext-super", f, system, _oracle(f, sdep, "sdep"), "joint")


def extendible_greedy_dependency(f: SetFunction, system: IndependenceSystem, dep: OracleLike) -> SolveResult:
    """Same loop with the dependency oracle and the conditional score f(u | D ∪ S).

    Guarantees f(S) >= OPT / (k(d + 1)).
    """
    return _extendible_greedy("ext-dep", f, system, _oracle(f, dep, "dep"), "conditional")


def _check_k(k: int, n: int) -> int:
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    return min(k, n)


def simple_greedy_uniform(f: SetFunction, k: int, sdep: OracleLike) -> SolveResult:
    """Cardinality-constrained greedy that adds whole blocks sdep(u) + u.

    Runs floor(k / (d + 1)) block iterations, then, if room is left, one
    completion step choosing u and D ⊆ sdep(u) with |D + u| no larger than the
    remaining budget.
    """
    k = _check_k(k, f.n)
    system = UniformMatroid(f.n, k)
    sdep_of = _oracle(f, sdep, "sdep")
    meter = _Meter(f, None)
    memo = _Memo(f)
    d = _max_degree(f, sdep_of)
    ell = k // (d + 1)
    trace = GreedyTrace(frozenset())
    current: frozenset[int] = frozenset()
    value = memo(0)
    for _ in range(ell):
        best = None
        for u in range(f.n):
            if u in current:
                continue
            block = (sdep_of(u) - current) | {u}
            after = memo(to_mask(current | block))
            if best is None or after > best[1]:
                best = (u, after, block)
        if best is None:
            break
        u, after, block = best
        vq, iq = meter.since_mark()
        trace.push(Iteration(u, block - {u}, after - value, after - value, vq, iq))
        current = current | block
        value = after
    main_iterations = len(trace)
    block_value = value
    if len(current) < k:
        pair = best_pair(f, None, current, range(f.n), sdep_of, "joint", k - len(current) - 1, _memo=memo)
        if pair is not None:
            vq, iq = meter.since_mark()
            added = frozenset(pair.added)
            trace.push(Iteration(pair.element, added, pair.value_after - value, pair.score, vq, iq))
            current = current | added | {pair.element}
            value = pair.value_after
    assert system.is_independent(current)
    return SolveResult(
        "simple", current, value, trace, d, meter.total(), {"k": k, "ell": ell, "main_iterations": main_iterations, "block_value": block_value},
    )


def guess_candidates(f: SetFunction, sdep_of: Callable[[int], frozenset[int]]) -> list[tuple[int, tuple[int, ...]]]:
    """Distinct guesses C in enumeration order, each tagged with the first u* producing it.

    Order: ascending u*, then subsets of sdep(u*) by ascending size and
    lexicographically within a size. A run depends on C alone, so repeats are skipped.
    """
    seen: set[tuple[int, ...]] = set()
    out: list[tuple[int, tuple[int, ...]]] = []
    for u in range(f.n):
        pool = sorted(sdep_of(u))
        for r in range(len(pool) + 1):
            for c in itertools.combinations(pool, r):
                if c not in seen:
                    seen.add(c)
                    out.append((u, c))
    return out


def _guess_run(f, sdep_of, k: int, c: tuple[int, ...], memo: _Memo, meter: _Meter):
    d_prime = len(c)
    r = k % (d_prime + 1)
    ell = (k - r) // (d_prime + 1)
    start = frozenset(c[:r])
    trace = GreedyTrace(start)
    current = start
    value = memo(to_mask(start))
    meter.mark()
    for _ in range(ell):
        pair = best_pair(f, None, current, range(f.n), sdep_of, "joint", d_prime, _memo=memo)
        if pair is None:
            break
        added = frozenset(pair.added)
        vq, iq = meter.since_mark()
        trace.push(Iteration(pair.element, added, pair.value_after - value, pair.score, vq, iq))
        current = current | added | {pair.element}
        value = pair.value_after
    return current, value, trace, {"d_prime": d_prime, "r": r, "ell": ell, "k_prime": k - r}


def guess_greedy_uniform(f: SetFunction, k: int, sdep: OracleLike) -> SolveResult:
    """Best output over all guesses C ⊆ sdep(u*) of the greedy with block size |C| + 1.

    For a guess with d' = |C|, the run starts from the r = k mod (d' + 1)
    smallest ids of C and performs (k - r) / (d' + 1) steps, each adding u and
    at most d' of its oracle set. The first guess reaching the best value wins.
    """
    k = _check_k(k, f.n)
    system = UniformMatroid(f.n, k)
    sdep_of = _oracle(f, sdep, "sdep")
    meter = _Meter(f, None)
    memo = _Memo(f)
    d = _max_degree(f, sdep_of)
    best = None
    guesses = guess_candidates(f, sdep_of) or [(None, ())]
    for u_star, c in guesses:
        current, value, trace, params = _guess_run(f, sdep_of, k, c, memo, meter)
        if best is None or value > best[1]:
            best = (current, value, trace, {**params, "u_star": u_star, "guess": list(c)})
    current, value, trace, params = best
    assert system.is_independent(current)
    params.update(k=k, guesses=len(guesses))
    return SolveResult("guess", current, value, trace, d, meter.total(), params)


def greedy_fraction(k_prime: int, ell: int) -> Fraction:
    """1 - (1 - 1/k')^ell, the guaranteed fraction of OPT for one guess (0 when k' = 0)."""
    if k_prime <= 0:
        return Fraction(0)
    return 1 - (1 - Fraction(1, k_prime)) ** ell


def guess_params(k: int, d_prime: int) -> tuple[int, int, int]:
    """(r, ell, k') for a guess of size d'."""
    r = k % (d_prime + 1)
    return r, (k - r) // (d_prime + 1), k - r


__all__ = [
    "GreedyTrace",
    "Iteration",
    "Pair",
    "SolveResult",
    "best_pair",
    "extendible_greedy_dependency",
    "extendible_greedy_supermodular",
    "guess_candidates",
    "guess_greedy_uniform",
    "guess_params",
    "greedy_fraction",
    "simple_greedy_uniform",
]
