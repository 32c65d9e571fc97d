"""Set functions over a dense ground set {0..n-1}, with exact rational values.

Element sets are plain ``frozenset[int]``. Every value is a ``fractions.Fraction``
so greedy comparisons and tight-example outputs are exact.
"""

from __future__ import annotations

import itertools
import math
import os
import random
import threading
from abc import ABC, abstractmethod
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

ElementSet = frozenset
Value = Fraction

DEFAULT_DEGREE_CAP = 16
MONOTONE_EXHAUSTIVE_CAP = 14


class InvalidInstanceError(ValueError):
    """An element id, edge or parameter does not fit the instance."""


class SizeLimitError(RuntimeError):
    """An exhaustive computation was asked for on a ground set above its cap."""


def as_fraction(x: Fraction | int | str) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool) or isinstance(x, float):
        raise TypeError(f"refusing inexact value {x!r}")
    return Fraction(x)


def fraction_str(x: Fraction) -> str:
    """Canonical ``p/q`` text form (``q`` always present)."""
    return f"{x.numerator}/{x.denominator}"


def to_mask(members: Iterable[int]) -> int:
    mask = 0
    for u in members:
        mask |= 1 << u
    return mask


def from_mask(mask: int) -> frozenset[int]:
    out = []
    u = 0
    while mask:
        if mask & 1:
            out.append(u)
        mask >>= 1
        u += 1
    return frozenset(out)


def check_members(n: int, members: Iterable[int]) -> frozenset[int]:
    s = frozenset(members)
    for u in s:
        if not isinstance(u, (int, np.integer)) or isinstance(u, bool) or u < 0 or u >= n:
            raise InvalidInstanceError(f"element id {u!r} outside ground set of size {n}")
    return s


def brute_cap_override() -> int | None:
    raw = os.environ.get("SETMAX_BRUTE_CAP")
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise InvalidInstanceError(f"SETMAX_BRUTE_CAP must be an integer, got {raw!r}") from exc


class QueryCounter:
    """Per-oracle call counts, safe to bump from several threads."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._counts: dict[str, int] = {}

    def incr(self, name: str, amount: int = 1) -> None:
        with self._lock:
            self._counts[name] = self._counts.get(name, 0) + amount

    def get(self, name: str) -> int:
        with self._lock:
            return self._counts.get(name, 0)

    def snapshot(self) -> dict[str, int]:
        with self._lock:
            return dict(self._counts)

    def reset(self) -> None:
        with self._lock:
            self._counts.clear()

    def __repr__(self) -> str:
        return f"QueryCounter({self.snapshot()})"


class SetFunction(ABC):
    """Value oracle over {0..n-1}.

    Subclasses implement ``_value(mask)``; it must be pure. ``value`` validates ids
    and counts one ``"value"`` query per call.
    """

    def __init__(self, n: int) -> None:
        if n < 0:
            raise InvalidInstanceError("ground set size must be non-negative")
        self.n = n
        self.counter = QueryCounter()

    @abstractmethod
    def _value(self, mask: int) -> Fraction: ...

    def value(self, s: Iterable[int]) -> Fraction:
        s = check_members(self.n, s)
        self.counter.incr("value")
        return self._value(to_mask(s))

    def value_mask(self, mask: int) -> Fraction:
        if mask >> self.n:
            raise InvalidInstanceError(f"mask {mask:#x} outside ground set of size {self.n}")
        self.counter.incr("value")
        return self._value(mask)

    def __call__(self, s: Iterable[int]) -> Fraction:
        return self.value(s)

    @property
    def ground_set(self) -> frozenset[int]:
        return frozenset(range(self.n))


class HypergraphFunction(SetFunction):
    """f(S) = sum of the weights of hyperedges contained in S.

    The empty hyperedge is not allowed, so f(empty) = 0.
    """

    def __init__(self, n: int, edges: Iterable[tuple[Iterable[int], Fraction | int | str]]) -> None:
        super().__init__(n)
        seen: dict[int, int] = {}
        members_list: list[frozenset[int]] = []
        weights: list[Fraction] = []
        for members, weight in edges:
            s = check_members(n, members)
            if not s:
                raise InvalidInstanceError("empty hyperedge is not allowed")
            mask = to_mask(s)
            if mask in seen:
                raise InvalidInstanceError(f"duplicate hyperedge {sorted(s)}")
            seen[mask] = len(weights)
            members_list.append(s)
            weights.append(as_fraction(weight))
        order = sorted(range(len(weights)), key=lambda i: (len(members_list[i]), sorted(members_list[i])))
        self.edges: tuple[tuple[frozenset[int], Fraction], ...] = tuple(
            (members_list[i], weights[i]) for i in order
        )
        self._masks = [to_mask(e) for e, _ in self.edges]
        self._weights = [w for _, w in self.edges]
        self._cache: dict[int, Fraction] = {}
        self._cache_lock = threading.Lock()
        self._neighbors: list[frozenset[int]] | None = None

    def _value(self, mask: int) -> Fraction:
        cached = self._cache.get(mask)
        if cached is not None:
            return cached
        total = Fraction(0)
        for emask, w in zip(self._masks, self._weights):
            if emask & ~mask == 0:
                total += w
        with self._cache_lock:
            self._cache[mask] = total
        return total

    def neighbors(self, u: int) -> frozenset[int]:
        """Elements sharing a non-zero-weight edge with ``u``."""
        if self._neighbors is None:
            nb: list[set[int]] = [set() for _ in range(self.n)]
            for e, w in self.edges:
                if w == 0 or len(e) < 2:
                    continue
                for v in e:
                    nb[v].update(e)
            for v in range(self.n):
                nb[v].discard(v)
            self._neighbors = [frozenset(s) for s in nb]
        return self._neighbors[u]

    def has_nonnegative_weights(self) -> bool:
        return all(w >= 0 for w in self._weights)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, HypergraphFunction) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        body = ", ".join(f"{sorted(e)}:{w}" for e, w in self.edges)
        return f"HypergraphFunction(n={self.n}, {{{body}}})"


class CallableFunction(SetFunction):
    """Wrap a plain ``frozenset -> number`` callable as a value oracle."""

    def __init__(self, n: int, fn: Callable[[frozenset[int]], Fraction | int]) -> None:
        super().__init__(n)
        self._fn = fn

    def _value(self, mask: int) -> Fraction:
        return as_fraction(self._fn(from_mask(mask)))


def evaluate(f: SetFunction, s: Iterable[int]) -> Fraction:
    return f.value(s)


def marginal_element(f: SetFunction, u: int, s: Iterable[int]) -> Fraction:
    """f(u | S) = f(S + u) - f(S); zero when u is already in S."""
    s = check_members(f.n, s)
    check_members(f.n, (u,))
    if u in s:
        return Fraction(0)
    return f.value(s | {u}) - f.value(s)


def marginal_set(f: SetFunction, t: Iterable[int], s: Iterable[int]) -> Fraction:
    """f(T | S) = f(S ∪ T) - f(S)."""
    s = check_members(f.n, s)
    t = check_members(f.n, t)
    if t <= s:
        return Fraction(0)
    return f.value(s | t) - f.value(s)


# ---------------------------------------------------------------- exhaustive tables


def value_table(f: SetFunction, cap: int | None = DEFAULT_DEGREE_CAP) -> list[Fraction]:
    """f on every subset, indexed by bitmask."""
    if cap is not None and f.n > cap:
        raise SizeLimitError(f"n={f.n} exceeds exhaustive cap {cap}")
    return [f.value_mask(mask) for mask in range(1 << f.n)]


def _integer_array(table: Sequence[Fraction]) -> np.ndarray:
    """Scale a rational table to a common denominator.

    Falls back to an object array when the integers do not fit in int64.
    """
    den = math.lcm(*(x.denominator for x in table)) if table else 1
    ints = [x.numerator * (den // x.denominator) for x in table]
    if max((abs(v) for v in ints), default=0) < 2**61:
        return np.array(ints, dtype=np.int64)
    return np.array(ints, dtype=object)


def exact_sets(f: SetFunction, cap: int | None = DEFAULT_DEGREE_CAP) -> tuple[list[frozenset[int]], list[frozenset[int]]]:
    """Exact (dependency sets, supermodular dependency sets) for every element.

    Enumerates all subsets once; ``v`` is in the dependency set of ``u`` iff some
    S avoiding u and v has f(u | S + v) != f(u | S), and in the supermodular set iff
    some such S has f(u | S + v) > f(u | S).
    """
    n = f.n
    if n == 0:
        return [], []
    vals = _integer_array(value_table(f, cap))
    idx = np.arange(1 << n, dtype=np.int64)
    dep: list[frozenset[int]] = []
    sdep: list[frozenset[int]] = []
    for u in range(n):
        bu = 1 << u
        without_u = idx[(idx & bu) == 0]
        marg = np.zeros(1 << n, dtype=vals.dtype)
        marg[without_u] = vals[without_u | bu] - vals[without_u]
        d_u, s_u = [], []
        for v in range(n):
            if v == u:
                continue
            bv = 1 << v
            base = without_u[(without_u & bv) == 0]
            diff = marg[base | bv] - marg[base]
            if np.any(diff != 0):
                d_u.append(v)
                if np.any(diff > 0):
                    s_u.append(v)
        dep.append(frozenset(d_u))
        sdep.append(frozenset(s_u))
    return dep, sdep


def exact_dependency_set(f: SetFunction, u: int, cap: int | None = DEFAULT_DEGREE_CAP) -> frozenset[int]:
    check_members(f.n, (u,))
    return exact_sets(f, cap)[0][u]


def exact_supermodular_set(f: SetFunction, u: int, cap: int | None = DEFAULT_DEGREE_CAP) -> frozenset[int]:
    check_members(f.n, (u,))
    return exact_sets(f, cap)[1][u]


def dependency_degree(f: SetFunction, cap: int | None = DEFAULT_DEGREE_CAP) -> int:
    dep, _ = exact_sets(f, cap)
    return max((len(s) for s in dep), default=0)


def supermodular_degree(f: SetFunction, cap: int | None = DEFAULT_DEGREE_CAP) -> int:
    _, sdep = exact_sets(f, cap)
    return max((len(s) for s in sdep), default=0)


def hypergraph_dep_superset(f: HypergraphFunction, u: int) -> frozenset[int]:
    """Sound over-approximation of the dependency set of ``u``: its hypergraph neighbours."""
    check_members(f.n, (u,))
    return f.neighbors(u)


@dataclass
class MonotoneCheck:
    monotone: bool
    witness: tuple[frozenset[int], int] | None = None
    exhaustive: bool = True

    def __bool__(self) -> bool:
        return self.monotone


def check_monotone(f: SetFunction, trials: int = 200, seed: int = 0) -> MonotoneCheck:
    """Look for S and u with f(S + u) < f(S).

    Every (S, u) pair is scanned when n <= 14; above that, ``trials`` random
    maximal chains are walked. Returns the first violating pair found.
    """
    n = f.n
    if n <= MONOTONE_EXHAUSTIVE_CAP:
        table = value_table(f, None)
        for mask in range(1 << n):
            for u in range(n):
                bu = 1 << u
                if not mask & bu and table[mask | bu] < table[mask]:
                    return MonotoneCheck(False, (from_mask(mask), u))
        return MonotoneCheck(True)
    rng = random.Random(seed)
    for _ in range(trials):
        order = list(range(n))
        rng.shuffle(order)
        current: set[int] = set()
        prev = f.value(current)
        for u in order:
            nxt = f.value(current | {u})
            if nxt < prev:
                return MonotoneCheck(False, (frozenset(current), u), exhaustive=False)
            current.add(u)
            prev = nxt
    return MonotoneCheck(True, exhaustive=False)


# ---------------------------------------------------------------- oracle bundle

SetOracle = Callable[[int], frozenset[int]]


def _as_oracle(n: int, sets: SetOracle | Mapping[int, Iterable[int]] | Sequence[Iterable[int]]) -> SetOracle:
    if callable(sets):
        return sets
    if isinstance(sets, Mapping):
        table = {u: frozenset(sets.get(u, ())) for u in range(n)}
    else:
        seq = list(sets)
        if len(seq) != n:
            raise InvalidInstanceError(f"expected {n} oracle sets, got {len(seq)}")
        table = {u: frozenset(s) for u, s in enumerate(seq)}
    return table.__getitem__


@dataclass
class OracleBundle:
    """Value oracle plus dependency and supermodular-dependency oracles.

    ``dep``/``sdep`` may return supersets of the true sets; solvers only rely on
    elements outside the returned set never raising (resp. changing) marginals.
    """

    f: SetFunction
    dep_oracle: SetOracle
    sdep_oracle: SetOracle
    counter: QueryCounter = field(default_factory=QueryCounter)

    def __post_init__(self) -> None:
        self._dep_cache: dict[int, frozenset[int]] = {}
        self._sdep_cache: dict[int, frozenset[int]] = {}

    @property
    def n(self) -> int:
        return self.f.n

    def value(self, s: Iterable[int]) -> Fraction:
        return self.f.value(s)

    def dep(self, u: int) -> frozenset[int]:
        check_members(self.n, (u,))
        self.counter.incr("dep")
        out = self._dep_cache.get(u)
        if out is None:
            out = frozenset(self.dep_oracle(u)) - {u}
            self._dep_cache[u] = out
        return out

    def sdep(self, u: int) -> frozenset[int]:
        check_members(self.n, (u,))
        self.counter.incr("sdep")
        out = self._sdep_cache.get(u)
        if out is None:
            out = frozenset(self.sdep_oracle(u)) - {u}
            self._sdep_cache[u] = out
        return out

    @classmethod
    def from_sets(cls, f: SetFunction, dep, sdep=None) -> OracleBundle:
        dep_o = _as_oracle(f.n, dep)
        sdep_o = _as_oracle(f.n, sdep) if sdep is not None else dep_o
        return cls(f, dep_o, sdep_o)

    @classmethod
    def exact(cls, f: SetFunction, cap: int | None = DEFAULT_DEGREE_CAP) -> OracleBundle:
        dep, sdep = exact_sets(f, cap)
        return cls.from_sets(f, dep, sdep)

    @classmethod
    def from_hypergraph(cls, f: HypergraphFunction) -> OracleBundle:
        sets = [hypergraph_dep_superset(f, u) for u in range(f.n)]
        return cls.from_sets(f, sets, sets)


def subsets(items: Sequence[int], max_size: int | None = None) -> Iterable[tuple[int, ...]]:
    """Subsets of ``items`` by ascending size, lexicographic within a size."""
    items = sorted(items)
    top = len(items) if max_size is None else min(max_size, len(items))
    for r in range(top + 1):
        yield from itertools.combinations(items, r)
