"""Independence systems: oracle contract, concrete matroids, exhaustive verifiers."""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .model import InvalidInstanceError, QueryCounter, SizeLimitError, check_members, from_mask, to_mask

VERIFY_CAP = 14


class PreconditionError(ValueError):
    pass


class IndependenceSystem(ABC):
    """Hereditary family of feasible subsets of {0..n-1}, accessed through ``is_independent``.

    ``extendibility`` is the k for which the system is known to be k-extendible
    (1 for matroids, the number of matroids for an intersection), or None.
    """

    kind: str = "custom"
    is_matroid: bool = False

    def __init__(self, n: int, extendibility: int | None = None) -> None:
        if n < 0:
            raise InvalidInstanceError("ground set size must be non-negative")
        self.n = n
        self.extendibility = extendibility
        self.counter = QueryCounter()

    @abstractmethod
    def _independent(self, mask: int) -> bool: ...

    def is_independent(self, s: Iterable[int]) -> bool:
        s = check_members(self.n, s)
        self.counter.incr("independence")
        return self._independent(to_mask(s))

    def is_independent_mask(self, mask: int) -> bool:
        if mask >> self.n:
            raise InvalidInstanceError(f"mask {mask:#x} outside ground set of size {self.n}")
        self.counter.incr("independence")
        return self._independent(mask)


class UniformMatroid(IndependenceSystem):
    kind = "uniform"
    is_matroid = True

    def __init__(self, n: int, k: int) -> None:
        if k < 0:
            raise InvalidInstanceError(f"uniform matroid rank must be >= 0, got {k}")
        super().__init__(n, extendibility=1)
        self.k = k

    def _independent(self, mask: int) -> bool:
        return mask.bit_count() <= self.k

    def __repr__(self) -> str:
        return f"UniformMatroid(n={self.n}, k={self.k})"


class PartitionMatroid(IndependenceSystem):
    """At most ``capacities[i]`` elements from ``parts[i]``; uncovered elements are free."""

    kind = "partition"
    is_matroid = True

    def __init__(self, n: int, parts: Sequence[Iterable[int]], capacities: Sequence[int] | None = None) -> None:
        super().__init__(n, extendibility=1)
        parts_t = tuple(tuple(sorted(check_members(n, p))) for p in parts)
        seen: set[int] = set()
        for p in parts_t:
            if seen.intersection(p):
                raise InvalidInstanceError("partition parts must be pairwise disjoint")
            seen.update(p)
        if capacities is None:
            caps = tuple(1 for _ in parts_t)
        else:
            caps = tuple(int(c) for c in capacities)
            if len(caps) != len(parts_t):
                raise InvalidInstanceError("one capacity per part is required")
            if any(c < 0 for c in caps):
                raise InvalidInstanceError("capacities must be non-negative")
        self.parts = parts_t
        self.capacities = caps
        self._part_masks = [to_mask(p) for p in parts_t]

    def _independent(self, mask: int) -> bool:
        for pmask, cap in zip(self._part_masks, self.capacities):
            if (mask & pmask).bit_count() > cap:
                return False
        return True

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PartitionMatroid)
            and (self.n, self.parts, self.capacities) == (other.n, other.parts, other.capacities)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.parts, self.capacities))

    def __repr__(self) -> str:
        return f"PartitionMatroid(n={self.n}, parts={len(self.parts)})"


class Intersection(IndependenceSystem):
    kind = "intersection"

    def __init__(self, systems: Sequence[IndependenceSystem]) -> None:
        if not systems:
            raise InvalidInstanceError("intersection needs at least one system")
        n = systems[0].n
        if any(s.n != n for s in systems):
            raise InvalidInstanceError("all intersected systems must share the ground set")
        ks = [s.extendibility for s in systems]
        ext = sum(ks) if all(k is not None for k in ks) else None
        super().__init__(n, extendibility=ext)
        self.systems = tuple(systems)
        self.is_matroid = len(systems) == 1 and systems[0].is_matroid

    def _independent(self, mask: int) -> bool:
        return all(s.is_independent_mask(mask) for s in self.systems)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Intersection) and self.systems == other.systems

    def __hash__(self) -> int:
        return hash(self.systems)

    def __repr__(self) -> str:
        return f"Intersection({list(self.systems)!r})"


class CustomSystem(IndependenceSystem):
    """Oracle-backed system; hereditariness is the caller's promise."""

    def __init__(
        self, n: int, oracle: Callable[[frozenset[int]], bool], extendibility: int | None = None
    ) -> None:
        super().__init__(n, extendibility)
        self._oracle = oracle

    def _independent(self, mask: int) -> bool:
        return bool(self._oracle(from_mask(mask)))


def is_independent(system: IndependenceSystem, s: Iterable[int]) -> bool:
    return system.is_independent(s)


def extension_candidates(system: IndependenceSystem, s: Iterable[int]) -> list[int]:
    """Elements u outside S with S + u independent, in ascending order."""
    s = check_members(system.n, s)
    mask = to_mask(s)
    return [u for u in range(system.n) if u not in s and system.is_independent_mask(mask | (1 << u))]


def is_base(system: IndependenceSystem, s: Iterable[int]) -> bool:
    """True iff S is independent and no u outside S can be added.

    Scans candidates in ascending id and stops at the first extension.
    """
    s = check_members(system.n, s)
    mask = to_mask(s)
    if not system.is_independent_mask(mask):
        raise PreconditionError(f"{sorted(s)} is not independent")
    for u in range(system.n):
        if not mask >> u & 1 and system.is_independent_mask(mask | (1 << u)):
            return False
    return True


def extend_to_base(system: IndependenceSystem, s: Iterable[int]) -> frozenset[int]:
    """Greedily add elements in ascending id order until S is a base."""
    s = check_members(system.n, s)
    mask = to_mask(s)
    if not system.is_independent_mask(mask):
        raise PreconditionError(f"{sorted(s)} is not independent")
    for u in range(system.n):
        bit = 1 << u
        if not mask & bit and system.is_independent_mask(mask | bit):
            mask |= bit
    return from_mask(mask)


# ---------------------------------------------------------------- exhaustive verifiers


@dataclass
class Verification:
    ok: bool
    witness: Any = None

    def __bool__(self) -> bool:
        return self.ok


def _require_cap(system: IndependenceSystem, cap: int | None) -> None:
    if cap is not None and system.n > cap:
        raise SizeLimitError(f"n={system.n} exceeds exhaustive cap {cap}")


def independence_table(system: IndependenceSystem, cap: int | None = VERIFY_CAP) -> list[bool]:
    _require_cap(system, cap)
    return [system.is_independent_mask(m) for m in range(1 << system.n)]


def _submasks(mask: int) -> Iterable[int]:
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def verify_hereditary(system: IndependenceSystem, cap: int | None = VERIFY_CAP) -> Verification:
    """Empty set independent and every independent set closed under single removals."""
    table = independence_table(system, cap)
    if not table[0]:
        return Verification(False, (frozenset(), None))
    for mask, ok in enumerate(table):
        if not ok:
            continue
        m = mask
        while m:
            low = m & -m
            if not table[mask ^ low]:
                return Verification(False, (from_mask(mask), low.bit_length() - 1))
            m ^= low
    return Verification(True)


def verify_matroid(system: IndependenceSystem, cap: int | None = VERIFY_CAP) -> Verification:
    """Augmentation property, checked on all independent pairs with |S| = |T| + 1.

    For a hereditary family this is equivalent to the full |S| > |T| statement
    (shrink S to |T| + 1 elements first). The witness is (S, T).
    """
    table = independence_table(system, cap)
    n = system.n
    by_size: dict[int, list[int]] = {}
    for mask, ok in enumerate(table):
        if ok:
            by_size.setdefault(mask.bit_count(), []).append(mask)
    for size, ts in sorted(by_size.items()):
        bigger = by_size.get(size + 1, [])
        for t in ts:
            ext = 0
            for u in range(n):
                bit = 1 << u
                if not t & bit and table[t | bit]:
                    ext |= bit
            for s in bigger:
                if not s & ~t & ext:
                    return Verification(False, (from_mask(s), from_mask(t)))
    return Verification(True)


def verify_k_extendible(system: IndependenceSystem, k: int, cap: int | None = VERIFY_CAP) -> Verification:
    """Exhaustive k-extendibility check.

    For every independent S, T subset of S and u outside T with T + u independent,
    some Y subset of S minus T with |Y| <= k must leave (S minus Y) + u independent.
    The witness is (S, T, u).
    """
    table = independence_table(system, cap)
    n = system.n
    for s, ok in enumerate(table):
        if not ok:
            continue
        small_ys: list[int] | None = None
        for u in range(n):
            bu = 1 << u
            if s & bu or table[s | bu]:
                continue
            if small_ys is None:
                small_ys = [y for y in _submasks(s) if y.bit_count() <= k]
            good = [y for y in small_ys if table[(s & ~y) | bu]]
            for t in _submasks(s):
                if not table[t | bu]:
                    continue
                if not any(y & t == 0 for y in good):
                    return Verification(False, (from_mask(s), from_mask(t), u))
    return Verification(True)


def bases_of(system: IndependenceSystem, s: Iterable[int], table: Sequence[bool] | None = None) -> list[frozenset[int]]:
    s = check_members(system.n, s)
    smask = to_mask(s)
    if table is None:
        _require_cap(system, VERIFY_CAP)
        lookup = system.is_independent_mask
    else:
        lookup = table.__getitem__
    out = []
    for b in _submasks(smask):
        if not lookup(b):
            continue
        rest = smask & ~b
        maximal = True
        while rest:
            low = rest & -rest
            if lookup(b | low):
                maximal = False
                break
            rest ^= low
        if maximal:
            out.append(from_mask(b))
    return out


def k_system_ratio(system: IndependenceSystem, s: Iterable[int] | None = None, cap: int | None = VERIFY_CAP) -> Fraction:
    """Largest-to-smallest base size ratio of S (of the whole system if S is None).

    The ratio is reported as max/min >= 1. When every base of S is empty the
    ratio is 1.
    """
    _require_cap(system, cap)
    if s is None:
        s = range(system.n)
    bases = bases_of(system, s)
    sizes = [len(b) for b in bases]
    lo, hi = min(sizes), max(sizes)
    if lo == 0:
        return Fraction(1)
    return Fraction(hi, lo)


def max_k_system_ratio(system: IndependenceSystem, cap: int | None = VERIFY_CAP) -> Fraction:
    """Max of ``k_system_ratio`` over every S subset of the ground set."""
    table = independence_table(system, cap)
    best = Fraction(1)
    for smask in range(1 << system.n):
        sizes = [len(b) for b in bases_of(system, from_mask(smask), table)]
        lo, hi = min(sizes), max(sizes)
        if lo:
            best = max(best, Fraction(hi, lo))
    return best
