"""Instance generators: the two tight examples, reductions and random families.

Every generator is a pure function of its parameters (and seed).
"""

from __future__ import annotations

import itertools
import math
import random
from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .model import (
    MONOTONE_EXHAUSTIVE_CAP,
    HypergraphFunction,
    InvalidInstanceError,
    OracleBundle,
    SetFunction,
    as_fraction,
    check_monotone,
    fraction_str,
    to_mask,
)
from .systems import IndependenceSystem, Intersection, PartitionMatroid, UniformMatroid


@dataclass
class Instance:
    """A value oracle, a constraint, and where they came from.

    ``dep_sets``/``sdep_sets`` are certified oracle answers when the generator
    knows them; otherwise ``oracles()`` falls back to the hypergraph neighbourhood
    (a sound superset) or to exhaustive computation.
    """

    f: SetFunction
    system: IndependenceSystem
    meta: dict[str, Any]
    dep_sets: tuple[frozenset[int], ...] | None = None
    sdep_sets: tuple[frozenset[int], ...] | None = None
    certified: dict[str, Any] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def k(self) -> int | None:
        return self.system.extendibility

    def oracles(self) -> OracleBundle:
        if self.dep_sets is not None:
            return OracleBundle.from_sets(self.f, self.dep_sets, self.sdep_sets or self.dep_sets)
        if isinstance(self.f, HypergraphFunction):
            return OracleBundle.from_hypergraph(self.f)
        return OracleBundle.exact(self.f)


def _verify_monotone(f: SetFunction) -> None:
    if isinstance(f, HypergraphFunction) and f.has_nonnegative_weights():
        return
    check = check_monotone(f) if f.n <= MONOTONE_EXHAUSTIVE_CAP else check_monotone(f, trials=50, seed=0)
    if not check:
        s, u = check.witness
        raise InvalidInstanceError(f"function is not monotone: adding {u} to {sorted(s)} decreases it")


def _positive_eps(eps: Fraction | int | str) -> Fraction:
    eps = as_fraction(eps)
    if eps <= 0:
        raise InvalidInstanceError(f"eps must be positive, got {eps}")
    return eps


def _check_kd(k: int, d: int) -> None:
    if k < 1:
        raise InvalidInstanceError(f"k must be >= 1, got {k}")
    if d < 0:
        raise InvalidInstanceError(f"d must be >= 0, got {d}")


# ---------------------------------------------------------------- supermodular tight example


def tight_supermodular_labels(k: int, d: int) -> list[tuple[int, ...]]:
    """Points (x_1, ..., x_{k+1}) on the side-(d+1)(k+1) grid that are legal elements.

    Legal: some coordinate is at most d, and the last coordinate is 0 or above d.
    Sorted lexicographically; the position in this list is the element id.
    """
    _check_kd(k, d)
    side = (d + 1) * (k + 1)
    out = []
    for p in itertools.product(range(side), repeat=k + 1):
        if min(p) <= d and (p[-1] == 0 or p[-1] > d):
            out.append(p)
    return out


def tight_supermodular_count(k: int, d: int) -> int:
    side = (d + 1) * (k + 1)
    high_rows = side - d - 1
    return side**k + high_rows * (side**k - high_rows**k)


class TightSupermodularFunction(SetFunction):
    """Number of distinct last coordinates hit, plus eps once every diagonal point is present."""

    def __init__(self, k: int, d: int, eps: Fraction | int | str) -> None:
        self.k, self.d, self.eps = k, d, _positive_eps(eps)
        self.labels = tight_supermodular_labels(k, d)
        super().__init__(len(self.labels))
        index = {p: i for i, p in enumerate(self.labels)}
        self.hat = tuple(index[(x,) * k + (0,)] for x in range(d + 1))
        self._hat_mask = to_mask(self.hat)
        row_masks: dict[int, int] = {}
        for u, p in enumerate(self.labels):
            row_masks[p[-1]] = row_masks.get(p[-1], 0) | (1 << u)
        self._row_masks = list(row_masks.values())

    def _value(self, mask: int) -> Fraction:
        out = Fraction(sum(1 for rm in self._row_masks if rm & mask))
        if self._hat_mask & ~mask == 0:
            out += self.eps
        return out


def build_tight_supermodular(k: int, d: int, eps: Fraction | int | str = Fraction(1, 10)) -> Instance:
    """k-intersection instance on which the supermodular greedy earns only 1 + eps.

    The optimum is k(d + 1) + 1, attained by the pairwise-disjoint points
    T*(j), j = 0..k(d+1), whose i-th coordinate is (i(d+1) - j) mod (d+1)(k+1).
    """
    f = TightSupermodularFunction(k, d, eps)
    labels = f.labels
    n = f.n
    side = (d + 1) * (k + 1)
    matroids = []
    for i in range(k):
        parts: dict[int, list[int]] = {}
        for u, p in enumerate(labels):
            parts.setdefault(p[i], []).append(u)
        matroids.append(PartitionMatroid(n, [parts[x] for x in sorted(parts)]))
    system = Intersection(matroids)

    hat = frozenset(f.hat)
    sdep = tuple(hat - {u} if u in hat else frozenset() for u in range(n))
    by_row: dict[int, set[int]] = {}
    for u, p in enumerate(labels):
        by_row.setdefault(p[-1], set()).add(u)
    dep = tuple(
        frozenset((by_row[labels[u][-1]] | (hat if u in hat else set())) - {u}) for u in range(n)
    )

    index = {p: i for i, p in enumerate(labels)}
    star = []
    for j in range(k * (d + 1) + 1):
        point = tuple((i * (d + 1) - j) % side for i in range(1, k + 2))
        star.append(index[point])
    _verify_monotone(f)
    return Instance(
        f,
        system,
        {"construction": "tight-supermodular", "k": k, "d": d, "eps": fraction_str(f.eps)},
        dep_sets=dep,
        sdep_sets=sdep,
        certified={
            "opt_set": sorted(star),
            "opt_value": Fraction(k * (d + 1) + 1),
            "alg_value": 1 + f.eps,
            "hat": sorted(hat),
            "labels": labels,
        },
    )


# ---------------------------------------------------------------- dependency tight example


def tight_dependency_labels(k: int, d: int) -> list[tuple[int, ...]]:
    """Points of {0..k(d+1)-1}^k with at least one coordinate at most d, sorted."""
    _check_kd(k, d)
    side = k * (d + 1)
    return [p for p in itertools.product(range(side), repeat=k) if min(p) <= d]


class TightDependencyFunction(SetFunction):
    """Count of grid elements, plus eps when the origin point and v_1..v_d are all present.

    Ids: grid points first (``labels`` order), then v_0..v_{k(d+1)-1}.
    """

    def __init__(self, k: int, d: int, eps: Fraction | int | str) -> None:
        self.k, self.d, self.eps = k, d, _positive_eps(eps)
        self.labels = tight_dependency_labels(k, d)
        self.num_points = len(self.labels)
        super().__init__(self.num_points + k * (d + 1))
        self.hat = self.labels.index((0,) * k)
        self.v_ids = tuple(self.num_points + x for x in range(k * (d + 1)))
        self._bump_mask = to_mask([self.hat, *self.v_ids[1 : d + 1]])
        self._points_mask = (1 << self.num_points) - 1

    def _value(self, mask: int) -> Fraction:
        out = Fraction((mask & self._points_mask).bit_count())
        if self._bump_mask & ~mask == 0:
            out += self.eps
        return out


def build_tight_dependency(k: int, d: int, eps: Fraction | int | str = Fraction(1, 10)) -> Instance:
    """k-intersection instance on which the dependency greedy earns only 1 + eps; OPT = k(d + 1)."""
    f = TightDependencyFunction(k, d, eps)
    n = f.n
    side = k * (d + 1)
    matroids = []
    for i in range(k):
        parts = [[f.v_ids[x]] for x in range(side)]
        for u, p in enumerate(f.labels):
            parts[p[i]].append(u)
        matroids.append(PartitionMatroid(n, parts))
    system = Intersection(matroids)

    bump = [f.hat, *f.v_ids[1 : d + 1]]
    dep = [frozenset()] * n
    for u in bump:
        dep[u] = frozenset(bump) - {u}
    dep_t = tuple(dep)

    index = {p: i for i, p in enumerate(f.labels)}
    star = [index[tuple((i * (d + 1) - j) % side for i in range(1, k + 1))] for j in range(1, side + 1)]
    _verify_monotone(f)
    certified: dict[str, Any] = {
        "star": sorted(star),
        "alg_value": 1 + f.eps,
        "hat": f.hat,
        "labels": f.labels,
        "v_ids": list(f.v_ids),
    }
    if d >= 1:
        # with d = 0 the bump needs only the origin point, so S* is not certified optimal
        certified.update(opt_set=sorted(star), opt_value=Fraction(side))
    return Instance(
        f,
        system,
        {"construction": "tight-dependency", "k": k, "d": d, "eps": fraction_str(f.eps)},
        dep_sets=dep_t,
        sdep_sets=dep_t,
        certified=certified,
    )


# ---------------------------------------------------------------- r-dimensional matching


def reduce_kdm(edges: Sequence[Sequence[Hashable]], k: int, d: int, r: int | None = None) -> Instance:
    """Encode r-dimensional matching as a k-intersection instance with dependency degree d.

    Each edge e is cut into d + 1 pieces; piece j keeps the vertices on sides
    jk .. jk + k - 1. The objective pays 1 per edge whose d + 1 pieces are all
    chosen (a single hyperedge of weight 1), and matroid j' forbids two pieces
    meeting on a vertex of sides j', j' + k, j' + 2k, ...

    Pieces are distinct elements even when two edges share a piece's vertices.
    When r < k(d + 1), each edge gets its own private vertex on every padding side.
    """
    _check_kd(k, d)
    edges = [tuple(e) for e in edges]
    if r is None:
        r = len(edges[0]) if edges else k * (d + 1)
    if r < 1:
        raise InvalidInstanceError("r must be >= 1")
    if r > k * (d + 1):
        raise InvalidInstanceError(f"r={r} exceeds k(d+1)={k * (d + 1)}")
    for e in edges:
        if len(e) != r:
            raise InvalidInstanceError(f"edge {e!r} does not have exactly one vertex per side (r={r})")
    sides = k * (d + 1)
    pieces = d + 1
    n = len(edges) * pieces

    def vertex(e_idx: int, side: int) -> tuple:
        if side < r:
            return ("v", side, edges[e_idx][side])
        return ("pad", side, e_idx)

    matroids = []
    for jp in range(k):
        parts: dict[tuple, list[int]] = {}
        for e_idx in range(len(edges)):
            for j in range(pieces):
                side = j * k + jp
                parts.setdefault(vertex(e_idx, side), []).append(e_idx * pieces + j)
        matroids.append(PartitionMatroid(n, list(parts.values())))
    system = Intersection(matroids) if matroids else UniformMatroid(n, n)
    f = HypergraphFunction(n, [(range(e * pieces, (e + 1) * pieces), 1) for e in range(len(edges))])
    dep = tuple(frozenset(range((u // pieces) * pieces, (u // pieces + 1) * pieces)) - {u} for u in range(n))
    meta = {
        "construction": "kdm",
        "k": k,
        "d": d,
        "r": r,
        "padded_sides": sides - r,
        "edges": [list(e) for e in edges],
    }
    return Instance(f, system, meta, dep_sets=dep, sdep_sets=dep)


def max_matching_size(edges: Sequence[Sequence[Hashable]]) -> int:
    """Largest set of pairwise vertex-disjoint edges (same side), by exhaustive search."""
    edges = [tuple(e) for e in edges]
    keys = [{(side, v) for side, v in enumerate(e)} for e in edges]
    best = 0
    for size in range(len(edges), 0, -1):
        for combo in itertools.combinations(range(len(edges)), size):
            used: set = set()
            ok = True
            for i in combo:
                if used & keys[i]:
                    ok = False
                    break
                used |= keys[i]
            if ok:
                return size
    return best


# ---------------------------------------------------------------- welfare


def welfare_to_instance(bidders: Sequence[HypergraphFunction]) -> Instance:
    """Bidder-item pairs as elements; each item goes to at most one bidder.

    Element id of (bidder b, item i) is b * items + i.
    """
    if not bidders:
        raise InvalidInstanceError("need at least one bidder")
    items = bidders[0].n
    if any(b.n != items for b in bidders):
        raise InvalidInstanceError("all bidders must value the same item set")
    for b, u in enumerate(bidders):
        if not (u.has_nonnegative_weights() or check_monotone(u)):
            raise InvalidInstanceError(f"bidder {b} has a non-monotone utility")
    n = items * len(bidders)
    lifted = []
    for b, u in enumerate(bidders):
        for members, w in u.edges:
            lifted.append(([b * items + i for i in members], w))
    f = HypergraphFunction(n, lifted)
    parts = [[b * items + i for b in range(len(bidders))] for i in range(items)]
    system = PartitionMatroid(n, parts)
    meta = {"construction": "welfare", "bidders": len(bidders), "items": items}
    return Instance(f, system, meta)


# ---------------------------------------------------------------- graph density


def graph_to_uniform_instance(
    edges: Sequence[tuple[int, int]], delta: Fraction | int | str, num_vertices: int | None = None
) -> Instance:
    """Induced-edge count on a simple graph under a budget of floor(delta |V|) vertices."""
    delta = as_fraction(delta)
    if delta < 0:
        raise InvalidInstanceError("delta must be non-negative")
    norm = []
    seen = set()
    for a, b in edges:
        if a == b:
            raise InvalidInstanceError(f"self-loop at vertex {a}")
        key = (min(a, b), max(a, b))
        if key in seen:
            raise InvalidInstanceError(f"duplicate edge {key}")
        seen.add(key)
        norm.append(key)
    if num_vertices is None:
        num_vertices = 1 + max((b for _, b in norm), default=-1)
    budget = delta * num_vertices
    k = math.floor(budget)
    f = HypergraphFunction(num_vertices, [(e, 1) for e in norm])
    meta = {
        "construction": "graph-uniform",
        "delta": fraction_str(delta),
        "num_vertices": num_vertices,
        "k": k,
        "edges": [list(e) for e in norm],
    }
    if budget != k:
        meta["note"] = f"budget delta*|V| = {fraction_str(budget)} is not integral; using its floor"
    return Instance(f, UniformMatroid(num_vertices, k), meta)


# ---------------------------------------------------------------- random


def _random_weight(rng: random.Random, lo: int, hi: int) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.choice((1, 2, 3, 4)))


def _random_partition(n: int, rng: random.Random, capacity: int = 1) -> PartitionMatroid:
    num_parts = rng.randint(1, max(1, n))
    labels = [rng.randrange(num_parts) for _ in range(n)]
    parts = [[u for u in range(n) if labels[u] == p] for p in range(num_parts)]
    parts = [p for p in parts if p]
    caps = [rng.randint(1, capacity) for _ in parts]
    return PartitionMatroid(n, parts, caps)


def random_constraint(n: int, spec: str | Mapping[str, Any], rng: random.Random) -> IndependenceSystem:
    """Build a constraint from a full JSON record, or draw one of the named kinds at random.

    Named kinds: ``uniform`` (random rank unless ``k`` is given), ``partition``
    and ``intersection`` (``m`` random partition matroids, default 2).
    """
    if isinstance(spec, Mapping):
        if "k" in spec or "parts" in spec or "of" in spec:
            from .io import constraint_from_json

            return constraint_from_json(spec, n)
        kind = spec.get("type")
        params = dict(spec)
    else:
        kind, params = spec, {}
    if kind == "uniform":
        k = params.get("k")
        if k is None:
            k = rng.randint(1, max(1, n - 1))
        return UniformMatroid(n, int(k))
    if kind == "partition":
        return _random_partition(n, rng, int(params.get("max_capacity", 2)))
    if kind == "intersection":
        m = int(params.get("m", 2))
        return Intersection([_random_partition(n, rng, int(params.get("max_capacity", 1))) for _ in range(m)])
    raise InvalidInstanceError(f"unknown constraint kind {kind!r}")


def random_instance(
    n: int,
    d: int,
    constraint: str | Mapping[str, Any] = "uniform",
    seed: int = 0,
    submodular_fraction: Fraction | int | str = 0,
    edge_attempts: int | None = None,
) -> Instance:
    """Random monotone hypergraph function whose co-occurrence sets have size <= d.

    Singleton weights are non-negative. Higher-rank edges only join elements whose
    neighbourhoods stay within d. A ``submodular_fraction`` of pair edges get a
    negative weight, small enough that every marginal stays non-negative.
    """
    if n < 0:
        raise InvalidInstanceError("n must be non-negative")
    if d < 0 or (n > 0 and d > n - 1):
        raise InvalidInstanceError(f"degree bound d={d} infeasible for n={n}")
    frac = as_fraction(submodular_fraction)
    rng = random.Random(seed)
    singles = [_random_weight(rng, 0, 8) for _ in range(n)]
    slack = list(singles)
    neighbours: list[set[int]] = [set() for _ in range(n)]
    edges: dict[frozenset[int], Fraction] = {}
    attempts = 3 * n if edge_attempts is None else edge_attempts
    if d >= 1 and n >= 2:
        for _ in range(attempts):
            size = rng.randint(2, min(d + 1, n))
            members = frozenset(rng.sample(range(n), size))
            if members in edges:
                continue
            if any(len(neighbours[u] | (members - {u})) > d for u in members):
                continue
            if size == 2 and frac > 0 and rng.random() < frac:
                a, b = sorted(members)
                room = min(slack[a], slack[b])
                if room <= 0:
                    continue
                w = -room * Fraction(rng.randint(1, 4), 4)
                slack[a] += w
                slack[b] += w
            else:
                w = Fraction(rng.randint(1, 8), rng.choice((1, 2, 3)))
            edges[members] = w
            for u in members:
                neighbours[u] |= members - {u}
    all_edges = [((u,), w) for u, w in enumerate(singles) if w != 0]
    all_edges += [(tuple(sorted(e)), w) for e, w in sorted(edges.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))]
    f = HypergraphFunction(n, all_edges)
    system = random_constraint(n, constraint, rng)
    _verify_monotone(f)
    meta = {
        "construction": "random",
        "n": n,
        "d": d,
        "seed": seed,
        "constraint": constraint if isinstance(constraint, str) else dict(constraint),
        "submodular_fraction": fraction_str(frac),
    }
    return Instance(f, system, meta)


def hypergraph_from_pairs(n: int, weights: Mapping[Iterable[int], Fraction | int | str]) -> HypergraphFunction:
    return HypergraphFunction(n, [(tuple(k), v) for k, v in weights.items()])


# ---------------------------------------------------------------- random inputs for the reductions


def random_kdm_edges(num_edges: int, r: int, vertices_per_side: int, seed: int = 0) -> list[tuple[int, ...]]:
    """``num_edges`` edges with one vertex per side drawn uniformly from 0..vertices_per_side-1."""
    if num_edges < 0 or r < 1 or vertices_per_side < 1:
        raise InvalidInstanceError("need num_edges >= 0, r >= 1 and at least one vertex per side")
    rng = random.Random(seed)
    return [tuple(rng.randrange(vertices_per_side) for _ in range(r)) for _ in range(num_edges)]


def random_bidders(num_bidders: int, items: int, d: int, seed: int = 0) -> list[HypergraphFunction]:
    """Independent random monotone utilities, each with co-occurrence sets of size <= d."""
    if num_bidders < 1:
        raise InvalidInstanceError("need at least one bidder")
    rng = random.Random(seed)
    return [
        random_instance(items, d, {"type": "uniform", "k": items}, seed=rng.randrange(2**32)).f
        for _ in range(num_bidders)
    ]


def random_graph(num_vertices: int, p: Fraction | int | str, seed: int = 0) -> list[tuple[int, int]]:
    """Erdos-Renyi edge list; each pair a < b is kept with probability p."""
    p = as_fraction(p)
    if not 0 <= p <= 1:
        raise InvalidInstanceError("edge probability must lie in [0, 1]")
    rng = random.Random(seed)
    return [
        (a, b)
        for a in range(num_vertices)
        for b in range(a + 1, num_vertices)
        if rng.random() < p
    ]
