from __future__ import annotations

import itertools
import os
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from setmax.constructions import random_instance
from setmax.model import HypergraphFunction
from setmax.systems import Intersection, PartitionMatroid, UniformMatroid

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


# ---------------------------------------------------------------- naive reference oracles


def all_subsets(n):
    for r in range(n + 1):
        yield from (frozenset(c) for c in itertools.combinations(range(n), r))


def naive_opt(f, system):
    """Plain scan of all 2^n subsets; lexicographically smallest maximizer."""
    best = None
    for mask in range(1 << f.n):
        s = frozenset(u for u in range(f.n) if mask >> u & 1)
        if not system.is_independent(s):
            continue
        v = f.value(s)
        key = tuple(sorted(s))
        if best is None or v > best[0] or (v == best[0] and key < best[1]):
            best = (v, key)
    return best[0], frozenset(best[1])


def naive_dep(f, u):
    others = [v for v in range(f.n) if v != u]
    out = set()
    for v in others:
        rest = [w for w in others if w != v]
        for r in range(len(rest) + 1):
            for s in itertools.combinations(rest, r):
                s = frozenset(s)
                if f.value(s | {u, v}) - f.value(s | {v}) != f.value(s | {u}) - f.value(s):
                    out.add(v)
                    break
            if v in out:
                break
    return frozenset(out)


def naive_sdep(f, u):
    others = [v for v in range(f.n) if v != u]
    out = set()
    for v in others:
        rest = [w for w in others if w != v]
        found = False
        for r in range(len(rest) + 1):
            for s in itertools.combinations(rest, r):
                s = frozenset(s)
                if f.value(s | {u, v}) - f.value(s | {v}) > f.value(s | {u}) - f.value(s):
                    found = True
                    break
            if found:
                break
        if found:
            out.add(v)
    return frozenset(out)


# ---------------------------------------------------------------- strategies

fractions = st.builds(Fraction, st.integers(-6, 12), st.integers(1, 4))
positive_fractions = st.builds(Fraction, st.integers(0, 12), st.integers(1, 4))


@st.composite
def hypergraphs(draw, max_n=6, nonnegative=True, min_n=1):
    n = draw(st.integers(min_n, max_n))
    weights = positive_fractions if nonnegative else fractions
    edges = {}
    for _ in range(draw(st.integers(0, 2 * n))):
        members = frozenset(draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=min(n, 3))))
        edges[members] = draw(weights)
    return HypergraphFunction(n, [(sorted(e), w) for e, w in edges.items()])


@st.composite
def partition_matroids(draw, n):
    labels = draw(st.lists(st.integers(0, max(0, n - 1)), min_size=n, max_size=n))
    parts = [[u for u in range(n) if labels[u] == p] for p in sorted(set(labels))]
    caps = [draw(st.integers(1, 2)) for _ in parts]
    return PartitionMatroid(n, parts, caps)


@st.composite
def systems(draw, n):
    kind = draw(st.sampled_from(["uniform", "partition", "intersection"]))
    if kind == "uniform":
        return UniformMatroid(n, draw(st.integers(0, n)))
    if kind == "partition":
        return draw(partition_matroids(n))
    return Intersection([draw(partition_matroids(n)), draw(partition_matroids(n))])


def random_corpus(count, seed, n_range=(2, 10), d_choices=(0, 1, 2), kinds=("uniform", "partition", "intersection")):
    """Deterministic list of random instances with mixed parameters."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(*n_range)
        d = min(rng.choice(d_choices), n - 1)
        kind = kinds[i % len(kinds)]
        frac = rng.choice(("0", "1/2"))
        out.append(random_instance(n, d, kind, seed=rng.randrange(10**9), submodular_fraction=frac))
    return out


# ---------------------------------------------------------------- acceptance reporting

_ACCEPTANCE_LINES: list[str] = []


class CriterionRecorder:
    def __call__(self, number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok


@pytest.fixture
def criterion():
    return CriterionRecorder()


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
