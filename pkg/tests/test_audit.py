from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import hypergraphs, naive_opt, random_corpus, systems
from setmax.audit import (
    OptCertificate,
    approximation_ratio,
    brute_force_opt,
    check_bounds,
    dep_soundness_audit,
    hybrid_audit,
    max_independent_containing,
)
from setmax.constructions import build_tight_dependency, build_tight_supermodular, random_instance
from setmax.model import HypergraphFunction, OracleBundle, SizeLimitError, exact_sets
from setmax.solvers import (
    extendible_greedy_dependency,
    extendible_greedy_supermodular,
    guess_greedy_uniform,
    simple_greedy_uniform,
)
from setmax.systems import Intersection, PartitionMatroid, UniformMatroid


def test_brute_force_examples():
    f = HypergraphFunction(5, [((0,), 3), ((1,), 7), ((2,), 1), ((3,), 7), ((4,), 2)])
    cert = brute_force_opt(f, UniformMatroid(5, 2))
    assert cert.opt_set == {1, 3} and cert.opt_value == 14
    zero = HypergraphFunction(4, [])
    cert = brute_force_opt(zero, UniformMatroid(4, 2))
    assert cert.opt_set == frozenset() and cert.opt_value == 0
    inst = build_tight_supermodular(1, 2)
    assert brute_force_opt(inst.f, inst.system, cap=None).opt_value == 4


def test_brute_force_caps(monkeypatch):
    f = HypergraphFunction(15, [])
    inter = Intersection([PartitionMatroid(15, [[0, 1]]), PartitionMatroid(15, [[1, 2]])])
    with pytest.raises(SizeLimitError):
        brute_force_opt(f, inter)
    assert brute_force_opt(f, UniformMatroid(15, 3)).opt_value == 0
    monkeypatch.setenv("SETMAX_BRUTE_CAP", "16")
    assert brute_force_opt(f, inter).opt_value == 0
    with pytest.raises(SizeLimitError):
        brute_force_opt(HypergraphFunction(21, []), UniformMatroid(21, 1), cap=20)


@given(hypergraphs(max_n=8), st.data())
def test_brute_force_matches_plain_scan(f, data):
    system = data.draw(systems(f.n))
    cert = brute_force_opt(f, system)
    value, opt_set = naive_opt(f, system)
    assert cert.opt_value == value
    assert cert.opt_set == opt_set


@given(hypergraphs(max_n=7, nonnegative=False), st.data())
def test_brute_force_without_pruning_handles_any_function(f, data):
    system = data.draw(systems(f.n))
    cert = brute_force_opt(f, system, assume_monotone=False)
    assert (cert.opt_value, cert.opt_set) == naive_opt(f, system)


def test_ratio_examples():
    sup = build_tight_supermodular(1, 2, Fraction(1, 10))
    res = extendible_greedy_supermodular(sup.f, sup.system, sup.oracles())
    assert approximation_ratio(res, brute_force_opt(sup.f, sup.system, cap=None)) == Fraction(11, 40)
    dep = build_tight_dependency(1, 1, Fraction(1, 10))
    res = extendible_greedy_dependency(dep.f, dep.system, dep.oracles())
    assert approximation_ratio(res, brute_force_opt(dep.f, dep.system)) == Fraction(11, 20)
    lin = HypergraphFunction(3, [((0,), 1), ((1,), 2)])
    res = extendible_greedy_supermodular(lin, UniformMatroid(3, 3), [frozenset()] * 3)
    assert approximation_ratio(res, brute_force_opt(lin, UniformMatroid(3, 3))) == 1
    zero = HypergraphFunction(2, [])
    res = extendible_greedy_supermodular(zero, UniformMatroid(2, 1), [frozenset()] * 2)
    assert approximation_ratio(res, brute_force_opt(zero, UniformMatroid(2, 1))) == 1


def test_ratio_rejects_other_instance():
    f = HypergraphFunction(2, [((0,), 1)])
    res = extendible_greedy_supermodular(f, UniformMatroid(2, 1), [frozenset()] * 2)
    res.info["fingerprint"] = "a"
    cert = OptCertificate(frozenset({0}), Fraction(1), 1, fingerprint="b")
    with pytest.raises(ValueError):
        approximation_ratio(res, cert)


def test_hybrid_audit_on_tight_supermodular():
    inst = build_tight_supermodular(1, 2)
    res = extendible_greedy_supermodular(inst.f, inst.system, inst.oracles())
    cert = brute_force_opt(inst.f, inst.system, cap=None)
    report = hybrid_audit(inst.f, inst.system, res, cert, "supermodular", cap=None)
    assert report.ok, report.findings
    assert report.hybrids[-1] == res.solution
    assert cert.opt_set <= report.hybrids[0]


def test_hybrid_audit_on_submodular_instance():
    inst = random_instance(9, 1, "partition", seed=3, submodular_fraction=1)
    sets = OracleBundle.exact(inst.f)
    res = extendible_greedy_supermodular(inst.f, inst.system, sets)
    assert res.d_used == 0
    report = hybrid_audit(inst.f, inst.system, res, brute_force_opt(inst.f, inst.system), "supermodular")
    assert report.ok and all(r["factor"] == 1 for r in report.iterations)


def test_hybrid_audit_empty_run():
    f = HypergraphFunction(0, [])
    system = UniformMatroid(0, 0)
    res = extendible_greedy_supermodular(f, system, [])
    report = hybrid_audit(f, system, res, brute_force_opt(f, system), "dependency")
    assert report.ok and report.iterations == []


def test_hybrid_audit_flags_a_bad_trace():
    # a trace that claims a worthless element first cannot satisfy the gain inequality
    f = HypergraphFunction(3, [((0,), 5), ((1,), 5)])
    system = UniformMatroid(3, 1)
    res = extendible_greedy_supermodular(f, system, [frozenset()] * 3)
    from setmax.solvers import GreedyTrace, Iteration

    bad = GreedyTrace()
    bad.push(Iteration(2, frozenset(), Fraction(0), Fraction(0), 0, 0))
    report = hybrid_audit(f, system, bad, brute_force_opt(f, system), "supermodular", d=0)
    assert not report.ok and report.findings
    assert res.solution == {0}


def test_max_independent_containing_prefers_lexicographic():
    p = PartitionMatroid(4, [[0, 1], [2, 3]])
    assert max_independent_containing(p, frozenset({3}), {0, 1, 2, 3}) == {0, 3}


def test_soundness_examples():
    f = HypergraphFunction(4, [((0, 1), 2), ((1, 2), -1), ((1,), 2), ((3,), 1)])
    dep, sdep = exact_sets(f)
    assert dep_soundness_audit(f, dep, "dependency")
    assert dep_soundness_audit(f, sdep, "supermodular")
    widened = [s | {3} for s in dep]
    assert dep_soundness_audit(f, widened, "dependency")
    truncated = [frozenset()] * 4
    res = dep_soundness_audit(f, truncated, "supermodular")
    assert not res
    s, u, v = res.witness
    assert f.value(s | {u, v}) - f.value(s | {v}) > f.value(s | {u}) - f.value(s)
    with pytest.raises(SizeLimitError):
        dep_soundness_audit(HypergraphFunction(13, []), [frozenset()] * 13, "dependency")


def test_check_bounds_cover_every_algorithm():
    inst = random_instance(8, 1, {"type": "uniform", "k": 4}, seed=11)
    o = inst.oracles()
    cert = brute_force_opt(inst.f, inst.system)
    for res in (
        extendible_greedy_supermodular(inst.f, inst.system, o),
        extendible_greedy_dependency(inst.f, inst.system, o),
        simple_greedy_uniform(inst.f, 4, o),
        guess_greedy_uniform(inst.f, 4, o),
    ):
        checks = check_bounds(res, cert, inst.system, o)
        assert checks and all(c.ok for c in checks)


def test_hybrid_audit_on_random_corpus():
    for inst in random_corpus(20, seed=21, n_range=(2, 9)):
        o = inst.oracles()
        cert = brute_force_opt(inst.f, inst.system)
        for solver, mode in ((extendible_greedy_supermodular, "supermodular"), (extendible_greedy_dependency, "dependency")):
            report = hybrid_audit(inst.f, inst.system, solver(inst.f, inst.system, o), cert, mode)
            assert report.ok, report.findings
