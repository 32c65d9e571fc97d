"""Exact optimum by search, approximation ratios, and per-iteration audits of greedy runs."""

from __future__ import annotations

import itertools
import sys
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Literal

from .model import (
    OracleBundle,
    SetFunction,
    SizeLimitError,
    brute_cap_override,
    check_members,
    from_mask,
    to_mask,
    value_table,
)
from .solvers import GreedyTrace, SolveResult, guess_params, greedy_fraction
from .systems import IndependenceSystem, PartitionMatroid, UniformMatroid, extend_to_base

MATROID_BRUTE_CAP = 20
GENERAL_BRUTE_CAP = 14
HYBRID_CAP = 14
SOUNDNESS_CAP = 12

Mode = Literal["supermodular", "dependency"]
_UNSET: Any = object()


@dataclass
class OptCertificate:
    opt_set: frozenset[int]
    opt_value: Fraction
    enumerated_count: int
    fingerprint: str | None = None


def default_brute_cap(system: IndependenceSystem) -> int:
    override = brute_cap_override()
    if override is not None:
        return override
    if isinstance(system, (UniformMatroid, PartitionMatroid)):
        return MATROID_BRUTE_CAP
    return GENERAL_BRUTE_CAP


def brute_force_opt(
    f: SetFunction,
    system: IndependenceSystem,
    cap: int | None = _UNSET,
    assume_monotone: bool = True,
) -> OptCertificate:
    """Maximum of f over the independent sets, with the lexicographically smallest maximizer.

    Depth-first search over sets grown in ascending id order, so sets are visited
    in lexicographic order of their sorted tuples. Dependent sets are never
    extended. With ``assume_monotone`` a subtree is cut when f of everything it
    could still add cannot beat the incumbent. ``cap=None`` lifts the size cap.
    """
    if f.n != system.n:
        raise ValueError("function and system disagree on the ground set size")
    if cap is _UNSET:
        cap = default_brute_cap(system)
    if cap is not None and f.n > cap:
        raise SizeLimitError(f"n={f.n} exceeds the brute-force cap {cap} (set SETMAX_BRUTE_CAP to override)")

    memo: dict[int, Fraction] = {}

    def val(mask: int) -> Fraction:
        v = memo.get(mask)
        if v is None:
            v = f.value_mask(mask)
            memo[mask] = v
        return v

    # A plain greedy seed: a value known to be attainable, used only for strict pruning.
    seed_val = None
    if assume_monotone:
        mask = 0
        while True:
            best = None
            for u in range(f.n):
                bit = 1 << u
                if mask & bit or not system.is_independent_mask(mask | bit):
                    continue
                v = val(mask | bit)
                if best is None or v > best[1]:
                    best = (bit, v)
            if best is None:
                break
            mask |= best[0]
        seed_val = val(mask)

    best_mask = 0
    best_val: Fraction | None = None
    count = 0

    def node(mask: int, cands: list[int]) -> None:
        nonlocal best_mask, best_val, count
        count += 1
        v = val(mask)
        if best_val is None or v > best_val:
            best_val, best_mask = v, mask
        while cands:
            if assume_monotone:
                bound = val(mask | to_mask(cands))
                if bound <= best_val or (seed_val is not None and bound < seed_val):
                    return
            u, cands = cands[0], cands[1:]
            grown = mask | (1 << u)
            node(grown, [c for c in cands if system.is_independent_mask(grown | (1 << c))])

    root = [u for u in range(f.n) if system.is_independent_mask(1 << u)]
    if not system.is_independent_mask(0):
        raise ValueError("the empty set is not independent")
    limit = sys.getrecursionlimit()
    if limit < f.n + 100:
        sys.setrecursionlimit(f.n + 100)
    node(0, root)
    return OptCertificate(from_mask(best_mask), best_val, count)


def approximation_ratio(result: SolveResult, cert: OptCertificate) -> Fraction:
    """value / OPT exactly; 1 when OPT is 0."""
    fp_r = result.info.get("fingerprint")
    if fp_r is not None and cert.fingerprint is not None and fp_r != cert.fingerprint:
        raise ValueError("result and certificate come from different instances")
    if cert.opt_value == 0:
        return Fraction(1)
    return Fraction(result.value) / cert.opt_value


# ---------------------------------------------------------------- theoretical bounds


def ext_super_factor(k: int, d: int) -> Fraction:
    return Fraction(1, k * (d + 1) + 1)


def ext_dep_factor(k: int, d: int) -> Fraction:
    return Fraction(1, k * (d + 1))


@dataclass
class BoundCheck:
    """One machine-checked inequality ``lhs >= factor * OPT``."""

    name: str
    factor: Fraction
    lhs: Fraction
    rhs: Fraction

    @property
    def ok(self) -> bool:
        return self.lhs >= self.rhs

    def as_dict(self) -> dict[str, Any]:
        from .model import fraction_str

        return {
            "name": self.name,
            "factor": fraction_str(self.factor),
            "lhs": fraction_str(self.lhs),
            "rhs": fraction_str(self.rhs),
            "ok": self.ok,
        }


def guess_optimum_params(
    k: int, opt_set: Iterable[int], n: int, sdep_of: Callable[[int], Iterable[int]]
) -> dict[str, int]:
    """Parameters of the guess the uniform analysis relies on.

    OPT is padded to size k with the smallest unused ids (monotonicity keeps it
    optimal), d' is the largest overlap |sdep(u) ∩ OPT| over u in OPT.
    """
    opt = set(opt_set)
    for u in range(n):
        if len(opt) >= k:
            break
        opt.add(u)
    d_prime = max((len(set(sdep_of(u)) & opt) for u in opt), default=0)
    r, ell, k_prime = guess_params(k, d_prime)
    return {"d_prime": d_prime, "r": r, "ell": ell, "k_prime": k_prime}


def check_bounds(
    result: SolveResult,
    cert: OptCertificate,
    system: IndependenceSystem,
    oracles: OracleBundle | None = None,
) -> list[BoundCheck]:
    """Every guarantee that applies to ``result``, as exact comparisons against OPT."""
    opt = cert.opt_value
    d = result.d_used
    checks: list[BoundCheck] = []
    alg = result.algorithm
    if alg in ("ext-super", "ext-dep"):
        k = system.extendibility
        if k is None:
            return checks
        factor = ext_super_factor(k, d) if alg == "ext-super" else ext_dep_factor(k, d)
        checks.append(BoundCheck(f"{alg}: value >= OPT/(k(d+1){'+1' if alg == 'ext-super' else ''})", factor, result.value, factor * opt))
    elif alg == "simple":
        k, ell = result.info["k"], result.info["ell"]
        factor = greedy_fraction(k, ell)
        after_main = result.info["block_value"]
        checks.append(BoundCheck("simple: f(block phase) >= (1-(1-1/k)^ell) OPT", factor, after_main, factor * opt))
        checks.append(BoundCheck("simple: value >= block phase", Fraction(0), result.value, after_main))
    elif alg == "guess":
        factor = greedy_fraction(result.info["k_prime"], result.info["ell"])
        checks.append(BoundCheck("guess: value >= (1-(1-1/k')^ell) OPT, winning guess", factor, result.value, factor * opt))
        if oracles is not None:
            p = guess_optimum_params(result.info["k"], cert.opt_set, system.n, oracles.sdep)
            factor = greedy_fraction(p["k_prime"], p["ell"])
            checks.append(BoundCheck("guess: value >= (1-(1-1/k')^ell) OPT, optimum-derived guess", factor, result.value, factor * opt))
    elif alg == "brute":
        checks.append(BoundCheck("brute: value = OPT", Fraction(1), result.value, opt))
    return checks



# ---------------------------------------------------------------- hybrid audit


@dataclass
class AuditReport:
    ok: bool
    mode: str
    k: int
    d: int
    iterations: list[dict[str, Any]] = field(default_factory=list)
    findings: list[str] = field(default_factory=list)
    hybrids: list[frozenset[int]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok

    def as_dict(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "mode": self.mode,
            "k": self.k,
            "d": self.d,
            "hybrids": [sorted(h) for h in self.hybrids],
            "iterations": self.iterations,
            "findings": self.findings,
        }


def max_independent_containing(
    system: IndependenceSystem, required: frozenset[int], pool: Iterable[int], cap: int | None = HYBRID_CAP
) -> frozenset[int]:
    """Largest independent set R ∪ X with X ⊆ pool; ties go to the lexicographically smallest X."""
    extra = sorted(set(pool) - required)
    if cap is not None and len(extra) + len(required) > cap:
        raise SizeLimitError(f"hybrid step over {len(extra) + len(required)} elements exceeds cap {cap}")
    rmask = to_mask(required)
    if not system.is_independent_mask(rmask):
        raise ValueError(f"{sorted(required)} is not independent")
    for size in range(len(extra), -1, -1):
        for xs in itertools.combinations(extra, size):
            if system.is_independent_mask(rmask | to_mask(xs)):
                return required | frozenset(xs)
    return required


def hybrid_audit(
    f: SetFunction,
    system: IndependenceSystem,
    run: SolveResult | GreedyTrace,
    cert: OptCertificate,
    mode: Mode,
    d: int | None = None,
    k: int | None = None,
    cap: int | None = HYBRID_CAP,
) -> AuditReport:
    """Replay a greedy run against a chain of hybrid solutions H_0, ..., H_ell.

    H_0 extends OPT to a base in ascending id order; H_i is the largest
    independent subset of H_{i-1} ∪ S_i that contains S_i. At each step:

    * |H_{i-1} \\ H_i| <= k |S_i \\ H_{i-1}| <= k(d + 1);
    * supermodular mode: f(H_{i-1}) - f(H_i) <= k(d + 1) f(D + u | S_{i-1});
    * dependency mode: f(H_{i-1}) - f(H_i) <= (k(d + 1) - 1) f(u | D ∪ S_{i-1}).

    Finally H_ell must equal S_ell. Gains are recomputed from f, not read from the trace.
    """
    if mode not in ("supermodular", "dependency"):
        raise ValueError(f"unknown audit mode {mode!r}")
    if isinstance(run, SolveResult):
        trace = run.trace
        d = run.d_used if d is None else d
    else:
        trace = run
    if d is None:
        raise ValueError("d is required when auditing a bare trace")
    k = system.extendibility if k is None else k
    if k is None:
        raise ValueError("system has no known extendibility k")
    if cap is not None and f.n > cap:
        raise SizeLimitError(f"n={f.n} exceeds hybrid audit cap {cap}")

    report = AuditReport(True, mode, k, d)
    h_prev = extend_to_base(system, cert.opt_set)
    report.hybrids.append(h_prev)
    factor = k * (d + 1) if mode == "supermodular" else k * (d + 1) - 1

    def fail(msg: str) -> None:
        report.ok = False
        report.findings.append(msg)

    for i, it in enumerate(trace.iterations, start=1):
        s_prev, s_i = trace.sets[i - 1], trace.sets[i]
        h_i = max_independent_containing(system, s_i, h_prev | s_i, cap=None)
        lost = len(h_prev - h_i)
        new = len(s_i - h_prev)
        f_h_prev, f_h_i = f.value(h_prev), f.value(h_i)
        drop = f_h_prev - f_h_i
        if mode == "supermodular":
            gain = f.value(s_i) - f.value(s_prev)
        else:
            gain = f.value(s_i) - f.value(s_prev | it.added)
        rec = {
            "i": i,
            "lost": lost,
            "new": new,
            "drop": str(drop),
            "gain": str(gain),
            "factor": factor,
        }
        if lost > k * new:
            fail(f"iteration {i}: |H_(i-1) \\ H_i| = {lost} > k*|S_i \\ H_(i-1)| = {k * new}")
        if new > d + 1:
            fail(f"iteration {i}: |S_i \\ H_(i-1)| = {new} > d + 1 = {d + 1}")
        if drop > factor * gain:
            fail(f"iteration {i}: f(H_(i-1)) - f(H_i) = {drop} > {factor} * {gain}")
        rec["ok"] = lost <= k * new and new <= d + 1 and drop <= factor * gain
        report.iterations.append(rec)
        report.hybrids.append(h_i)
        h_prev = h_i
    if h_prev != trace.sets[-1]:
        fail(f"final hybrid {sorted(h_prev)} differs from the greedy output {sorted(trace.sets[-1])}")
    return report


# ---------------------------------------------------------------- oracle soundness


@dataclass
class SoundnessResult:
    ok: bool
    witness: tuple[frozenset[int], int, int] | None = None

    def __bool__(self) -> bool:
        return self.ok


def dep_soundness_audit(
    f: SetFunction,
    oracle_sets: Callable[[int], Iterable[int]] | Sequence[Iterable[int]],
    mode: Mode,
    cap: int | None = SOUNDNESS_CAP,
) -> SoundnessResult:
    """Check that every v outside oracle(u) leaves u's marginal unchanged (or never raises it).

    Dependency mode requires f(u | S + v) = f(u | S); supermodular mode requires <=.
    The witness of a failure is (S, u, v).
    """
    if mode not in ("supermodular", "dependency"):
        raise ValueError(f"unknown audit mode {mode!r}")
    if cap is not None and f.n > cap:
        raise SizeLimitError(f"n={f.n} exceeds soundness audit cap {cap}")
    lookup = oracle_sets if callable(oracle_sets) else (lambda u: oracle_sets[u])
    table = value_table(f, cap=None)
    n = f.n
    for u in range(n):
        allowed = check_members(n, lookup(u)) | {u}
        bu = 1 << u
        for v in range(n):
            if v in allowed:
                continue
            bv = 1 << v
            for s in range(1 << n):
                if s & (bu | bv):
                    continue
                before = table[s | bu] - table[s]
                after = table[s | bv | bu] - table[s | bv]
                bad = after > before if mode == "supermodular" else after != before
                if bad:
                    return SoundnessResult(False, (from_mask(s), u, v))
    return SoundnessResult(True)


__all__ = [
    "AuditReport",
    "BoundCheck",
    "OptCertificate",
    "SoundnessResult",
    "approximation_ratio",
    "brute_force_opt",
    "check_bounds",
    "default_brute_cap",
    "dep_soundness_audit",
    "ext_dep_factor",
    "ext_super_factor",
    "guess_optimum_params",
    "hybrid_audit",
    "max_independent_containing",
]
