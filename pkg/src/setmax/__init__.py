"""Greedy maximization of monotone set functions with bounded (supermodular) dependency degree."""

from __future__ import annotations

from .audit import (
    AuditReport,
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
    random_instance,
    reduce_kdm,
    welfare_to_instance,
)
from .model import (
    CallableFunction,
    HypergraphFunction,
    InvalidInstanceError,
    OracleBundle,
    SetFunction,
    SizeLimitError,
    check_monotone,
    dependency_degree,
    marginal_element,
    marginal_set,
    supermodular_degree,
)
from .solvers import (
    GreedyTrace,
    SolveResult,
    extendible_greedy_dependency,
    extendible_greedy_supermodular,
    guess_greedy_uniform,
    simple_greedy_uniform,
)
from .systems import Intersection, PartitionMatroid, UniformMatroid

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "CallableFunction",
    "GreedyTrace",
    "HypergraphFunction",
    "Instance",
    "Intersection",
    "InvalidInstanceError",
    "OptCertificate",
    "OracleBundle",
    "PartitionMatroid",
    "SetFunction",
    "SizeLimitError",
    "SolveResult",
    "UniformMatroid",
    "approximation_ratio",
    "brute_force_opt",
    "build_tight_dependency",
    "build_tight_supermodular",
    "check_bounds",
    "check_monotone",
    "dep_soundness_audit",
    "dependency_degree",
    "extendible_greedy_dependency",
    "extendible_greedy_supermodular",
    "graph_to_uniform_instance",
    "guess_greedy_uniform",
    "hybrid_audit",
    "marginal_element",
    "marginal_set",
    "random_instance",
    "reduce_kdm",
    "simple_greedy_uniform",
    "supermodular_degree",
    "welfare_to_instance",
]
