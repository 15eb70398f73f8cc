"""Optimal design of line replaceable units.

Given a system's connection graph (parts joined by breakable
connections) and a disassembly precedence graph over those connections,
find the partition of parts into replaceable units that minimises the
average replacement-plus-purchase cost per time unit.

The package offers three routes to a solution: column generation on a
set-partitioning master (exact and fast), a monolithic linearised
binary program (the benchmark formulation), and brute-force enumeration
for desk-scale ground truth.  Structural certificates (connectivity,
cycle freeness, total balancedness, integrality) can be checked on
every solve.
"""
from .costs import Lru, LruDesign, design_cost, is_connected_design, lru_cost
from .disassembly import (
    SuccessorSets,
    boundary_edges,
    compute_successor_sets,
    removal_set,
)
from .fixtures import fixture
from .generator import GeneratorConfig, generate, scale_edge_weights
from .instance import (
    SystemInstance,
    build_instance,
    connected_components,
    dump_instance,
    load_instance,
    validate_instance,
)

__all__ = [
    "SystemInstance",
    "SuccessorSets",
    "Lru",
    "LruDesign",
    "GeneratorConfig",
    "build_instance",
    "validate_instance",
    "connected_components",
    "load_instance",
    "dump_instance",
    "compute_successor_sets",
    "boundary_edges",
    "removal_set",
    "lru_cost",
    "design_cost",
    "is_connected_design",
    "fixture",
    "generate",
    "scale_edge_weights",
]
