"""Qualitative spatial reasoning with relation variables and generic GAC propagation."""

from .calculi import (Calculus, DirectionUniverse, TernaryCalculus, derive_cyc, derive_point_cd,
                      derive_size_pa, derive_valid_direction_sets, load_rcc8, validate_calculus,
                      validate_ternary)
from .engine import EmptyDomain, FiniteDomain, SetDomain, Store
from .scenarios import (AspectDecl, LinkTable, NeighbourTable, Restriction, Scenario, build, check,
                        decide, link_topo_dir, link_topo_size, neighbour_rcc8, post_object_query)

__all__ = [
    "AspectDecl", "Calculus", "DirectionUniverse", "EmptyDomain", "FiniteDomain", "LinkTable",
    "NeighbourTable", "Restriction", "Scenario", "SetDomain", "Store", "TernaryCalculus", "build",
    "check", "decide", "derive_cyc", "derive_point_cd", "derive_size_pa",
    "derive_valid_direction_sets", "link_topo_dir", "link_topo_size", "load_rcc8",
    "neighbour_rcc8", "post_object_query", "validate_calculus", "validate_ternary",
]
