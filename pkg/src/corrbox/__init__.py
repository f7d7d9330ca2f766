"""Exact analysis of two-input two-output bipartite correlation boxes.

Everything except the dimension-deficit helper runs on exact rationals
(fractions.Fraction); there are no floating-point tolerances in the core.
"""

from .boxes import (
    BadWeights,
    Box,
    DeterministicBox,
    Direction,
    NegativeEntry,
    NotNormalized,
    Relabeling,
    box_from_json_obj,
    box_from_table,
    box_to_json_obj,
    classify,
    enumerate_deterministic,
    is_no_signaling,
    mix,
    relabel,
    relabeling_group,
)
from .measures import (
    ChshReport,
    SignalReport,
    UncertaintyReport,
    chsh,
    lhv_admissible,
    signal,
    uncertainty,
    unpredictability,
)
from .lp import DimensionMismatch, LinearProgram, LpSolution, find_alternative_vertex, solve
from .cost import (
    BadDimension,
    CostReport,
    Decomposition,
    NotInHull,
    communication_cost,
    eta_star,
    find_distinct_decompositions,
)
from .generators import (
    TSIRELSON_ANGLES,
    BadParameter,
    FamilySpec,
    UnknownName,
    canonical,
    canonical_names,
    isotropic,
    no_signaling_vertices,
    quantum_box,
    sample,
)
from .verify import FindingsReport, PropertyResult, check_box, fuzz, reproduce_paper

__version__ = "0.1.0"

__all__ = [
    "BadDimension",
    "BadParameter",
    "BadWeights",
    "Box",
    "ChshReport",
    "CostReport",
    "Decomposition",
    "DeterministicBox",
    "DimensionMismatch",
    "Direction",
    "FamilySpec",
    "FindingsReport",
    "LinearProgram",
    "LpSolution",
    "NegativeEntry",
    "NotInHull",
    "NotNormalized",
    "PropertyResult",
    "Relabeling",
    "SignalReport",
    "TSIRELSON_ANGLES",
    "UncertaintyReport",
    "UnknownName",
    "box_from_json_obj",
    "box_from_table",
    "box_to_json_obj",
    "canonical",
    "canonical_names",
    "check_box",
    "chsh",
    "classify",
    "communication_cost",
    "enumerate_deterministic",
    "eta_star",
    "find_alternative_vertex",
    "find_distinct_decompositions",
    "fuzz",
    "is_no_signaling",
    "isotropic",
    "lhv_admissible",
    "mix",
    "no_signaling_vertices",
    "quantum_box",
    "relabel",
    "relabeling_group",
    "reproduce_paper",
    "sample",
    "signal",
    "solve",
    "uncertainty",
    "unpredictability",
]
