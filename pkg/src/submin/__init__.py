"""Exact submodular function minimization with optimality certificates."""

from .base import ConvexCombination, ExtremeBase, LinearOrdering, greedy_extreme_base
from .errors import (
    InstanceFormatError,
    InternalInvariantError,
    InvalidSubsetError,
    NotSubmodularError,
    PreconditionError,
)
from .families import ConcaveCardinality, Coverage, CutFunction, ExplicitTable, MatroidRank, make_oracle
from .instances import generate, load_instance, parse_instance
from .oracle import SetFunctionOracle
from .scaling import Certificate, SfmResult, sfm
from .strong import strong_sfm
from .verify import brute_force_min, check_certificate

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "ConcaveCardinality",
    "ConvexCombination",
    "Coverage",
    "CutFunction",
    "ExplicitTable",
    "ExtremeBase",
    "InstanceFormatError",
    "InternalInvariantError",
    "InvalidSubsetError",
    "LinearOrdering",
    "MatroidRank",
    "NotSubmodularError",
    "PreconditionError",
    "SetFunctionOracle",
    "SfmResult",
    "brute_force_min",
    "check_certificate",
    "generate",
    "greedy_extreme_base",
    "load_instance",
    "make_oracle",
    "parse_instance",
    "sfm",
    "strong_sfm",
]
