"""Freiman isomorphisms, condensation and densification of integer sets."""

from freiman.core import IntSet, Poly, PolySystem, SolutionSet, build_hypergraph, measures, solution_set
from freiman.errors import (
    BudgetExceeded,
    FreimanError,
    InputError,
    InternalVerificationError,
    PrecisionError,
    PreconditionError,
)
from freiman.kernels import BACKEND
from freiman.verify import MapTable, Verdict, hypergraph_isomorphic, is_freiman_iso, is_tfold_freiman_iso

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BudgetExceeded",
    "FreimanError",
    "InputError",
    "IntSet",
    "InternalVerificationError",
    "MapTable",
    "Poly",
    "PolySystem",
    "PrecisionError",
    "PreconditionError",
    "SolutionSet",
    "Verdict",
    "build_hypergraph",
    "hypergraph_isomorphic",
    "is_freiman_iso",
    "is_tfold_freiman_iso",
    "measures",
    "solution_set",
]
