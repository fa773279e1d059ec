"""Exact recurrence relations for exceptional orthogonal polynomials.

Exact rational arithmetic throughout (``fractions.Fraction``); gmpy2 is used
only for the numeric orthogonality checks.
"""

from .classical import Curve, FamilySpec, Kind, monic
from .errors import XopError
from .ratpoly import Poly, RatFunc
from .recurrence import (
    CoeffTable,
    lemma2_constants,
    multiplier,
    recurrence_2j3,
    recurrence_4j1,
)
from .xop import XopSpec, apply_darboux, degree_set, validate, weight_data, xop_poly

__all__ = [
    "CoeffTable",
    "Curve",
    "FamilySpec",
    "Kind",
    "Poly",
    "RatFunc",
    "XopError",
    "XopSpec",
    "apply_darboux",
    "degree_set",
    "lemma2_constants",
    "monic",
    "multiplier",
    "recurrence_2j3",
    "recurrence_4j1",
    "validate",
    "weight_data",
    "xop_poly",
]
