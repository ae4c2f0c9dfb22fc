"""Semidefinite representations of convex hulls of real plane algebraic curves."""

from .poly import Poly, PolyError, parse_poly
from .rings import (CurveRing, OffCurveError, PlaneQuotient, PointComponent,
                    RingElement, RingError, evaluate, monicize, normal_form, ring_mul)

__all__ = [
    "Poly", "PolyError", "parse_poly",
    "CurveRing", "PlaneQuotient", "PointComponent", "RingElement",
    "RingError", "OffCurveError", "normal_form", "ring_mul", "evaluate", "monicize",
]

__version__ = "0.1.0"
