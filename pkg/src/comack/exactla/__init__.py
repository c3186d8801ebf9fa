"""Exact arithmetic: finite fields, polynomials, dense F_q linear algebra, integer determinants."""

from .field import FieldCtx, field_make, is_prime, multiplicative_order
from .intmat import IntMatrix, int_det
from .linalg import (
    Echelon,
    FqMatrix,
    ImageTest,
    in_image,
    inverse,
    is_invertible,
    min_poly,
    nullspace,
    rank,
    rref,
    solve,
)
from .poly import factor_poly

__all__ = [
    "Echelon", "FieldCtx", "FqMatrix", "ImageTest", "IntMatrix", "factor_poly", "field_make",
    "in_image", "int_det", "inverse", "is_invertible", "is_prime", "min_poly",
    "multiplicative_order", "nullspace", "rank", "rref", "solve",
]
