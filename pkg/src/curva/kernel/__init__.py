"""Computational substrate: exact scalars, truncated series, bivariate
polynomials, resultants, and exact linear algebra."""

from .scalar import (
    INF,
    ExtNat,
    Scalar,
    ZERO,
    ONE,
    IUNIT,
    ext_add,
    ext_le,
    ext_min,
    format_extnat,
    format_scalar,
    parse_extnat,
    parse_scalar,
)
from .series import Series, support_gcd
from .bipoly import BiPoly, charpoly_mult_matrix, resultant_in_t
from .linalg import Echelon, Subspace, kernel, rank, rref, solve

__all__ = [
    "INF",
    "ExtNat",
    "Scalar",
    "ZERO",
    "ONE",
    "IUNIT",
    "ext_add",
    "ext_le",
    "ext_min",
    "format_extnat",
    "format_scalar",
    "parse_extnat",
    "parse_scalar",
    "Series",
    "support_gcd",
    "BiPoly",
    "charpoly_mult_matrix",
    "resultant_in_t",
    "Echelon",
    "Subspace",
    "kernel",
    "rank",
    "rref",
    "solve",
]
