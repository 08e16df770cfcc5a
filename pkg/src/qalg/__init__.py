"""qalg: analysis of q-algebraic functional equations.

Parse an equation, reduce it to normal form, classify its power-series
solutions, compute coefficients exactly or numerically, and derive
asymptotic growth laws for divergent solutions.
"""

from .field import FieldDescriptor, Scalar, adjoin_sqrt, eval_numeric, solve_univariate
from .gaussian import QI
from .parser import canonicalize, parse_equation, parse_to_poly, render
from .qpoly import QPolynomial

__all__ = [
    "FieldDescriptor", "Scalar", "QI", "QPolynomial",
    "adjoin_sqrt", "eval_numeric", "solve_univariate",
    "parse_equation", "parse_to_poly", "canonicalize", "render",
]

__version__ = "0.1.0"
