"""Fuchsian operators, derivative chains and Perron continued fractions."""

__version__ = "0.1.0"

from .continued_fraction import (
    ContinuedFraction,
    cf_equivalence,
    convergents,
    evaluate,
    from_order2_coefficients,
)
from .derivative_chain import chain_states, logderiv_limit, verify_chain
from .errors import NonConvergenceError, OperatorError, PreconditionError
from .geometry import classify_point, region_guard
from .hypergeometric import HypergeomParams, f21, f21_logderiv, gauss_operator
from .operator_core import (
    DifferentialOperator,
    make_operator,
    recenter,
    singular_points,
    to_delta_poly,
    to_theta_form,
)
from .polynomials import Poly, RatFunc
from .scalars import DOUBLE, EXACT, Backend, GaussRat
from .series_recurrence import ratio_limit, solve_series

__all__ = [
    "Backend",
    "ContinuedFraction",
    "DOUBLE",
    "DifferentialOperator",
    "EXACT",
    "GaussRat",
    "HypergeomParams",
    "NonConvergenceError",
    "OperatorError",
    "Poly",
    "PreconditionError",
    "RatFunc",
    "cf_equivalence",
    "chain_states",
    "classify_point",
    "convergents",
    "evaluate",
    "f21",
    "f21_logderiv",
    "from_order2_coefficients",
    "gauss_operator",
    "logderiv_limit",
    "make_operator",
    "recenter",
    "region_guard",
    "ratio_limit",
    "singular_points",
    "solve_series",
    "to_delta_poly",
    "to_theta_form",
    "verify_chain",
]
