"""Gauss 2F1 as an independent oracle.

The series is summed directly with a rigorous tail bound, derivatives use
the contiguous identity ``F' = (ab/c) F(a+1, b+1, c+1)``, and the
coefficients of the derivative recurrence

    x_n = a_{1,n} x_{n+1} + a_{2,n} x_{n+2},   x_n = F^(n)(z) / n!

come from differentiating ``z(1-z) y'' + (c - (a+b+1) z) y' - ab y = 0``
n times with the Leibniz rule:

    a_{1,n} = (n+1)(c + n - (a+b+2n+1) z) / ((a+n)(b+n))
    a_{2,n} = (n+1)(n+2) z(1-z) / ((a+n)(b+n))
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass

import mpmath

from .continued_fraction import evaluate, from_order2_coefficients
from .errors import NonConvergenceError, PreconditionError
from .geometry import DEFAULT_TIE_TOL, classify_point
from .operator_core import make_operator
from .polynomials import Poly, RatFunc
from .scalars import DOUBLE, EXACT, Backend, GaussRat, is_exact

__all__ = [
    "HypergeomParams",
    "DichotomyReport",
    "f21",
    "f21_partial_sums",
    "f21_derivative_termwise",
    "f21_logderiv",
    "gauss_recurrence_coefficients",
    "gauss_operator",
    "kummer_switch",
    "region_dichotomy_check",
]


def _is_integer(x) -> bool:
    if isinstance(x, GaussRat):
        return x.is_integer()
    x = complex(x)
    return x.imag == 0 and x.real == math.floor(x.real)


@dataclass(frozen=True)
class HypergeomParams:
    a: object
    b: object
    c: object

    def __post_init__(self):
        for name in ("a", "b", "c"):
            if _is_integer(getattr(self, name)):
                raise ValueError(f"parameter {name} = {getattr(self, name)} is an integer")

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in (self.a, self.b, self.c))


@dataclass(frozen=True)
class DichotomyReport:
    z: complex
    side: str  # "left" (Re z < 1/2) or "right"
    cf_value: complex | None
    cf_terms: int
    converged: bool
    oracle_value: complex | None
    error: float | None
    distance_to_bisectors: float
    diagnostics: tuple = ()


def _check_domain(z):
    if abs(complex(z)) >= 1:
        raise PreconditionError(f"|z| = {abs(complex(z)):.6g} is outside the unit disc", reason="domain")


def _mp(x):
    if isinstance(x, GaussRat):
        return mpmath.mpc(mpmath.mpf(x.re.numerator) / x.re.denominator,
                          mpmath.mpf(x.im.numerator) / x.im.denominator)
    if isinstance(x, Fraction):
        return mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator)
    return mpmath.mpc(x)


def f21(params: HypergeomParams, z, tol: float = 1e-16, *, max_terms: int = 200_000, prec: int = 53) -> complex:
    """Sum the Gauss series until the remaining tail is provably below ``tol``.

    For ``n > |c|`` the term ratio beyond ``n`` is at most
    ``rho_n = |z| (1 + |a|/n)(1 + |b|/n) / (1 - |c|/n)``, which decreases in
    ``n``; once ``rho_n < 1`` the tail is below ``|t_n| rho_n / (1 - rho_n)``.
    Terms are accumulated at ``prec + 20`` bits.
    """
    _check_domain(z)
    with mpmath.workprec(prec + 20):
        a, b, c, w = _mp(params.a), _mp(params.b), _mp(params.c), _mp(z)
        A, B, C, Z = abs(a), abs(b), abs(c), abs(w)
        total = mpmath.mpc(1)
        term = mpmath.mpc(1)
        for n in range(max_terms):
            term = term * (a + n) * (b + n) / ((c + n) * (n + 1)) * w
            total += term
            k = n + 1
            if k > C:
                rho = Z * (1 + A / k) * (1 + B / k) / (1 - C / k)
                if rho < 1 and abs(term) * rho / (1 - rho) <= tol * max(1, abs(total)):
                    return complex(total) if prec == 53 else total
        raise NonConvergenceError(f"tail bound not reached within {max_terms} terms", complex(total))


def f21_partial_sums(params: HypergeomParams, z, N: int) -> list:
    """Exact partial sums ``S_0..S_N`` for exact parameters and ``z``."""
    if not (params.exact and is_exact(z)):
        raise TypeError("exact partial sums need exact parameters and z")
    a, b, c, w = (GaussRat._coerce(v) for v in (params.a, params.b, params.c, z))
    term = GaussRat(1)
    total = GaussRat(1)
    out = [total]
    for n in range(N):
        term = term * (a + n) * (b + n) / ((c + n) * (n + 1)) * w
        total = total + term
        out.append(total)
    return out


def f21_derivative_termwise(params: HypergeomParams, z, tol: float = 1e-16, *, max_terms: int = 200_000) -> complex:
    """``F'(z)`` by differentiating the series term by term."""
    _check_domain(z)
    with mpmath.workprec(73):
        a, b, c, w = _mp(params.a), _mp(params.b), _mp(params.c), _mp(z)
        coef = mpmath.mpc(1)  # (a)_n (b)_n / ((c)_n n!)
        total = mpmath.mpc(0)
        powz = mpmath.mpc(1)  # z^(n-1)
        A, B, C, Z = abs(a), abs(b), abs(c), abs(w)
        for n in range(1, max_terms):
            coef = coef * (a + n - 1) * (b + n - 1) / ((c + n - 1) * n)
            term = n * coef * powz
            total += term
            powz *= w
            # next ratio |(a+n)(b+n) z / ((c+n) n)|, bounded as in f21
            if n > C:
                rho = Z * (1 + A / n) * (1 + B / n) / (1 - C / n)
                if rho < 1 and abs(term) * rho / (1 - rho) <= tol * max(1, abs(total)):
                    return complex(total)
        raise NonConvergenceError(f"tail bound not reached within {max_terms} terms", complex(total))


def f21_logderiv(params: HypergeomParams, z, tol: float = 1e-16) -> complex:
    """``F'(z)/F(z)`` via ``F' = (ab/c) F(a+1, b+1, c+1 | z)``."""
    F = f21(params, z, tol)
    if abs(F) < 1e-300 or abs(F) < 100 * tol:
        raise PreconditionError(f"F({z}) is numerically zero", reason="zero_value")
    shifted = HypergeomParams(params.a + 1, params.b + 1, params.c + 1)
    ab_c = complex(params.a) * complex(params.b) / complex(params.c)
    return ab_c * f21(shifted, z, tol) / F


def gauss_recurrence_coefficients(params: HypergeomParams, z):
    """``(n -> a_{1,n}, n -> a_{2,n})``; exact when the inputs are exact."""
    if params.exact and is_exact(z):
        a, b, c, w = (GaussRat._coerce(v) for v in (params.a, params.b, params.c, z))
    else:
        a, b, c, w = (complex(v) for v in (params.a, params.b, params.c, z))

    def a1(n):
        return (n + 1) * (c + n - (a + b + 2 * n + 1) * w) / ((a + n) * (b + n))

    def a2(n):
        return (n + 1) * (n + 2) * (w * (1 - w)) / ((a + n) * (b + n))

    return a1, a2


def gauss_operator(params: HypergeomParams, backend: Backend | None = None):
    """``y'' = ((a+b+1) z - c)/(z(1-z)) y' + ab/(z(1-z)) y`` in standard form."""
    if backend is None:
        backend = EXACT if params.exact else DOUBLE
    a, b, c = (backend.coerce(v) for v in (params.a, params.b, params.c))
    zero, one = backend.zero(), backend.one()
    den = Poly([zero, one, -one])
    q0 = RatFunc(Poly([a * b]), den)
    q1 = RatFunc(Poly([-c, a + b + 1]), den)
    return make_operator("standard", [q0, q1], backend=backend)


def kummer_switch(params: HypergeomParams) -> HypergeomParams:
    """Parameters ``(a, b, a+b-c+1)`` of the solution holomorphic at 1 (evaluate at ``1-z``)."""
    return HypergeomParams(params.a, params.b, params.a + params.b - params.c + 1)


def region_dichotomy_check(params: HypergeomParams, z, tol: float = 1e-13, N_max: int = 300,
                           guard_tol: float = DEFAULT_TIE_TOL) -> DichotomyReport:
    """Evaluate the derivative-recurrence fraction and compare with the branch oracle.

    Left of ``Re z = 1/2`` the fraction should give ``F'/F``; right of it,
    ``d/dz ln F(a, b, a+b-c+1 | 1-z)``.
    """
    info = classify_point([0, 1], z, guard_tol)
    if info.is_tie:
        raise PreconditionError(f"z = {z} lies on Re z = 1/2", reason="on_bisector")
    zc = complex(z)
    side = "left" if info.nearest_index == 0 else "right"
    a1, a2 = gauss_recurrence_coefficients(params, z)
    diags = []
    try:
        ev = evaluate(from_order2_coefficients(a1, a2), tol=tol, N_max=N_max)
        value, n_used, converged = complex(ev.value), ev.n, True
        diags.extend(ev.diagnostics)
    except NonConvergenceError as exc:
        part = exc.partial
        value = None if part.value is None else complex(part.value)
        n_used, converged = part.n, False
        diags.append(f"no convergence within {N_max} terms (distance to the bisector set {info.distance_to_bisectors:.3g})")
    oracle = None
    try:
        if side == "left":
            oracle = f21_logderiv(params, zc)
        else:
            oracle = -f21_logderiv(kummer_switch(params), 1 - zc)
    except PreconditionError as exc:
        diags.append(f"oracle unavailable: {exc}")
    except ValueError as exc:
        diags.append(f"oracle unavailable: {exc}")
    err = None if (oracle is None or value is None) else abs(value - oracle)
    return DichotomyReport(zc, side, value, n_used, converged, oracle, err, info.distance_to_bisectors, tuple(diags))
