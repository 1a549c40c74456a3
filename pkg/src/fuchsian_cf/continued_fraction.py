"""Continued fractions ``b_0 + a_1/(b_1 + a_2/(b_2 + ...))``.

Convergents follow ``A_n = b_n A_{n-1} + a_n A_{n-2}`` (same for ``B``) from
``A_{-1} = 1, B_{-1} = 0, A_0 = b_0, B_0 = 1``.

A sequence with ``X_j = b_j X_{j+1} + a_{j+1} X_{j+2}`` (and
``X_0 = b_0 X_1 + a_1 X_2``) is recovered from any tail pair by

    X_0 = A_{n-1} X_n + a_n A_{n-2} X_{n+1}
    X_1 = B_{n-1} X_n + a_n B_{n-2} X_{n+1}

so ``X_0/X_1`` is the value of the fraction whenever the tail is minimal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import NonConvergenceError, PreconditionError
from .operator_core import DifferentialOperator, to_standard
from .scalars import GaussRat, is_exact
from .series_recurrence import local_theta, point_backend

__all__ = [
    "ContinuedFraction",
    "ConvergentPair",
    "CFEvaluation",
    "EquivalenceReport",
    "convergents",
    "evaluate",
    "determinant_residuals",
    "from_order2_coefficients",
    "from_recurrence",
    "reconstruct_x0_x1",
    "perron_coefficients",
    "cf_equivalence",
    "branched_fraction_eval",
]


@dataclass(frozen=True)
class ContinuedFraction:
    b0: object
    terms: Callable  # n -> (a_n, b_n), n >= 1
    depth: int | None = None  # None: unbounded

    def term(self, n: int):
        return self.terms(n)


@dataclass(frozen=True)
class ConvergentPair:
    n: int
    A: object
    B: object

    @property
    def value(self):
        return self.A / self.B


@dataclass
class CFEvaluation:
    value: object
    n: int
    converged: bool
    terminated: bool = False
    diagnostics: list = field(default_factory=list)
    history: list = field(default_factory=list)


@dataclass(frozen=True)
class EquivalenceReport:
    offset: int | None
    orientation: str | None  # "A/B" or "B/A"
    rows: tuple  # ((n, chain_value, cf_value, equal), ...)
    all_equal: bool
    note: str = ""


# ---------------------------------------------------------------------------


def convergents(cf: ContinuedFraction, N: int) -> list[ConvergentPair]:
    """Convergents for ``n = -1, 0, ..., N`` (list index is ``n + 1``).

    The list stops early when the fraction terminates, either at its
    declared depth or at a zero partial numerator.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    one = GaussRat(1) if is_exact(cf.b0) else 1
    zero = one - one
    out = [ConvergentPair(-1, one, zero), ConvergentPair(0, cf.b0, one)]
    for n in range(1, N + 1):
        if cf.depth is not None and n > cf.depth:
            break
        a, b = cf.term(n)
        if a == 0:
            break
        p1, p2 = out[-1], out[-2]
        out.append(ConvergentPair(n, b * p1.A + a * p2.A, b * p1.B + a * p2.B))
    return out


def determinant_residuals(cf: ContinuedFraction, pairs: Sequence[ConvergentPair]) -> list:
    """``A_n B_{n-1} - A_{n-1} B_n - (-1)^(n-1) a_1...a_n`` for each ``n >= 1``."""
    out = []
    prod = None
    for i in range(2, len(pairs)):
        n = pairs[i].n
        a, _ = cf.term(n)
        prod = a if prod is None else prod * a
        lhs = pairs[i].A * pairs[i - 1].B - pairs[i - 1].A * pairs[i].B
        out.append(lhs - (-1) ** (n - 1) * prod)
    return out


def evaluate(cf: ContinuedFraction, tol: float = 1e-12, N_max: int = 10_000) -> CFEvaluation:
    """Value at the first ``n`` with ``|A_n/B_n - A_{n-1}/B_{n-1}| < tol``.

    Floating-point convergents are rescaled as they grow; exact ones are
    kept exactly.  ``B_n = 0`` is recorded and skipped.  Raises
    :class:`NonConvergenceError` (with the partial evaluation) otherwise.
    """
    res = CFEvaluation(None, 0, False)
    exact = is_exact(cf.b0)
    A2, B2 = 1, 0
    A1, B1 = cf.b0, 1
    if exact:
        A2, B2, B1 = GaussRat(1), GaussRat(0), GaussRat(1)
    prev = cf.b0
    res.value, res.history = prev, [(0, prev)]
    for n in range(1, N_max + 1):
        if cf.depth is not None and n > cf.depth:
            res.terminated = res.converged = True
            res.diagnostics.append(f"fraction terminates at depth {cf.depth}")
            return res
        a, b = cf.term(n)
        if a == 0:
            res.terminated = res.converged = True
            res.diagnostics.append(f"a_{n} = 0: fraction terminates")
            return res
        A, B = b * A1 + a * A2, b * B1 + a * B2
        A2, B2, A1, B1 = A1, B1, A, B
        if not exact:
            s = max(abs(A), abs(B))
            if s > 1e150 or 0 < s < 1e-150:
                A2, B2, A1, B1 = A2 / s, B2 / s, A1 / s, B1 / s
        if B == 0:
            res.diagnostics.append(f"B_{n} = 0: convergent is infinite")
            prev = None
            continue
        val = A / B
        res.history.append((n, val))
        res.value, res.n = val, n
        if prev is not None and abs(complex(val) - complex(prev)) < tol:
            res.converged = True
            return res
        prev = val
    raise NonConvergenceError(f"continued fraction did not settle within {N_max} terms", res)


def from_order2_coefficients(a1: Callable, a2: Callable, depth: int | None = None) -> ContinuedFraction:
    """Fraction ``1/(a_{1,0} + a_{2,0}/(a_{1,1} + a_{2,1}/(...)))``.

    For ``x_n = a_{1,n} x_{n+1} + a_{2,n} x_{n+2}`` its value is ``x_1/x_0``
    of the minimal solution.  The associated sequence is
    ``X = (x_1, x_0, x_1, x_2, ...)``.
    """
    one = a1(0) ** 0 if is_exact(a1(0)) else 1.0
    zero = one - one

    def terms(n):
        if n == 1:
            return one, a1(0)
        return a2(n - 2), a1(n - 1)

    return ContinuedFraction(zero, terms, depth)


def from_recurrence(a1: Callable, a2: Callable, depth: int | None = None) -> ContinuedFraction:
    """Fraction ``a_{1,0} + a_{2,0}/(a_{1,1} + ...)`` with value ``x_0/x_1``.

    Its associated sequence is ``x`` itself, so :func:`reconstruct_x0_x1`
    returns ``(x_0, x_1)`` directly.
    """
    return ContinuedFraction(a1(0), lambda n: (a2(n - 1), a1(n)), depth)


def reconstruct_x0_x1(pairs: Sequence[ConvergentPair], a_n, x_n, x_n1, n: int | None = None):
    """``(X_0, X_1)`` from the tail values ``X_n, X_{n+1}``.

    ``pairs`` is the output of :func:`convergents` (starting at ``n = -1``);
    ``n`` defaults to the last available index plus one.
    """
    if n is None:
        n = pairs[-1].n + 1
    if n < 1 or n + 1 > len(pairs):
        raise ValueError(f"need convergents through n - 1 = {n - 1}")
    p1, p2 = pairs[n], pairs[n - 1]  # indices n-1 and n-2
    return p1.A * x_n + a_n * p2.A * x_n1, p1.B * x_n + a_n * p2.B * x_n1


# ---------------------------------------------------------------------------
# derivative recurrence at a point


def perron_coefficients(op: DifferentialOperator, z, backend=None):
    """Coefficients of ``x_n = sum_{j=1..k} c_{j,n} x_{n+j}`` with ``x_n = y^(n)(z)/n!``.

    Returns ``(k, coef)`` with ``coef(j, n) = -P_{k-j}(n+j) / P_k(n)`` from
    the theta form about ``z``.
    """
    theta = local_theta(op, z, point_backend(op, z, backend))
    P = theta.coeffs
    k = len(P) - 1
    be = theta.backend

    def coef(j: int, n: int):
        piv = P[k](be.coerce(n))
        if piv == 0:
            raise ZeroDivisionError(f"P_{k}({n}) = 0: the derivative recurrence is blocked at n = {n}")
        return -P[k - j](be.coerce(n + j)) / piv

    return k, coef


def _order2_providers(op, z, backend=None):
    k, coef = perron_coefficients(op, z, backend)
    if k == 2:
        return (lambda n: coef(1, n)), (lambda n: coef(2, n))
    if k == 1:
        zero = coef(1, 0) * 0
        return (lambda n: coef(1, n)), (lambda n: zero)
    raise PreconditionError(
        f"derivative recurrence at z has {k} terms, not a three-term recurrence", reason="not_three_term"
    )


def cf_equivalence(op: DifferentialOperator, z, n_values=range(2, 13), *, offsets=(-2, -1, 0, 1),
                   calibrate=(2, 3), rel_tol: float = 1e-12) -> EquivalenceReport:
    """Compare ``-q_{0,n}(z)/q_{1,n}(z)`` with the convergents of the order-2 fraction.

    The index offset ``nu = n + d`` and the orientation (``A/B`` or ``B/A``)
    are chosen as the unique combination matching exactly at the
    calibration indices, then checked at every ``n``.  Exact data are
    compared for equality, float data to ``rel_tol``.  When ``q_0 = 0`` the
    constants solve the equation and both sides vanish identically.
    """
    from .derivative_chain import chain_states

    if op.order != 2:
        raise PreconditionError("cf_equivalence needs an order-2 operator", reason="order")
    n_max = max(max(n_values), max(calibrate))
    chain = {}
    for st in chain_states(op, n_max):
        q0, q1 = st.evaluate(z)
        chain[st.n] = None if q1 == 0 else -q0 / q1
    if to_standard(op).coeffs[0].is_zero():
        rows = tuple((n, chain.get(n), 0, chain.get(n) == 0) for n in n_values)
        return EquivalenceReport(None, None, rows, all(r[3] for r in rows),
                                 "q_0 = 0: constant solution, both sides vanish")
    a1, a2 = _order2_providers(op, z)
    cf = from_order2_coefficients(a1, a2)
    pairs = convergents(cf, n_max + max(offsets) + 1)

    def cf_value(nu, orient):
        if nu < 0 or nu + 1 >= len(pairs):
            return None
        p = pairs[nu + 1]
        num, den = (p.A, p.B) if orient == "A/B" else (p.B, p.A)
        return None if den == 0 else num / den

    def same(u, v):
        if u is None or v is None:
            return False
        if is_exact(u) and is_exact(v):
            return u == v
        u, v = complex(u), complex(v)
        return abs(u - v) <= rel_tol * max(abs(u), abs(v), 1e-300)

    candidates = [
        (d, o) for d in offsets for o in ("A/B", "B/A")
        if all(same(chain.get(n), cf_value(n + d, o)) for n in calibrate)
    ]
    if not candidates:
        rows = tuple((n, chain.get(n), None, False) for n in n_values)
        return EquivalenceReport(None, None, rows, False, "no offset/orientation matches at the calibration indices")
    note = ""
    if len(candidates) > 1:
        note = f"calibration is ambiguous: {candidates}; using the first"
    d, o = candidates[0]
    rows = []
    for n in n_values:
        u, v = chain.get(n), cf_value(n + d, o)
        rows.append((n, u, v, same(u, v)))
    return EquivalenceReport(d, o, tuple(rows), all(r[3] for r in rows), note)


def branched_fraction_eval(coef: Callable, m: int, depth: int, tail=0):
    """Backward evaluation of the order-``m`` branched fraction for ``x_1/x_0``.

    ``coef(j, n)`` is the coefficient of ``x_{n+j}`` in
    ``x_n = sum_j coef(j, n) x_{n+j}``.  With ``r_n = x_{n+1}/x_n``,

        r_n = 1 / (coef(1,n) + sum_{j>=2} coef(j,n) r_{n+1} ... r_{n+j-1}),

    started from ``r_{depth+i} = tail``.
    """
    if m < 2 or depth < 1:
        raise ValueError("need m >= 2 and depth >= 1")
    r = [tail] * (m - 1)  # r[0] is r_{n+1}
    for n in range(depth - 1, -1, -1):
        den = coef(1, n)
        prod = None
        for j in range(2, m + 1):
            prod = r[j - 2] if prod is None else prod * r[j - 2]
            den = den + coef(j, n) * prod
        if den == 0:
            raise ZeroDivisionError(f"zero denominator at level n = {n}")
        r = [1 / den] + r[:-1]
    return r[0]
