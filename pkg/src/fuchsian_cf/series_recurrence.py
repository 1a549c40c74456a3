"""Taylor-coefficient recurrences, series solutions and ratio limits.

For an operator ``sum_i z^i P_i(delta)`` the coefficients of a power-series
solution ``f = sum f_n z^n`` satisfy

    f_{n+k} + sum_{j<k} a_{j,n} f_{n+j} = 0,   a_{j,n} = P_{k-j}(n+j) / P_0(n+k).

The ratio ``f_{n+1}/f_n`` of a generic solution tends to ``1/(t - z0)`` for
the singularity ``t`` that bounds the disc of convergence around ``z0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import NonConvergenceError, PreconditionError
from .operator_core import (
    DifferentialOperator,
    recenter,
    singular_points,
    to_backend,
    to_standard,
    to_theta_form,
)
from .polynomials import Poly
from .roots import nonneg_integer_roots, poly_roots
from .scalars import DOUBLE, Backend, is_exact

__all__ = [
    "RecurrenceSystem",
    "SeriesSolution",
    "RatioEstimate",
    "CharpolyReport",
    "EventuallyZeroError",
    "build_recurrence",
    "local_theta",
    "point_backend",
    "solve_series",
    "series_from_coefficients",
    "ratio_limit",
    "richardson",
    "characteristic_polynomial",
    "charpoly_vs_reciprocal_roots",
    "poincare_distinct_modulus_check",
    "match_roots",
]


class EventuallyZeroError(ArithmeticError):
    """The coefficient tail vanishes: the solution is a polynomial."""


@dataclass(frozen=True)
class RecurrenceSystem:
    order: int
    numerators: tuple  # Poly in n for j = 0..k-1
    pivot: Poly  # P_0(n + k)
    limits: tuple  # lim a_{j,n}; None where the limit is infinite
    blocked_indices: tuple
    backend: Backend

    def coefficient(self, j: int, n: int):
        nn = self.backend.coerce(n)
        return self.numerators[j](nn) / self.pivot(nn)


@dataclass(frozen=True)
class SeriesSolution:
    center: object
    coefficients: tuple
    source: str  # "recurrence" | "oracle"
    initial: tuple = ()
    singularities: tuple = ()


@dataclass(frozen=True)
class RatioEstimate:
    limit: complex
    radius: float
    matched_singularity: int | None
    history: tuple  # ((n, f_{n+1}/f_n), ...)
    accelerated: bool
    estimates: tuple = ()


@dataclass(frozen=True)
class CharpolyReport:
    char_roots: tuple
    reciprocal_roots: tuple
    max_mismatch: float
    exact_identity: bool | None
    passed: bool
    note: str = ""


# ---------------------------------------------------------------------------


def build_recurrence(theta_op: DifferentialOperator) -> RecurrenceSystem:
    if theta_op.form != "theta":
        theta_op = to_theta_form(theta_op)
    P = theta_op.coeffs
    if P[0].is_zero():
        raise PreconditionError("P_0 vanishes identically", reason="invalid_operator")
    k = len(P) - 1
    pivot = P[0].shift(k)
    nums = tuple(P[k - j].shift(j) for j in range(k))
    limits = []
    for num in nums:
        if num.is_zero() or num.degree < pivot.degree:
            limits.append(theta_op.backend.zero())
        elif num.degree == pivot.degree:
            limits.append(num.lc / pivot.lc)
        else:
            limits.append(None)
    blocked = tuple(r - k for r in nonneg_integer_roots(P[0]) if r - k >= 0)
    return RecurrenceSystem(k, nums, pivot, tuple(limits), blocked, theta_op.backend)


def point_backend(op: DifferentialOperator, z, backend: Backend | None = None) -> Backend:
    """Backend for work at ``z``: explicit choice, else float for a float ``z``."""
    if backend is not None:
        return backend
    if op.exact and not is_exact(z):
        return DOUBLE
    return op.backend


def local_theta(op: DifferentialOperator, z0, backend: Backend | None = None) -> DifferentialOperator:
    """Theta form of ``op`` about ``z0`` in the requested backend.

    Exact operators are recentred exactly (a float ``z0`` is taken at its
    binary value) and only then rounded, so float work starts from correctly
    rounded local coefficients.
    """
    backend = backend or op.backend
    local = recenter(op, z0)
    theta = to_theta_form(local)
    if backend != theta.backend:
        theta = to_backend(theta, backend)
    return theta


def _is_ordinary_at_zero(local_std: DifferentialOperator) -> bool:
    for q in local_std.coeffs:
        if q.num.is_zero():
            continue
        d0 = q.den.coeff(0)
        if d0 == 0:
            return False
    return True


def solve_series(op: DifferentialOperator, z0, initial: Sequence, N: int, backend: Backend | None = None,
                 with_singularities: bool = True) -> SeriesSolution:
    """Taylor coefficients ``f_0..f_N`` about an ordinary point ``z0``.

    ``initial`` gives ``f_j = y^(j)(z0)/j!`` for ``j < m``.
    """
    m = op.order
    backend = point_backend(op, z0, backend)
    if len(initial) != m:
        raise ValueError(f"need {m} initial values, got {len(initial)}")
    if N < m:
        raise ValueError("N must be at least the order")
    local_std = to_standard(recenter(op, z0))
    if not _is_ordinary_at_zero(local_std):
        raise PreconditionError(f"{z0} is a singular point of the operator", reason="singular_center")
    theta = local_theta(op, z0, backend)
    P = theta.coeffs
    k = len(P) - 1
    with backend.context():
        f = [backend.coerce(v) for v in initial]
        for n in range(N + 1):
            acc = backend.zero()
            for i in range(1, min(k, n) + 1):
                if n - i >= len(f):
                    continue
                w = P[i](backend.coerce(n - i))
                if w != 0:
                    acc = acc + w * f[n - i]
            if n < m:
                if backend.exact and acc != 0:
                    raise ArithmeticError(f"low-index restriction violated at n={n}")
                continue
            piv = P[0](backend.coerce(n))
            if piv == 0:
                raise AssertionError(f"pivot P_0({n}) vanished at an ordinary point")
            f.append(-acc / piv)
    sing = tuple(singular_points(op)) if with_singularities else ()
    return SeriesSolution(z0, tuple(f), "recurrence", tuple(initial), sing)


def series_from_coefficients(center, coefficients: Sequence, singularities: Sequence = ()) -> SeriesSolution:
    return SeriesSolution(center, tuple(coefficients), "oracle", (), tuple(singularities))


# ---------------------------------------------------------------------------
# ratio limits


def richardson(values: Sequence, start: int, order: int) -> list:
    """Richardson extrapolation in ``1/n`` of a sequence indexed from ``start``.

    ``R_n = sum_j (-1)^(p-j) (n+j)^p r_{n+j} / (j! (p-j)!)`` removes the
    ``1/n, ..., 1/n^p`` terms of ``r_n = L + c_1/n + ...``.
    """
    p = order
    if p == 0:
        return list(values)
    w = [(-1) ** (p - j) / (math.factorial(j) * math.factorial(p - j)) for j in range(p + 1)]
    out = []
    for i in range(len(values) - p):
        n = start + i
        out.append(sum(w[j] * (n + j) ** p * values[i + j] for j in range(p + 1)))
    return out


def _ratio(a, b) -> complex:
    # exact coefficients can exceed the float range, their ratio cannot
    return complex(a / b)


def ratio_limit(series: SeriesSolution, *, acceleration: str = "richardson", order: int = 1,
                window: int = 10, tol: float = 1e-6, match_tol: float = 1e-6,
                start: int | None = None) -> RatioEstimate:
    """Estimate ``lim f_{n+1}/f_n`` and identify the governing singularity.

    The estimate is the last (optionally Richardson-accelerated) ratio; it is
    accepted when the last ``window`` estimates agree to ``tol`` (relative).
    ``matched_singularity`` is the index of the singular point ``t`` with
    ``| |t - z0| - radius | <= match_tol``, preferring the one closest to
    ``z0 + 1/limit``.
    """
    f = series.coefficients
    if acceleration not in ("none", "richardson"):
        raise ValueError(f"unknown acceleration {acceleration!r}")
    if len(f) < window + 2:
        raise ValueError("series shorter than the window")
    if all(c == 0 for c in f[-window:]):
        raise EventuallyZeroError("coefficients vanish on the whole tail window")
    if start is None:
        start = max(0, len(f) - 1 - max(4 * window, 200))
    history = []
    for n in range(start, len(f) - 1):
        if f[n] != 0:
            history.append((n, _ratio(f[n + 1], f[n])))
    if len(history) < window + order + 1:
        raise NonConvergenceError("too few nonzero coefficients for a ratio estimate", tuple(history))
    # only a trailing run of consecutive indices can be extrapolated
    run = [history[-1]]
    for item in reversed(history[:-1]):
        if item[0] == run[-1][0] - 1:
            run.append(item)
        else:
            break
    run.reverse()
    accelerated = acceleration == "richardson" and order > 0 and len(run) > window + order
    if accelerated:
        est = richardson([r for _, r in run], run[0][0], order)
    else:
        est = [r for _, r in run]
    tail = est[-window:]
    limit = tail[-1]
    spread = max(abs(e - limit) for e in tail)
    if spread > tol * max(1.0, abs(limit)):
        raise NonConvergenceError(
            f"ratio estimates still vary by {spread:.3g} over the last {window} terms",
            tuple(history),
        )
    radius = math.inf if limit == 0 else 1.0 / abs(limit)
    matched = None
    if series.singularities and limit != 0:
        z0 = complex(series.center)
        t_est = z0 + 1.0 / limit
        best = None
        for idx, t in enumerate(series.singularities):
            dist = abs(complex(t) - z0)
            if abs(dist - radius) <= match_tol * max(1.0, radius):
                score = abs(complex(t) - t_est)
                if best is None or score < best[0]:
                    best = (score, idx)
        matched = None if best is None else best[1]
    return RatioEstimate(limit, radius, matched, tuple(history), accelerated, tuple(est))


# ---------------------------------------------------------------------------
# characteristic polynomial


def characteristic_polynomial(rec: RecurrenceSystem) -> Poly:
    """``lambda^k + sum_j a_j lambda^j`` from the coefficient limits."""
    if any(a is None for a in rec.limits):
        raise PreconditionError("a coefficient limit is infinite", reason="infinite_limit")
    return Poly(list(rec.limits) + [rec.backend.one()])


def _roots_with_multiplicity(p: Poly) -> list[complex]:
    out = []
    for r in poly_roots(p):
        out.extend([complex(r.value)] * r.multiplicity)
    return out


def match_roots(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Largest distance under a greedy nearest pairing (inf if sizes differ)."""
    if len(a) != len(b):
        return math.inf
    remaining = list(b)
    worst = 0.0
    for x in sorted(a, key=lambda z: -abs(z)):
        j = min(range(len(remaining)), key=lambda i: abs(remaining[i] - x))
        worst = max(worst, abs(remaining[j] - x))
        remaining.pop(j)
    return worst


def charpoly_vs_reciprocal_roots(theta_op: DifferentialOperator, tol: float = 1e-10) -> CharpolyReport:
    """Check that the characteristic roots are the reciprocals of the roots of ``Q_0``.

    ``Q_0`` is the leading coefficient of the delta form,
    ``Q_0(z) = sum_i [delta^m] P_i * z^i``, and the identity is
    ``Q_0(0) * charpoly(lambda) = lambda^k Q_0(1/lambda)``.
    """
    if theta_op.form != "theta":
        theta_op = to_theta_form(theta_op)
    m = theta_op.order
    P = theta_op.coeffs
    k = len(P) - 1
    Q0 = Poly([p.coeff(m) for p in P])
    if Q0.coeff(0) == 0:
        return CharpolyReport((), (), math.inf, False, False, "Q_0(0) = 0: reciprocal roots undefined")
    rec = build_recurrence(theta_op)
    cp = characteristic_polynomial(rec)
    ident = None
    if theta_op.exact:
        ident = cp.scale(Q0.coeff(0)) == Q0.reversed(k)
    char_roots = _roots_with_multiplicity(cp)
    q_roots = _roots_with_multiplicity(Q0)
    recips = [1.0 / r for r in q_roots] + [0j] * (k - len(q_roots))
    mismatch = match_roots(char_roots, recips)
    passed = mismatch <= tol * max(1.0, max((abs(r) for r in recips), default=1.0))
    if ident is False:
        passed = False
    note = ""
    if k > len(q_roots):
        note = f"deg Q_0 = {len(q_roots)} < k = {k}: {k - len(q_roots)} zero characteristic roots"
    return CharpolyReport(tuple(char_roots), tuple(recips), mismatch, ident, passed, note)


def poincare_distinct_modulus_check(charpoly: Poly, tol: float = 1e-9):
    """Whether all characteristic roots have pairwise distinct moduli."""
    moduli = sorted(abs(r) for r in _roots_with_multiplicity(charpoly))
    ok = all(moduli[i + 1] - moduli[i] > tol * max(1.0, moduli[i + 1]) for i in range(len(moduli) - 1))
    return ok, moduli
