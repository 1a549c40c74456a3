"""Iterated differentiation modulo the equation.

For ``y^(m) = sum q_i y^(i)`` every higher derivative reduces to
``y^(n) = sum_i q_{i,n} y^(i)``; differentiating once more gives the step

    q_{i,n+1} = q_{i,n}' + q_{i-1,n} + q_{m-1,n} * q_i.

Two evaluation strategies are offered:

* symbolic: the ``q_{i,n}`` are carried as reduced rational functions;
* values: at an ordinary point ``z``, ``q_{i,n}(z) = y_i^(n)(z)`` where
  ``y_i`` is the solution with ``y_i^(j)(z) = delta_ij``.  Its Taylor
  coefficients come from the recurrence about ``z``, so ``q_{i,n}(z) / n!``
  is obtained in O(n) operations without any growth in degree.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import NonConvergenceError, PreconditionError
from .geometry import DEFAULT_TIE_TOL, classify_point, region_guard
from .operator_core import (
    DifferentialOperator,
    genericity_probe,
    recenter,
    singular_points,
    to_standard,
)
from .polynomials import Poly, RatFunc, poly_lcm
from .scalars import Backend, GaussRat, is_exact
from .series_recurrence import SeriesSolution, _is_ordinary_at_zero, local_theta, point_backend

__all__ = [
    "ChainState",
    "LogDerivResult",
    "ProbeReport",
    "chain_init",
    "chain_step",
    "chain_state_at",
    "chain_states",
    "chain_ratio",
    "scaled_chain_values",
    "logderiv_limit",
    "verify_chain",
    "derivative_ratio_probe",
]


@dataclass(frozen=True)
class ChainState:
    n: int
    q: tuple  # RatFunc entries q_{0,n}..q_{m-1,n}

    @property
    def max_degree(self) -> int:
        return max(max(r.num.degree, r.den.degree, 0) for r in self.q)

    def evaluate(self, z) -> tuple:
        return tuple(r(z) for r in self.q)


@dataclass(frozen=True)
class LogDerivResult:
    value: object
    n_used: int
    history: tuple  # ((n, -q_{0,n}(z)/q_{1,n}(z)), ...)
    cauchy_gap: float
    mode: str = "symbolic"
    skipped: tuple = ()
    nearest_singularity: object = None
    genericity: str = ""


@dataclass(frozen=True)
class ProbeReport:
    history: tuple  # ((n, f1^(n)/f2^(n)), ...)
    converged: bool
    limit: object
    zero_indices: tuple
    decay_index: int | None
    cauchy_gap: float


# ---------------------------------------------------------------------------
# symbolic chain


def _unit(m: int, i: int, backend: Backend) -> tuple:
    one = backend.one()
    return tuple(RatFunc(Poly([one]) if j == i else Poly()) for j in range(m))


def chain_init(op: DifferentialOperator) -> ChainState:
    """State at ``n = m - 1``: the unit vector ``e_{m-1}``."""
    m = op.order
    return ChainState(m - 1, _unit(m, m - 1, op.backend))


def chain_state_at(op: DifferentialOperator, n: int) -> ChainState:
    if n < op.order:
        return ChainState(n, _unit(op.order, n, op.backend))
    for st in chain_states(op, n):
        pass
    return st


def chain_step(state: ChainState, op: DifferentialOperator) -> ChainState:
    std = op if op.form == "standard" else to_standard(op)
    q = std.coeffs
    m = std.order
    last = state.q[m - 1]
    new = []
    for i in range(m):
        entry = state.q[i].deriv() + last * q[i]
        if i > 0:
            entry = entry + state.q[i - 1]
        new.append(entry)
    return ChainState(state.n + 1, tuple(new))


class _Chain:
    """The chain with every entry written as ``N_{i,n} / d^k``, ``k = n - m + 1``.

    ``d`` is the monic common denominator of the ``q_i``.  Differentiating
    ``N/d^k`` gives ``(N' d - k N d') / d^(k+1)``, so the step stays inside
    polynomials; reduction to lowest terms only needs small GCDs against the
    square-free part of ``d``.
    """

    def __init__(self, std: DifferentialOperator):
        self.m = std.order
        self.d = poly_lcm([q.den for q in std.coeffs]) if std.exact else _float_common_den(std.coeffs)
        self.dd = self.d.deriv()
        self.c = [q.num * self.d.divmod(q.den)[0] for q in std.coeffs]
        self.rad = self.d.exact_div(self.d.gcd(self.dd)) if std.exact and self.d.degree > 0 else self.d
        self.exact = std.exact
        one = std.backend.one()
        self.one = one
        self.k = 0
        self.n = self.m - 1
        self.N = [Poly([one]) if i == self.m - 1 else Poly() for i in range(self.m)]
        self._pow = [Poly([one])]

    def step(self):
        d, dd, k = self.d, self.dd, self.k
        last = self.N[-1]
        new = []
        for i in range(self.m):
            e = self.N[i].deriv() * d - self.N[i] * dd.scale(k) + last * self.c[i]
            if i > 0:
                e = e + self.N[i - 1] * d
            new.append(e)
        self.N = new
        self.k += 1
        self.n += 1

    def _den_power(self, k):
        while len(self._pow) <= k:
            self._pow.append(self._pow[-1] * self.d)
        return self._pow[k]

    def state(self) -> ChainState:
        den = self._den_power(self.k)
        out = []
        for N in self.N:
            if N.is_zero() or not self.exact or self.d.degree < 1:
                out.append(RatFunc(N, den))
                continue
            num, dn = N, den
            while dn.degree > 0:
                g = num.gcd(self.rad)
                if g.degree < 1:
                    break
                g = g.gcd(dn)
                if g.degree < 1:
                    break
                num = num.exact_div(g)
                dn = dn.exact_div(g)
            out.append(RatFunc(num, dn, reduce=False).normalized())
        return ChainState(self.n, tuple(out))


def _float_common_den(qs) -> Poly:
    d = qs[0].den
    for q in qs[1:]:
        if q.den != d:
            d = d * q.den
    return d


def chain_states(op: DifferentialOperator, n_max: int) -> Iterator[ChainState]:
    """Yield the states for ``n = m-1, ..., n_max``."""
    ch = _Chain(to_standard(op))
    yield ch.state()
    while ch.n < n_max:
        ch.step()
        yield ch.state()


def chain_ratio(state: ChainState, k: int, j: int, z):
    try:
        num = state.q[k](z)
        den = state.q[j](z)
    except ZeroDivisionError as exc:
        raise PreconditionError(f"z = {z} is a pole of a chain entry", reason="pole") from exc
    if den == 0:
        raise PreconditionError(f"q_{j},{state.n}(z) vanishes", reason="zero_denominator")
    return num / den


# ---------------------------------------------------------------------------
# evaluation at a point


def scaled_chain_values(op: DifferentialOperator, z, n_max: int, backend: Backend | None = None,
                        rescale: bool = True) -> Iterator[tuple]:
    """Yield ``(n, (q_{0,n}(z), ..., q_{m-1,n}(z)) * s_n)`` for ``n = 0..n_max``.

    In exact arithmetic ``s_n = 1/n!``.  In floating point an additional
    common positive factor keeps the values in range; ratios at a fixed
    ``n`` are unaffected.
    """
    m = op.order
    backend = point_backend(op, z, backend)
    local_std = to_standard(recenter(op, z))
    if not _is_ordinary_at_zero(local_std):
        raise PreconditionError(f"{z} is a singular point of the operator", reason="singular_center")
    theta = local_theta(op, z, backend)
    P = theta.coeffs
    k = len(P) - 1
    with backend.context():
        hist = deque(maxlen=max(k, 1))
        for n in range(n_max + 1):
            if n < m:
                # rescaling never triggers this early, so plain 1/n! is right
                vec = [backend.zero()] * m
                vec[n] = backend.one() / math.factorial(n)
            else:
                piv = P[0](backend.coerce(n))
                ws = [P[i](backend.coerce(n - i)) for i in range(1, min(k, n) + 1)]
                vec = []
                for s in range(m):
                    acc = backend.zero()
                    for i, w in enumerate(ws, start=1):
                        if w != 0:
                            acc = acc + w * hist[-i][s]
                    vec.append(-acc / piv)
            if rescale and not backend.exact:
                big = max(abs(v) for v in vec)
                if big > 1e100 or 0 < big < 1e-100:
                    f = 1 / big
                    vec = [v * f for v in vec]
                    for row in hist:
                        row[:] = [v * f for v in row]
            if k:
                hist.append(vec)
            yield n, tuple(vec)


# ---------------------------------------------------------------------------
# logarithmic derivative


def _refuse_if_ill_posed(op: DifferentialOperator, z, guard_tol: float, override_genericity: bool):
    S = singular_points(op)
    info = classify_point(S.points, z, guard_tol)
    if not region_guard(S.points, z, guard_tol):
        raise PreconditionError(
            f"z = {z} lies on the bisector set (distance {info.distance_to_bisectors:.3g})", reason="on_bisector"
        )
    t = S.points[info.nearest_index]
    verdict = genericity_probe(op, t)
    if verdict.status != "Generic" and not override_genericity:
        raise PreconditionError(
            f"nearest singularity {t} is {verdict.status}: {verdict.explanation}", reason="not_generic"
        )
    return t, verdict.status


def logderiv_limit(op: DifferentialOperator, z, *, tol: float = 1e-10, n_max: int = 2000,
                   mode: str = "auto", degree_cap: int = 40, override_genericity: bool = False,
                   guard_tol: float = DEFAULT_TIE_TOL, backend: Backend | None = None) -> LogDerivResult:
    """Limit of ``-q_{0,n}(z)/q_{1,n}(z)`` for an order-2 operator.

    The limit is ``y'/y`` for the solution holomorphic at the singularity
    nearest ``z``.  Iteration stops at the first ``n`` with
    ``|value_n - value_{n-1}| <= tol * max(1, |value_n|)``.  Isolated zeros of
    ``q_{1,n}(z)`` are skipped; three in a row abort.
    """
    if op.order != 2:
        raise PreconditionError("logderiv_limit needs an order-2 operator", reason="order")
    if mode not in ("auto", "symbolic", "values"):
        raise ValueError(f"unknown mode {mode!r}")
    t, status = _refuse_if_ill_posed(op, z, guard_tol, override_genericity)
    std = to_standard(op)
    used = mode
    # an exact chain is evaluated at the binary value of a float z
    z_sym = GaussRat.from_complex(z) if std.exact and not is_exact(z) else z

    def symbolic_values():
        for st in chain_states(std, n_max):
            if mode == "auto" and st.max_degree > degree_cap:
                return
            try:
                vals = st.evaluate(z_sym)
                yield st.n, vals if z_sym is z else tuple(complex(v) for v in vals)
            except ZeroDivisionError as exc:
                raise PreconditionError(f"z = {z} is a pole of the chain", reason="pole") from exc

    def stream():
        nonlocal used
        last_n = -1
        if mode == "symbolic" or (mode == "auto" and z_sym is z and (backend is None or backend.exact)):
            for n, v in symbolic_values():
                last_n = n
                yield n, v
            if mode == "symbolic" or last_n >= n_max:
                return
        if last_n < 0:
            used = "values"
        for n, v in scaled_chain_values(std, z, n_max, backend):
            if n > last_n:
                yield n, v

    history = []
    skipped = []
    run = 0
    prev = None
    for n, (q0, q1) in stream():
        if n < 2:
            continue
        if q1 == 0:
            skipped.append(n)
            run += 1
            if run >= 3:
                raise NonConvergenceError(f"q_1,n(z) vanished at n = {skipped[-3:]}", tuple(history))
            continue
        run = 0
        val = -q0 / q1
        history.append((n, val))
        if prev is not None:
            gap = abs(complex(val) - complex(prev))
            if gap <= tol * max(1.0, abs(complex(val))):
                return LogDerivResult(val, n, tuple(history), gap, used, tuple(skipped), t, status)
        prev = val
    gap = abs(complex(history[-1][1]) - complex(history[-2][1])) if len(history) > 1 else math.inf
    raise NonConvergenceError(f"no convergence by n = {n_max} (last gap {gap:.3g})", tuple(history))


# ---------------------------------------------------------------------------
# checks


def verify_chain(op: DifferentialOperator, series: SeriesSolution, z, n: int, state: ChainState | None = None):
    """``y^(n)(z) - sum_i q_{i,n}(z) y^(i)(z)`` for the series solution about ``z``."""
    f = series.coefficients
    if len(f) <= n:
        raise ValueError(f"series has {len(f)} coefficients, need more than {n}")
    if state is None or state.n != n:
        state = chain_state_at(op, n)
    derivs = [math.factorial(i) * f[i] for i in range(n + 1)]
    vals = state.evaluate(z)
    acc = derivs[n]
    for i, q in enumerate(vals):
        acc = acc - q * derivs[i]
    return acc


def derivative_ratio_probe(op: DifferentialOperator, f1_init: Sequence, f2_init: Sequence, z, n_max: int = 200, *,
                   tol: float = 1e-10, decay_tol: float = 1e-6, backend: Backend | None = None) -> ProbeReport:
    """History of ``f1^(n)(z) / f2^(n)(z)`` for two solutions given by derivative values at ``z``."""
    m = op.order
    if len(f1_init) != m or len(f2_init) != m:
        raise ValueError(f"need {m} initial derivatives for each solution")
    backend = point_backend(op, z, backend)
    a = [backend.coerce(v) for v in f1_init]
    b = [backend.coerce(v) for v in f2_init]
    history = []
    zeros = []
    decay = None
    for n, q in scaled_chain_values(op, z, n_max, backend):
        d1 = sum((qi * ai for qi, ai in zip(q, a)), backend.zero())
        d2 = sum((qi * bi for qi, bi in zip(q, b)), backend.zero())
        if d2 == 0:
            zeros.append(n)
            continue
        r = d1 / d2
        history.append((n, r))
        # first n from which the ratio stays below decay_tol
        if abs(complex(r)) < decay_tol:
            if decay is None:
                decay = n
        else:
            decay = None
    gap = abs(complex(history[-1][1]) - complex(history[-2][1])) if len(history) > 1 else math.inf
    limit = history[-1][1] if history else None
    converged = gap <= tol * max(1.0, abs(complex(limit))) if history else False
    return ProbeReport(tuple(history), converged, limit, tuple(zeros), decay, gap)
