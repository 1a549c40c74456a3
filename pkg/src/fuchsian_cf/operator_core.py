"""Linear differential operators, their three forms, and local data.

Forms
-----
``standard``
    ``y^(m) = sum_{i<m} q_i(z) y^(i)`` with rational ``q_i``.
``delta_poly``
    ``sum_j Q_j(z) delta^(m-j)`` with polynomial ``Q_j`` and ``delta = z d/dz``.
``theta``
    ``sum_i z^i P_i(delta)``; the Taylor recurrence at 0 is read off from it.

All operators are immutable.  Exact operators carry
:class:`~fuchsian_cf.scalars.GaussRat` coefficients and canonical reduced
forms; float operators carry ``complex`` (or ``mpmath.mpc``) coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import OperatorError, PreconditionError
from .polynomials import Poly, RatFunc, poly_lcm
from .roots import Root, nonneg_integer_roots, poly_roots
from .scalars import EXACT, Backend, BackendMismatch, GaussRat, backend_of, is_exact

__all__ = [
    "DifferentialOperator",
    "SingularSet",
    "SingularityReport",
    "GenericityVerdict",
    "FuchsianReport",
    "make_operator",
    "to_standard",
    "to_delta_poly",
    "to_theta_form",
    "recenter",
    "singular_points",
    "indicial_data",
    "is_fuchsian",
    "genericity_probe",
    "companion_matrix",
    "adjoint_matrix",
    "default_dedup_tolerance",
    "cleared_coefficients",
    "to_backend",
    "holomorphic_solution_dimension",
]

FORMS = ("standard", "delta_poly", "theta")


@dataclass(frozen=True, eq=False)
class DifferentialOperator:
    form: str
    order: int
    coeffs: tuple
    backend: Backend = EXACT
    irregular_at_0: bool = False

    def __eq__(self, other):
        if not isinstance(other, DifferentialOperator):
            return NotImplemented
        return (
            self.form == other.form
            and self.order == other.order
            and tuple(self.coeffs) == tuple(other.coeffs)
        )

    def __hash__(self):
        return hash((self.form, self.order, self.coeffs))

    @property
    def exact(self) -> bool:
        return self.backend.exact

    def __repr__(self):
        body = ", ".join(str(c) for c in self.coeffs)
        return f"DifferentialOperator({self.form}, m={self.order}, [{body}])"


@dataclass(frozen=True)
class SingularSet:
    points: tuple
    dedup_tolerance: float = 0.0

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def as_complex(self) -> list[complex]:
        return [complex(t) for t in self.points]


@dataclass(frozen=True)
class GenericityVerdict:
    status: str  # "Generic" | "NotGeneric" | "Undetermined"
    explanation: str
    holomorphic_dimension: int | None = None


@dataclass(frozen=True)
class SingularityReport:
    point: object
    indicial_polynomial: Poly
    exponents: tuple
    exponents_exact: tuple
    fuchsian_at_point: bool
    generic_probe: GenericityVerdict


@dataclass(frozen=True)
class FuchsianReport:
    points: tuple  # ((t, bool), ...)
    fuchsian: bool
    infinity_regular: bool
    pole_orders: tuple = field(default=())


# ---------------------------------------------------------------------------
# construction


def _leaf_scalars(obj):
    if isinstance(obj, RatFunc):
        yield from obj.num.coeffs
        yield from obj.den.coeffs
    elif isinstance(obj, Poly):
        yield from obj.coeffs
    else:
        yield obj


def _normalize_leaf(x):
    if isinstance(x, bool):
        raise OperatorError("boolean coefficient")
    if isinstance(x, (int, Fraction)):
        return GaussRat(x)
    if isinstance(x, float):
        return complex(x)
    return x


def _to_poly(obj) -> Poly:
    if isinstance(obj, Poly):
        return Poly([_normalize_leaf(c) for c in obj.coeffs])
    if isinstance(obj, RatFunc):
        if obj.den.degree != 0:
            raise OperatorError("expected a polynomial coefficient, got a rational function")
        inv = 1 / _normalize_leaf(obj.den.lc)
        return Poly([_normalize_leaf(c) * inv for c in obj.num.coeffs])
    if isinstance(obj, (list, tuple)):
        return Poly([_normalize_leaf(c) for c in obj])
    return Poly([_normalize_leaf(obj)])


def _to_ratfunc(obj) -> RatFunc:
    if isinstance(obj, RatFunc):
        return RatFunc(_to_poly(obj.num), _to_poly(obj.den))
    return RatFunc(_to_poly(obj))


def make_operator(form: str, coeffs: Sequence, order: int | None = None, backend: Backend | None = None):
    """Validate and build a :class:`DifferentialOperator`.

    ``coeffs`` holds ``q_0..q_{m-1}`` (standard), ``Q_0..Q_m`` (delta_poly)
    or ``P_0..P_k`` (theta).  Plain ints/Fractions become exact scalars.
    """
    if form not in FORMS:
        raise OperatorError(f"unknown form {form!r}")
    if coeffs is None or len(coeffs) == 0:
        raise OperatorError("empty coefficient list")
    if form == "standard":
        items = tuple(_to_ratfunc(c) for c in coeffs)
    else:
        items = tuple(_to_poly(c) for c in coeffs)

    kinds = set()
    prec = 53
    for it in items:
        for s in _leaf_scalars(it):
            b = backend_of(s)
            kinds.add(b.kind)
            if not b.exact:
                prec = b.precision_bits
    if len(kinds) > 1:
        raise OperatorError("mixed scalar backends in one operator")
    inferred = EXACT if (not kinds or kinds == {"exact"}) else Backend("float", prec)
    if backend is not None and backend.kind != inferred.kind and kinds:
        raise OperatorError(
            f"coefficients are {inferred.kind} but backend {backend.kind} was requested"
        )
    backend = backend or inferred

    irregular = False
    if form == "standard":
        m = len(items)
        if order is not None and order != m:
            raise OperatorError(f"standard form of order {order} needs {order} coefficients, got {m}")
    elif form == "delta_poly":
        if items[0].is_zero():
            raise OperatorError("Q_0 = 0: order undefined")
        m = len(items) - 1
        if m < 1:
            raise OperatorError("delta_poly form needs Q_0..Q_m with m >= 1")
        if order is not None and order != m:
            raise OperatorError("order does not match the number of Q_j")
    else:
        if items[0].is_zero():
            raise OperatorError("P_0 = 0: operator has no indicial part")
        m = max(int(p.degree) for p in items if not p.is_zero())
        if m < 1:
            raise OperatorError("theta form has order 0")
        if order is not None and order != m:
            raise OperatorError("order does not match max deg P_i")
        irregular = items[0].degree < m
    return DifferentialOperator(form, m, items, backend, irregular)


# ---------------------------------------------------------------------------
# form conversions


@lru_cache(maxsize=None)
def _falling_factorial_coeffs(j: int) -> tuple:
    """Integer coefficients of delta(delta-1)...(delta-j+1) in powers of delta."""
    p = [1]
    for i in range(j):
        # multiply by (delta - i)
        q = [0] * (len(p) + 1)
        for d, c in enumerate(p):
            q[d + 1] += c
            q[d] -= i * c
        p = q
    return tuple(p)


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


def _one(backend: Backend):
    return backend.one()


def _tol_zero(c, scale: float, backend: Backend) -> bool:
    if backend.exact:
        return c == 0
    return abs(c) <= 64 * backend.eps * scale


def cleared_coefficients(op: DifferentialOperator) -> list[Poly]:
    """Polynomials ``c_0..c_m`` with ``c_m D^m + ... + c_0`` a multiple of ``op``.

    ``c_m`` is the monic LCM of the denominators (exact) or their product
    (float), and ``c_i = -c_m q_i``.
    """
    std = to_standard(op)
    dens = [q.den for q in std.coeffs]
    if std.exact:
        d = poly_lcm(dens)
    else:
        d = Poly([_one(std.backend)])
        seen = []
        for den in dens:
            if den.degree > 0 and den not in seen:
                seen.append(den)
                d = d * den
    out = []
    for q in std.coeffs:
        # den is monic and divides d (exactly, or as a factor of the product)
        cofactor = d.divmod(q.den)[0]
        out.append(-(cofactor * q.num))
    out.append(d)
    return out


def _normalize_Q(Qs: list[Poly], backend: Backend) -> list[Poly]:
    """Divide out the common factor of the Q_j (exact) or common z-power (float)."""
    if backend.exact:
        g = None
        for q in Qs:
            if q.is_zero():
                continue
            g = q.monic() if g is None else g.gcd(q)
        if g is not None and g.degree > 0:
            Qs = [q.exact_div(g) for q in Qs]
        return Qs
    scale = max((abs(c) for q in Qs for c in q.coeffs), default=1.0)
    val = None
    for q in Qs:
        if q.is_zero():
            continue
        v = 0
        while v < len(q.coeffs) and _tol_zero(q.coeffs[v], scale, backend):
            v += 1
        val = v if val is None else min(val, v)
    if val:
        Qs = [Poly(q.coeffs[val:]) for q in Qs]
    return Qs


def _standard_to_delta(op: DifferentialOperator) -> list[Poly]:
    m = op.order
    cs = cleared_coefficients(op)  # c_0..c_m
    zero = op.backend.zero()
    one = _one(op.backend)
    Qs = [Poly() for _ in range(m + 1)]
    for j, cj in enumerate(cs):
        if cj.is_zero():
            continue
        zpow = Poly([zero] * (m - j) + [one])
        base = zpow * cj
        ff = _falling_factorial_coeffs(j)
        for l, s in enumerate(ff):
            if s:
                Qs[m - l] = Qs[m - l] + base.scale(op.backend.coerce(s))
    return _normalize_Q(Qs, op.backend)


def _delta_to_standard(Qs: Sequence[Poly], backend: Backend) -> list[RatFunc]:
    m = len(Qs) - 1
    zero = backend.zero()
    one = _one(backend)
    C = [Poly() for _ in range(m + 1)]
    for l in range(m + 1):
        Q = Qs[m - l]
        if Q.is_zero():
            continue
        for i in range(l + 1):
            s = _stirling2(l, i)
            if s:
                C[i] = C[i] + (Q * Poly([zero] * i + [one])).scale(backend.coerce(s))
    lead = RatFunc(C[m])
    return [RatFunc(-C[i]) / lead for i in range(m)]


def _delta_to_theta(Qs: Sequence[Poly], backend: Backend) -> list[Poly]:
    m = len(Qs) - 1
    k = max(int(q.degree) for q in Qs if not q.is_zero())
    zero = backend.zero()
    Ps = []
    for i in range(k + 1):
        Ps.append(Poly([Qs[m - l].coeff(i) if Qs[m - l].coeff(i) != 0 else zero for l in range(m + 1)]))
    return Ps


def _theta_to_delta(Ps: Sequence[Poly], m: int, backend: Backend) -> list[Poly]:
    zero = backend.zero()
    Qs = []
    for j in range(m + 1):
        l = m - j
        Qs.append(Poly([P.coeff(l) if P.coeff(l) != 0 else zero for P in Ps]))
    return Qs


def to_standard(op: DifferentialOperator) -> DifferentialOperator:
    if op.form == "standard":
        return op
    Qs = op.coeffs if op.form == "delta_poly" else _theta_to_delta(op.coeffs, op.order, op.backend)
    qs = _delta_to_standard(Qs, op.backend)
    return DifferentialOperator("standard", op.order, tuple(qs), op.backend)


def to_delta_poly(op: DifferentialOperator) -> DifferentialOperator:
    """Rewrite ``op`` as ``sum_j Q_j(z) delta^(m-j)`` with coprime ``Q_j`` (exact)."""
    if op.form == "delta_poly":
        Qs = _normalize_Q(list(op.coeffs), op.backend)
    elif op.form == "standard":
        Qs = _standard_to_delta(op)
    else:
        Qs = _normalize_Q(_theta_to_delta(op.coeffs, op.order, op.backend), op.backend)
    return DifferentialOperator("delta_poly", op.order, tuple(Qs), op.backend)


def to_theta_form(op: DifferentialOperator, *, allow_irregular: bool = False) -> DifferentialOperator:
    """Regroup into ``sum_i z^i P_i(delta)`` about ``z = 0``.

    Raises :class:`PreconditionError` when ``Q_0(0) = 0`` after normalization
    (0 is not a regular singular point), unless ``allow_irregular`` is set,
    in which case the result carries ``irregular_at_0=True``.
    """
    if op.form == "theta":
        if op.irregular_at_0 and not allow_irregular:
            raise PreconditionError("operator is irregular at 0", reason="irregular_at_0")
        return op
    d = to_delta_poly(op)
    Q0 = d.coeffs[0]
    scale = max((abs(c) for q in d.coeffs for c in q.coeffs), default=1.0)
    irregular = _tol_zero(Q0.coeff(0), scale, op.backend)
    if irregular and not allow_irregular:
        raise PreconditionError(
            "Q_0(0) = 0 after normalization: 0 is not a regular singular point",
            reason="irregular_at_0",
        )
    Ps = _delta_to_theta(d.coeffs, op.backend)
    return DifferentialOperator("theta", op.order, tuple(Ps), op.backend, irregular)


def _coerce_point(op: DifferentialOperator, z0):
    if op.exact:
        if is_exact(z0) or isinstance(z0, (float, complex)):
            return op, op.backend.coerce(z0)
        raise BackendMismatch(f"cannot recentre an exact operator at {type(z0).__name__}")
    return op, op.backend.coerce(z0)


def to_backend(op: DifferentialOperator, backend: Backend) -> DifferentialOperator:
    """Convert coefficients (exact to float is rounding; float to exact is exact)."""
    if backend == op.backend:
        return op
    conv = backend.coerce
    with backend.context():
        if op.form == "standard":
            cs = tuple(RatFunc(q.num.map(conv), q.den.map(conv), reduce=backend.exact) for q in op.coeffs)
        else:
            cs = tuple(p.map(conv) for p in op.coeffs)
    return DifferentialOperator(op.form, op.order, cs, backend, op.irregular_at_0)


def recenter(op: DifferentialOperator, z0) -> DifferentialOperator:
    """Substitute ``z -> z + z0``; singular points move by ``-z0``.

    An exact operator recentred at a float point is recentred exactly at the
    float's binary value.  The result keeps the input's form.
    """
    op, z0 = _coerce_point(op, z0)
    if z0 == 0:
        return op
    std = to_standard(op)
    with op.backend.context():
        qs = tuple(q.shift(z0) for q in std.coeffs)
    out = DifferentialOperator("standard", op.order, qs, op.backend)
    if op.form == "standard":
        return out
    if op.form == "delta_poly":
        return to_delta_poly(out)
    return to_theta_form(out, allow_irregular=True)


# ---------------------------------------------------------------------------
# singular points


def default_dedup_tolerance(backend: Backend) -> float:
    if backend.exact:
        return 0.0
    # 1e-9 at 53 bits, scaled with the precision
    return 10.0 ** (-9.0 * backend.precision_bits / 53.0)


def _sort_key(t):
    z = complex(t)
    return (z.real, z.imag)


def singular_points(op: DifferentialOperator, dedup_tol: float | None = None) -> SingularSet:
    """Finite singular points: poles of the reduced ``q_i``."""
    if dedup_tol is None:
        dedup_tol = default_dedup_tolerance(op.backend)
    std = to_standard(op)
    dens = [q.den for q in std.coeffs if q.den.degree > 0]
    if not dens:
        return SingularSet((), dedup_tol)
    pts: list = []
    with op.backend.context():
        if std.exact:
            for r in poly_roots(poly_lcm(dens)):
                pts.append(r.value)
        else:
            for d in dens:
                for r in poly_roots(d, prec=op.backend.precision_bits):
                    pts.append(r.value)
    uniq: list = []
    for t in sorted(pts, key=_sort_key):
        if any(_close(t, u, dedup_tol) for u in uniq):
            continue
        uniq.append(t)
    return SingularSet(tuple(uniq), dedup_tol)


def _close(a, b, tol) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(complex(a) - complex(b)) <= max(tol, 0.0) * max(1.0, abs(complex(a)))


def _local_operator(op: DifferentialOperator, t):
    """Recentre at ``t``; non-exact ``t`` forces the float backend."""
    if op.exact and not is_exact(t):
        op = to_backend(op, Backend("float", 53))
    return recenter(op, t)


def _pole_order_at_zero(q: RatFunc, backend: Backend) -> int:
    if q.num.is_zero():
        return 0
    if backend.exact:
        return q.den.valuation() - q.num.valuation()
    scale_d = max(abs(c) for c in q.den.coeffs)
    scale_n = max(abs(c) for c in q.num.coeffs)

    def val(p, s):
        v = 0
        while v < len(p.coeffs) - 1 and _tol_zero(p.coeffs[v], s, backend):
            v += 1
        return v

    return max(0, val(q.den, scale_d) - val(q.num, scale_n))


def _local_pole_orders(local_std: DifferentialOperator) -> list[int]:
    return [_pole_order_at_zero(q, local_std.backend) for q in local_std.coeffs]


def is_fuchsian(op: DifferentialOperator) -> FuchsianReport:
    """Fuchs pole-order test at every finite singular point.

    ``q_{m-j}`` may have a pole of order at most ``j``.  Infinity is not part
    of the verdict; ``infinity_regular`` is informational.
    """
    std = to_standard(op)
    m = op.order
    S = singular_points(op)
    points = []
    orders = []
    for t in S:
        local = to_standard(_local_operator(std, t))
        po = _local_pole_orders(local)
        ok = all(po[m - j] <= j for j in range(1, m + 1))
        points.append((t, ok))
        orders.append((t, tuple(po)))
    inf_ok = all(q.degree <= -(m - i) for i, q in enumerate(std.coeffs))
    return FuchsianReport(tuple(points), all(ok for _, ok in points), inf_ok, tuple(orders))


def _is_singular_local(local_std: DifferentialOperator) -> bool:
    return any(p > 0 for p in _local_pole_orders(local_std))


def _exponents(P0: Poly, backend: Backend):
    roots: list[Root] = poly_roots(P0, prec=backend.precision_bits if not backend.exact else 53)
    flat = []
    for r in sorted(roots, key=lambda r: _sort_key(r.value)):
        flat.extend([r.value] * r.multiplicity)
    return tuple(flat), tuple(r.exact for r in roots for _ in range(r.multiplicity))


def indicial_data(op: DifferentialOperator, t) -> SingularityReport:
    """Indicial polynomial ``P_0`` at ``t`` and its roots (the local exponents)."""
    local = _local_operator(op, t)
    local_std = to_standard(local)
    theta = to_theta_form(local_std, allow_irregular=True)
    P0 = theta.coeffs[0]
    exps, exact_flags = _exponents(P0, theta.backend)
    m = op.order
    po = _local_pole_orders(local_std)
    fuchs = all(po[m - j] <= j for j in range(1, m + 1))
    if not _is_singular_local(local_std):
        verdict = GenericityVerdict("Undetermined", "ordinary point: genericity does not apply")
    elif not fuchs:
        verdict = GenericityVerdict("Undetermined", "irregular singular point")
    else:
        verdict = genericity_probe(op, t)
    return SingularityReport(t, P0, exps, exact_flags, fuchs, verdict)


# ---------------------------------------------------------------------------
# genericity


def _rank(rows: list[list], is_zero) -> int:
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = None
        for r in range(rank, len(rows)):
            if not is_zero(rows[r][col]):
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        for r in range(len(rows)):
            if r != rank and not is_zero(rows[r][col]):
                f = rows[r][col] / p
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def holomorphic_solution_dimension(theta: DifferentialOperator):
    """Dimension of the space of power-series solutions at 0.

    Each nonnegative integer exponent ``e`` frees the coefficient ``f_e`` and
    imposes one linear condition (the recurrence right-hand side must vanish
    at ``n = e``).  The dimension is the number of such exponents minus the
    rank of those conditions.  Returns ``(dimension, exponents, resonances)``
    where ``resonances`` lists the exponents whose condition was non-trivial.
    """
    P = theta.coeffs
    backend = theta.backend
    P0 = P[0]
    E = nonneg_integer_roots(P0)
    if not E:
        return 0, [], []
    k = len(P) - 1
    nfree = len(E)
    zero = backend.zero()
    scale = max(abs(c) for p in P for c in p.coeffs)

    def isz(c):
        return _tol_zero(c, scale * 1e6, backend) if not backend.exact else c == 0

    f: list[list] = []  # f[n] = coefficient vector over the free parameters
    constraints = []
    resonances = []
    free_idx = 0
    for n in range(E[-1] + 1):
        rhs = [zero] * nfree
        for i in range(1, min(k, n) + 1):
            w = P[i](backend.coerce(n - i))
            if w == 0:
                continue
            rhs = [a - w * b for a, b in zip(rhs, f[n - i])]
        if n in E:
            if any(not isz(c) for c in rhs):
                constraints.append(rhs)
                resonances.append(n)
            vec = [zero] * nfree
            vec[free_idx] = backend.one()
            free_idx += 1
            f.append(vec)
        else:
            piv = P0(backend.coerce(n))
            f.append([c / piv for c in rhs])
    rank = _rank(constraints, isz) if constraints else 0
    return nfree - rank, E, resonances


def genericity_probe(op: DifferentialOperator, t) -> GenericityVerdict:
    """Decide whether ``t`` admits a basis with exactly one non-holomorphic member.

    Exact operators at exact points are decided completely by the
    power-series dimension count.  Float data with resonant conditions and
    ``m > 2`` is reported as Undetermined.
    """
    local = _local_operator(op, t)
    local_std = to_standard(local)
    if not _is_singular_local(local_std):
        raise PreconditionError(f"{t} is not a singular point of the operator", reason="not_singular")
    m = op.order
    po = _local_pole_orders(local_std)
    if not all(po[m - j] <= j for j in range(1, m + 1)):
        return GenericityVerdict("Undetermined", "irregular singular point: probe needs a regular one")
    theta = to_theta_form(local_std)
    dim, E, resonances = holomorphic_solution_dimension(theta)
    exps, _ = _exponents(theta.coeffs[0], theta.backend)
    desc = f"exponents {[str(e) for e in exps]}; nonnegative integer exponents {E}"
    if len(E) < m - 1:
        return GenericityVerdict(
            "NotGeneric",
            f"{desc}: at most {len(E)} holomorphic solutions, {m - 1} required",
            dim,
        )
    if resonances and not theta.exact and m > 2:
        return GenericityVerdict(
            "Undetermined", f"{desc}: resonant conditions at {resonances} in float arithmetic", None
        )
    if dim == m - 1:
        detail = f"; logarithmic obstruction at n={resonances}" if resonances else ""
        return GenericityVerdict(
            "Generic", f"{desc}: holomorphic solutions form a {dim}-dimensional space{detail}", dim
        )
    if dim == m:
        return GenericityVerdict("NotGeneric", f"{desc}: every solution extends holomorphically", dim)
    return GenericityVerdict(
        "NotGeneric", f"{desc}: only {dim} holomorphic solutions, {m - 1} required", dim
    )


# ---------------------------------------------------------------------------
# companion system


def companion_matrix(op: DifferentialOperator) -> tuple:
    """Matrix ``A`` of ``X' = A X``: ones on the superdiagonal, last row ``q``."""
    std = to_standard(op)
    m = op.order
    one = RatFunc(Poly([_one(op.backend)]))
    zero = RatFunc(Poly(), Poly([_one(op.backend)]))
    rows = []
    for i in range(m - 1):
        rows.append(tuple(one if j == i + 1 else zero for j in range(m)))
    rows.append(tuple(std.coeffs))
    return tuple(rows)


def adjoint_matrix(A: tuple) -> tuple:
    """``-A^T``, the coefficient matrix of the inverse fundamental system."""
    m = len(A)
    return tuple(tuple(-A[j][i] for j in range(m)) for i in range(m))
