import math
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuchsian_cf.errors import NonConvergenceError, PreconditionError
from fuchsian_cf.hypergeometric import HypergeomParams, gauss_operator, gauss_recurrence_coefficients
from fuchsian_cf.operator_core import make_operator, recenter, to_standard, to_theta_form
from fuchsian_cf.polynomials import Poly, RatFunc
from fuchsian_cf.scalars import EXACT, GaussRat as G
from fuchsian_cf.series_recurrence import (
    EventuallyZeroError,
    RecurrenceSystem,
    build_recurrence,
    characteristic_polynomial,
    charpoly_vs_reciprocal_roots,
    local_theta,
    poincare_distinct_modulus_check,
    ratio_limit,
    richardson,
    series_from_coefficients,
    solve_series,
)

from conftest import A, B, C, poly


def residual_through(op, series):
    """Coefficients of ``c_m f^(m) - sum c_i f^(i)`` for the truncated series about its center."""
    from fuchsian_cf.operator_core import cleared_coefficients

    local = recenter(op, series.center)
    cs = cleared_coefficients(local)
    f = Poly(list(series.coefficients))
    derivs = [f]
    for _ in range(op.order):
        derivs.append(derivs[-1].deriv())
    total = cs[-1] * derivs[op.order]
    for i in range(op.order):
        total = total + cs[i] * derivs[i]
    return total


def test_gauss_recurrence_at_zero(gauss):
    rec = build_recurrence(to_theta_form(gauss))
    assert rec.order == 1
    # f_{n+1} = -a_{0,n} f_n, and the classical ratio is (a+n)(b+n)/((c+n)(1+n))
    for n in range(8):
        ratio = -rec.coefficient(0, n)
        assert ratio == G((A + n) * (B + n) / ((C + n) * (1 + n)))
    assert rec.blocked_indices == ()


def test_blocked_index_reported():
    p = HypergeomParams(G(Fr(1, 2)), G(Fr(1, 3)), G(Fr(-7, 2)))
    th = to_theta_form(gauss_operator(p))
    # P_0(n) = n(n + c - 1) has no integer root for half-integer c
    assert build_recurrence(th).blocked_indices == ()
    # c = -3: the pivot P_0(n+1) = (n+1)(n-3) vanishes at n = 3
    th_int = make_operator("theta", [poly(0, -4, 1), Poly([G(-A * B), G(-(A + B)), G(-1)])])
    assert build_recurrence(th_int).blocked_indices == (3,)


def test_second_derivative_series_is_linear():
    op = make_operator("standard", [0, 0])
    s = solve_series(op, G(3), [G(1), G(1)], 10)
    assert s.coefficients == (G(1), G(1)) + (G(0),) * 9


def test_singular_center_refused(gauss):
    with pytest.raises(PreconditionError):
        solve_series(gauss, G(0), [G(1), G(0)], 10)


def test_gauss_series_residual_exact(gauss):
    N = 50
    s = solve_series(gauss, G(Fr(1, 5)), [G(1), G(0)], N)
    assert len(s.coefficients) == N + 1
    res = residual_through(gauss, s)
    assert all(res.coeff(d) == 0 for d in range(N - 1))
    assert not res.is_zero()


@st.composite
def ops_and_points(draw):
    ints = st.integers(-3, 3).map(G)
    m = draw(st.integers(1, 3))
    qs = []
    for _ in range(m):
        num = Poly(draw(st.lists(ints, min_size=1, max_size=2)))
        den = Poly(draw(st.lists(ints, min_size=1, max_size=3)))
        if den.is_zero():
            den = poly(1)
        qs.append(RatFunc(num, den))
    op = make_operator("standard", qs)
    z0 = G(draw(st.fractions(-2, 2, max_denominator=5)), draw(st.fractions(-1, 1, max_denominator=3)))
    init = [G(draw(st.integers(-3, 3))) for _ in range(m)]
    return op, z0, init


@settings(max_examples=40)
@given(ops_and_points())
def test_series_satisfies_recurrence_and_equation(data):
    op, z0, init = data
    try:
        s = solve_series(op, z0, init, 12, with_singularities=False)
    except PreconditionError:
        return
    th = local_theta(op, z0)
    P, f = th.coeffs, s.coefficients
    for n in range(op.order, 13):
        total = sum((P[i](G(n - i)) * f[n - i] for i in range(min(len(P) - 1, n) + 1)), G(0))
        assert total == 0
    res = residual_through(op, s)
    assert all(res.coeff(d) == 0 for d in range(12 - op.order + 1))


# ratio limits ----------------------------------------------------------------

def test_geometric_series_limits(pole_op):
    s0 = solve_series(pole_op, G(0), [G(1), G(1)], 40)
    assert all(c == 1 for c in s0.coefficients)
    est = ratio_limit(s0, window=8)
    assert est.limit == 1 and est.radius == 1
    assert est.matched_singularity == 0
    assert {r for _, r in est.history} == {1}
    s_half = solve_series(pole_op, G(Fr(1, 2)), [G(2), G(4)], 40)
    est = ratio_limit(s_half, window=8)
    assert est.limit == 2 and est.radius == 0.5


def test_constant_history_for_pole_closed_form():
    # 3/(t - z) about z0: ratio is exactly 1/(t - z0)
    t, z0 = G(Fr(2, 3), 1), G(Fr(-1, 4))
    coeffs = [G(3) / (t - z0) ** (n + 1) for n in range(30)]
    est = ratio_limit(series_from_coefficients(z0, coeffs, [t]), window=5, acceleration="none")
    assert all(r == complex(1 / (t - z0)) for _, r in est.history)
    assert est.matched_singularity == 0


def test_gauss_ratio_limit(gauss):
    s = solve_series(gauss, G(Fr(1, 5)), [G(1), G(0)], 2000)
    est = ratio_limit(s)
    assert abs(est.limit + 5) / 5 < 1e-6
    assert abs(est.radius - 0.2) < 1e-6
    assert s.singularities[est.matched_singularity] == G(0)


def test_eventually_zero_and_nonconvergence():
    zeros = series_from_coefficients(G(0), [G(1), G(2)] + [G(0)] * 20)
    with pytest.raises(EventuallyZeroError):
        ratio_limit(zeros, window=5)
    alternating = series_from_coefficients(G(0), [G(1 + (n % 2)) for n in range(60)])
    with pytest.raises(NonConvergenceError):
        ratio_limit(alternating, window=5)


def test_richardson_removes_first_order_term():
    vals = [2 + 3 / n for n in range(10, 40)]
    acc = richardson(vals, 10, 1)
    assert max(abs(v - 2) for v in acc) < 1e-12


# characteristic polynomial -------------------------------------------------

def test_gauss_derivative_charpoly_roots():
    # x_n = a1 x_{n+1} + a2 x_{n+2}: in lambda = x_{n+1}/x_n form the limits give
    # a2 lambda^2 + a1 lambda - 1 = 0 with a1 -> 1 - 2z, a2 -> z(1 - z)
    for z in (G(Fr(1, 5)), G(Fr(1, 3), Fr(1, 7))):
        lim1, lim2 = 1 - 2 * z, z * (1 - z)
        rec = RecurrenceSystem(2, (), Poly([G(1)]), (G(-1) / lim2, lim1 / lim2), (), EXACT)
        cp = characteristic_polynomial(rec)
        assert cp(1 / (1 - z)) == 0 and cp(-1 / z) == 0
        p = HypergeomParams(G(A), G(B), G(C))
        a1, a2 = gauss_recurrence_coefficients(p, z)
        n = 10**6
        assert abs(complex(a1(n) - lim1)) < 1e-5 and abs(complex(a2(n) - lim2)) < 1e-5
    z = G(Fr(1, 5))
    cp = Poly([G(-1) / (z * (1 - z)), (1 - 2 * z) / (z * (1 - z)), G(1)])
    assert cp(G(Fr(5, 4))) == 0 and cp(G(-5)) == 0


def test_zero_limits_give_pure_power():
    rec = RecurrenceSystem(3, (), Poly([G(1)]), (G(0),) * 3, (), EXACT)
    assert characteristic_polynomial(rec) == Poly([G(0)] * 3 + [G(1)])


def test_charpoly_vs_reciprocal_roots_examples(gauss):
    rep = charpoly_vs_reciprocal_roots(to_theta_form(gauss))
    assert rep.passed and rep.exact_identity
    assert sorted(rep.char_roots, key=abs) == [1]
    flat = charpoly_vs_reciprocal_roots(make_operator("standard", [0, 0]))
    assert flat.passed and flat.char_roots == ()
    shifted = charpoly_vs_reciprocal_roots(local_theta(gauss, G(Fr(1, 5))))
    assert shifted.passed and shifted.exact_identity
    assert sorted(round(r.real, 12) for r in shifted.char_roots) == [-5, 1.25]


def test_charpoly_q0_vanishing_is_a_violation():
    op = make_operator("theta", [poly(0, -1, 1), poly(0, 0, 1)], order=2)
    # Q_0(z) = 1 + z: fine; now force Q_0(0) = 0 with an irregular operator
    irregular = make_operator("theta", [poly(0, 1), poly(0, 0, 1)])
    rep = charpoly_vs_reciprocal_roots(to_theta_form(irregular, allow_irregular=True))
    assert not rep.passed
    assert charpoly_vs_reciprocal_roots(op).passed


def test_poincare_check():
    ok, moduli = poincare_distinct_modulus_check(Poly([G(Fr(-25, 4)), G(Fr(15, 4)), G(1)]))
    assert ok and moduli == pytest.approx([1.25, 5])
    z = complex(0.5, 0.7)
    roots = [1 / (0 - z), 1 / (1 - z)]
    cp = Poly.from_roots(roots, 1.0 + 0j)
    assert not poincare_distinct_modulus_check(cp)[0]
    assert poincare_distinct_modulus_check(Poly([G(3), G(1)]))[0]
