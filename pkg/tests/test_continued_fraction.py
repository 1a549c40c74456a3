import math
import random
from fractions import Fraction as Fr

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuchsian_cf.continued_fraction import (
    ContinuedFraction,
    cf_equivalence,
    convergents,
    determinant_residuals,
    evaluate,
    from_order2_coefficients,
    from_recurrence,
    branched_fraction_eval,
    perron_coefficients,
    reconstruct_x0_x1,
)
from fuchsian_cf.errors import NonConvergenceError, PreconditionError
from fuchsian_cf.hypergeometric import HypergeomParams, f21_logderiv, gauss_recurrence_coefficients
from fuchsian_cf.operator_core import make_operator, to_backend
from fuchsian_cf.polynomials import Poly
from fuchsian_cf.scalars import DOUBLE, GaussRat as G

from conftest import A, B, C, poly
from generators import random_fuchsian_order2, recurrence_sequence, sample_points

Z = G(Fr(1, 5))
fr = st.fractions(-5, 5, max_denominator=7)
nonzero_fr = fr.filter(lambda q: q != 0)


def golden(depth=None):
    return ContinuedFraction(G(1), lambda n: (G(1), G(1)), depth)


def test_golden_ratio():
    pairs = convergents(golden(), 30)
    assert pairs[0].n == -1 and pairs[1].n == 0
    # Fibonacci ratios
    assert [p.A for p in pairs[1:8]] == [G(v) for v in (1, 2, 3, 5, 8, 13, 21)]
    ev = evaluate(ContinuedFraction(1.0, lambda n: (1.0, 1.0)), tol=1e-12)
    assert ev.converged and abs(ev.value - (1 + math.sqrt(5)) / 2) < 1e-12


def test_single_term_fraction():
    cf = ContinuedFraction(G(0), lambda n: (G(1), G(2)), depth=1)
    assert convergents(cf, 5)[-1].value == G(Fr(1, 2))
    ev = evaluate(cf)
    assert ev.value == G(Fr(1, 2)) and ev.terminated


@settings(max_examples=40)
@given(st.lists(st.tuples(nonzero_fr, fr), min_size=1, max_size=12), fr)
def test_determinant_identity(terms, b0):
    cf = ContinuedFraction(G(b0), lambda n: (G(terms[n - 1][0]), G(terms[n - 1][1])), len(terms))
    pairs = convergents(cf, len(terms))
    assert all(r == 0 for r in determinant_residuals(cf, pairs))


def test_zero_denominator_is_reported():
    def terms(n):
        return {1: (G(1), G(1)), 2: (G(-1), G(1))}.get(n, (G(1), G(1)))

    ev = evaluate(ContinuedFraction(G(0), terms), tol=1e-10, N_max=200)
    assert any("B_2 = 0" in d for d in ev.diagnostics)
    assert ev.converged


def test_nonconvergence_carries_partial():
    alternating = ContinuedFraction(0.0, lambda n: (-1.0, 1.0))
    with pytest.raises(NonConvergenceError) as info:
        evaluate(alternating, N_max=50)
    assert info.value.partial.n > 0


# order-2 fractions ---------------------------------------------------------

def test_gauss_fraction_targets_logderiv(gauss_params):
    a1, a2 = gauss_recurrence_coefficients(gauss_params, 0.2)
    ev = evaluate(from_order2_coefficients(a1, a2), N_max=300)
    assert abs(ev.value - f21_logderiv(gauss_params, 0.2)) < 1e-8


def test_zero_a2_terminates():
    a1 = lambda n: G(n + 3)
    a2 = lambda n: G(0)
    ev = evaluate(from_order2_coefficients(a1, a2))
    assert ev.terminated and ev.value == G(Fr(1, 3))


def test_on_bisector_does_not_settle(gauss_params):
    a1, a2 = gauss_recurrence_coefficients(gauss_params, complex(0.5, 0.3))
    with pytest.raises(NonConvergenceError):
        evaluate(from_order2_coefficients(a1, a2), tol=1e-12, N_max=300)


# reconstruction --------------------------------------------------------------

@settings(max_examples=30)
@given(st.lists(st.tuples(nonzero_fr, nonzero_fr), min_size=14, max_size=14), nonzero_fr, fr)
def test_reconstruction_inverts_convergents(coeffs, top, nxt):
    a1 = lambda n: G(coeffs[n][0])
    a2 = lambda n: G(coeffs[n][1])
    x = recurrence_sequence(a1, a2, 12, G(top), G(nxt))
    cf = from_recurrence(a1, a2)
    pairs = convergents(cf, 12)
    for n in range(3, 11):
        assert reconstruct_x0_x1(pairs, a2(n - 1), x[n], x[n + 1], n) == (x[0], x[1])


def test_reconstruction_gauss_surrogate(gauss_params):
    a1, a2 = gauss_recurrence_coefficients(gauss_params, Z)
    x = recurrence_sequence(a1, a2, 8, G(1), G(Fr(2, 3)))
    pairs = convergents(from_recurrence(a1, a2), 8)
    assert reconstruct_x0_x1(pairs, a2(7), x[8], x[9], 8) == (x[0], x[1])


def test_reconstruction_zero_tail():
    a1, a2 = (lambda n: G(n + 1)), (lambda n: G(2))
    pairs = convergents(from_recurrence(a1, a2), 10)
    n, xn1 = 6, G(5)
    assert reconstruct_x0_x1(pairs, a2(n - 1), G(0), xn1, n) == (
        a2(n - 1) * pairs[n - 1].A * xn1,
        a2(n - 1) * pairs[n - 1].B * xn1,
    )


def test_order2_fraction_sequence_convention():
    # from_order2_coefficients reconstructs (x_1, x_0) through its sequence X = (x_1, x_0, x_1, ...)
    a1, a2 = (lambda n: G(2 * n + 1)), (lambda n: G(Fr(-1, n + 2)))
    x = recurrence_sequence(a1, a2, 9, G(1), G(-1))
    cf = from_order2_coefficients(a1, a2)
    pairs = convergents(cf, 10)
    X = [x[1]] + x
    for n in range(3, 9):
        a_n, _ = cf.term(n)
        assert reconstruct_x0_x1(pairs, a_n, X[n], X[n + 1], n) == (X[0], X[1])


# equivalence with the derivative chain ------------------------------------

@pytest.mark.parametrize("z", [Z, G(Fr(1, 5), Fr(1, 7)), G(Fr(4, 5)), G(Fr(-1, 3), Fr(2, 3))])
def test_cf_equivalence_gauss(gauss, z):
    rep = cf_equivalence(gauss, z)
    assert rep.all_equal and (rep.offset, rep.orientation) == (-1, "A/B")
    assert [r[0] for r in rep.rows] == list(range(2, 13))


def test_cf_equivalence_float(gauss):
    rep = cf_equivalence(to_backend(gauss, DOUBLE), 0.2)
    assert rep.all_equal and rep.offset == -1


def test_cf_equivalence_constant_solution(pole_op):
    rep = cf_equivalence(pole_op, G(Fr(9, 10)))
    assert rep.all_equal and all(r[1] == 0 for r in rep.rows)


def test_cf_equivalence_random_operators():
    rng = random.Random(7)
    for _ in range(3):
        op = random_fuchsian_order2(rng)
        for z in sample_points(op, rng, count=2):
            rep = cf_equivalence(op, z)
            assert rep.all_equal and rep.offset == -1, (op, z)


def test_cf_equivalence_needs_order_two():
    op = make_operator("standard", [0, 0, 1])
    with pytest.raises(PreconditionError):
        cf_equivalence(op, G(1))


def test_perron_coefficients_match_gauss(gauss, gauss_params):
    k, coef = perron_coefficients(gauss, Z)
    a1, a2 = gauss_recurrence_coefficients(gauss_params, Z)
    assert k == 2
    for n in range(10):
        assert coef(1, n) == a1(n) and coef(2, n) == a2(n)


# branched fraction ------------------------------------------------------------

def test_branched_order_two_is_truncated_convergent(gauss, gauss_params):
    a1, a2 = gauss_recurrence_coefficients(gauss_params, Z)
    coef = lambda j, n: a1(n) if j == 1 else a2(n)
    cf = from_order2_coefficients(a1, a2)
    for D in (1, 5, 17):
        pairs = convergents(cf, D)
        assert branched_fraction_eval(coef, 2, D) == pairs[D + 1].value


def test_branched_unit_coefficients():
    coef = lambda j, n: G(1) if j == 1 else G(0)
    assert branched_fraction_eval(coef, 4, 10) == 1


def test_branched_zero_level():
    with pytest.raises(ZeroDivisionError):
        branched_fraction_eval(lambda j, n: G(0), 2, 3)


def test_branched_order_three_reported():
    # z^3 P_0 + ...: a theta operator whose distinguished solution at 0 is 3F2
    a, b = (Fr(1, 2), Fr(1, 3), Fr(1, 5)), (Fr(1, 4), Fr(2, 3))
    P0 = Poly.from_roots([G(0), G(1 - b[0]), G(1 - b[1])], G(1))
    P1 = Poly.from_roots([G(-x) for x in a], G(1)).scale(G(-1))
    op = make_operator("theta", [P0, P1])
    k, coef = perron_coefficients(op, 0.2)
    assert k == 3
    r = branched_fraction_eval(coef, 3, 400)
    oracle = mpmath.diff(lambda t: mpmath.hyp3f2(*a, *b, t), 0.2) / mpmath.hyp3f2(*a, *b, 0.2)
    err = abs(complex(r) - complex(oracle))
    print(f"order-3 branched fraction at D=400: |error| = {err:.3g}")
    assert math.isfinite(err)
