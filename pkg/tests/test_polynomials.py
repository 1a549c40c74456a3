from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuchsian_cf.polynomials import Poly, RatFunc, poly_lcm
from fuchsian_cf.roots import nonneg_integer_roots, poly_roots
from fuchsian_cf.scalars import DOUBLE, EXACT, Backend, BackendMismatch, GaussRat as G

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)
gauss = st.builds(G, fracs, fracs)
polys = st.lists(gauss, min_size=0, max_size=5).map(Poly)
nonzero_polys = polys.filter(lambda p: not p.is_zero())
small = st.lists(st.integers(-6, 6).map(G), min_size=1, max_size=3).map(Poly).filter(lambda p: not p.is_zero())


@given(gauss, gauss, gauss)
def test_gaussrat_field_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    if y != 0:
        assert (x / y) * y == x


def test_gaussrat_mixing_with_float_is_refused():
    with pytest.raises(BackendMismatch):
        G(1) + 0.5


def test_from_complex_is_exact_binary_value():
    g = G.from_complex(0.1)
    assert g.re == Fr(0.1) and g.im == 0


def test_backend_coerce():
    assert EXACT.coerce(Fr(1, 3)) == G(Fr(1, 3))
    assert DOUBLE.coerce(G(1, 2)) == complex(1, 2)
    hp = Backend("float", 100)
    assert hp.uses_mpmath and hp.eps < 1e-29


@given(polys, polys, polys)
def test_ring_laws(p, q, r):
    assert (p + q) * r == p * r + q * r
    assert (p * q).deriv() == p.deriv() * q + p * q.deriv()


@given(polys, nonzero_polys)
def test_division_with_remainder(p, q):
    quo, rem = p.divmod(q)
    assert quo * q + rem == p
    assert rem.is_zero() or rem.degree < q.degree


@settings(max_examples=60)
@given(nonzero_polys, nonzero_polys, nonzero_polys)
def test_gcd_divides_and_contains_common_factor(p, q, r):
    g = (p * r).gcd(q * r)
    assert g.lc == 1
    assert (p * r).divmod(g)[1].is_zero()
    assert (q * r).divmod(g)[1].is_zero()
    assert g.divmod(r.monic())[1].is_zero()


@given(polys, gauss)
def test_shift_is_composition(p, a):
    x = G(Fr(3, 7), Fr(-1, 2))
    assert p.shift(a)(x) == p(x + a)


@settings(max_examples=60)
@given(small, small, small, small)
def test_ratfunc_arithmetic_is_canonical(a, b, c, d):
    f, g = RatFunc(a, b), RatFunc(c, d)
    s = f + g
    assert s == RatFunc(a * d + c * b, b * d)
    assert s.den.lc == 1
    assert s.num.gcd(s.den).degree <= 0 or s.num.is_zero()
    assert (f * g).deriv() == f.deriv() * g + f * g.deriv()


def test_lcm_of_denominators():
    x = Poly([G(0), G(1)])
    one = Poly([G(1)])
    l = poly_lcm([x * (one - x), x * x])
    assert l == (x * x * (x - one)).monic()


def test_exact_roots_with_multiplicity():
    p = Poly.from_roots([G(Fr(1, 2)), G(Fr(1, 2)), G(-3), G(0, 1)], G(1))
    roots = {(r.value, r.multiplicity, r.exact) for r in poly_roots(p)}
    assert roots == {(G(Fr(1, 2)), 2, True), (G(-3), 1, True), (G(0, 1), 1, True)}


def test_irrational_roots_are_float():
    roots = poly_roots(Poly([G(-2), G(0), G(1)]))
    assert all(not r.exact for r in roots)
    assert sorted(round(complex(r.value).real, 12) for r in roots) == [-1.414213562373, 1.414213562373]


def test_float_roots_cluster():
    p = Poly.from_roots([1.0, 1.0, 2.5], 1.0 + 0j)
    roots = sorted(poly_roots(p), key=lambda r: r.value.real)
    assert [r.multiplicity for r in roots] == [2, 1]
    assert abs(roots[1].value - 2.5) < 1e-12


def test_nonneg_integer_roots():
    p = Poly.from_roots([G(0), G(3), G(-2), G(Fr(5, 2))], G(1))
    assert nonneg_integer_roots(p) == [0, 3]
    assert nonneg_integer_roots(Poly.from_roots([0.0, 4.0, 0.5], 1.0)) == [0, 4]
