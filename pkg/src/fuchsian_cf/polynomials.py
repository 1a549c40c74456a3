"""Dense univariate polynomials and rational functions over a scalar backend.

Coefficients are stored in ascending degree.  Exact coefficients
(:class:`~fuchsian_cf.scalars.GaussRat`) get canonical forms: rational
functions are reduced by a monic GCD after every operation.  Float
coefficients only get a monic denominator.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .scalars import GaussRat, is_exact

__all__ = ["NEG_INF", "Poly", "RatFunc", "poly_lcm"]

#: degree of the zero polynomial
NEG_INF = -math.inf


def _is_zero(c) -> bool:
    return c == 0


class Poly:
    """Polynomial with coefficients ``coeffs[i]`` of ``x**i``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = list(coeffs)
        while cs and _is_zero(cs[-1]):
            cs.pop()
        self.coeffs = tuple(cs)

    # constructors ---------------------------------------------------------
    @classmethod
    def const(cls, c) -> "Poly":
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c) -> "Poly":
        zero = c - c
        return cls([zero] * k + [c])

    @classmethod
    def from_roots(cls, roots: Sequence, one) -> "Poly":
        p = cls([one])
        for r in roots:
            p = p * cls([-r, one])
        return p

    # basic properties -----------------------------------------------------
    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i: int):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    @property
    def exact(self) -> bool:
        return all(is_exact(c) for c in self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if not self.coeffs:
            return other == 0
        return len(self.coeffs) == 1 and self.coeffs[0] == other

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if _is_zero(c):
                continue
            terms.append(f"({c})" + ("" if i == 0 else "*x" if i == 1 else f"*x^{i}"))
        return " + ".join(terms)

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [a[0] * b[0]] + [None] * (len(a) + len(b) - 2)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                if i == 0 and j == 0:
                    continue
                t = x * y
                out[i + j] = t if out[i + j] is None else out[i + j] + t
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly([self.coeffs[0] ** 0 if self.coeffs else 1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c) -> "Poly":
        return Poly([x * c for x in self.coeffs])

    def divmod(self, other: "Poly"):
        """Euclidean division over a field."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dv = other.coeffs
        dl = len(dv)
        if len(rem) < dl:
            return Poly(), Poly(rem)
        inv_lc = 1 / dv[-1]
        quot = [None] * (len(rem) - dl + 1)
        for i in range(len(rem) - dl, -1, -1):
            q = rem[i + dl - 1] * inv_lc
            quot[i] = q
            if not _is_zero(q):
                for j in range(dl - 1):
                    rem[i + j] = rem[i + j] - q * dv[j]
            rem[i + dl - 1] = q - q  # exact zero of the right type
        return Poly(quot), Poly(rem[: dl - 1])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("polynomial division is not exact")
        return q

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        inv = 1 / self.coeffs[-1]
        return Poly([c * inv for c in self.coeffs[:-1]] + [self.coeffs[-1] ** 0])

    # calculus / evaluation --------------------------------------------------
    def __call__(self, x):
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * x + c
        if acc is None:
            return x - x if not isinstance(x, int) else 0
        return acc

    def deriv(self) -> "Poly":
        return Poly([c * i for i, c in enumerate(self.coeffs) if i > 0])

    def shift(self, a) -> "Poly":
        """Return ``p(x + a)`` (Taylor shift, Horner scheme)."""
        out = Poly()
        for c in reversed(self.coeffs):
            out = out * Poly([a, a ** 0]) + c
        return out

    def compose(self, other: "Poly") -> "Poly":
        out = Poly()
        for c in reversed(self.coeffs):
            out = out * other + c
        return out

    def valuation(self) -> int:
        """Multiplicity of the root 0; the zero polynomial has none."""
        for i, c in enumerate(self.coeffs):
            if not _is_zero(c):
                return i
        raise ValueError("valuation of the zero polynomial")

    def map(self, fn) -> "Poly":
        return Poly([fn(c) for c in self.coeffs])

    def reversed(self, k: int | None = None) -> "Poly":
        """``x**k * p(1/x)``; ``k`` defaults to the degree."""
        if k is None:
            k = len(self.coeffs) - 1
        if k < len(self.coeffs) - 1:
            raise ValueError("reversal length below degree")
        zero = self.coeffs[0] - self.coeffs[0] if self.coeffs else 0
        padded = list(self.coeffs) + [zero] * (k + 1 - len(self.coeffs))
        return Poly(reversed(padded))

    def gcd(self, other: "Poly") -> "Poly":
        """Monic GCD.  Float polynomials have no reliable GCD; returns 1."""
        if not (self.exact and other.exact):
            one = (self.coeffs or other.coeffs or [1])[-1] ** 0
            return Poly([one])
        a, b = self, other
        if a.degree < b.degree:
            a, b = b, a
        while not b.is_zero():
            # monic remainders keep coefficient sizes in check
            a, b = b.monic(), a % b
        if a.is_zero():
            return Poly([GaussRat(1)])
        return a.monic()

    def squarefree_decomposition(self):
        """Yun's algorithm: list of (s_i, i) with ``p = lc * prod s_i**i``."""
        if self.degree < 1:
            return []
        f = self.monic()
        df = f.deriv()
        a = f.gcd(df)
        b = f.exact_div(a)
        c = df.exact_div(a)
        d = c - b.deriv()
        out = []
        i = 1
        while b.degree > 0:
            a = b.gcd(d)
            b = b.exact_div(a)
            c = d.exact_div(a)
            d = c - b.deriv()
            if a.degree > 0:
                out.append((a, i))
            i += 1
        return out


def poly_lcm(polys: Sequence[Poly]) -> Poly:
    """Monic LCM of nonzero exact polynomials."""
    out = None
    for p in polys:
        p = p.monic()
        if out is None:
            out = p
            continue
        out = (out * p).exact_div(out.gcd(p)).monic()
    if out is None:
        return Poly([GaussRat(1)])
    return out


class RatFunc:
    """Rational function ``num/den`` with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduce: bool = True):
        if not isinstance(num, Poly):
            num = Poly([num])
        if den is None:
            one = num.coeffs[0] ** 0 if num.coeffs else GaussRat(1)
            den = Poly([one])
        elif not isinstance(den, Poly):
            den = Poly([den])
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if reduce:
            if num.is_zero():
                den = Poly([den.lc ** 0])
            else:
                g = num.gcd(den)
                if g.degree > 0:
                    num = num.exact_div(g)
                    den = den.exact_div(g)
            lc = den.lc
            if not lc == 1:
                inv = 1 / lc
                num = num.scale(inv)
                den = den.scale(inv)
        self.num = num
        self.den = den

    def normalized(self) -> "RatFunc":
        """Same function with a monic denominator (no GCD step)."""
        lc = self.den.lc
        if lc == 1:
            return self
        inv = 1 / lc
        return RatFunc(self.num.scale(inv), self.den.scale(inv), reduce=False)

    @classmethod
    def of(cls, x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        return cls(x)

    @property
    def exact(self) -> bool:
        return self.num.exact and self.den.exact

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    @property
    def degree(self):
        """``deg num - deg den`` (behaviour at infinity)."""
        if self.num.is_zero():
            return NEG_INF
        return self.num.degree - self.den.degree

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            other = RatFunc.of(other if isinstance(other, Poly) else Poly([other]))
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFunc({self.num!r}, {self.den!r})"

    def __str__(self):
        if self.den.degree == 0:
            return f"{self.num}"
        return f"({self.num})/({self.den})"

    def __add__(self, other):
        o = _as_rf(other)
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-_as_rf(other))

    def __rsub__(self, other):
        return _as_rf(other) - self

    def __mul__(self, other):
        o = _as_rf(other)
        if self.num.is_zero() or o.num.is_zero():
            return RatFunc(Poly(), Poly([self.den.lc ** 0]))
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_rf(other)
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return _as_rf(other) / self

    def deriv(self) -> "RatFunc":
        """Quotient rule, then reduction."""
        if self.den.degree == 0:
            return RatFunc(self.num.deriv(), self.den)
        return RatFunc(
            self.num.deriv() * self.den - self.num * self.den.deriv(), self.den * self.den
        )

    def __call__(self, x):
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"evaluation at a pole: {x}")
        return self.num(x) / d

    def shift(self, a) -> "RatFunc":
        return RatFunc(self.num.shift(a), self.den.shift(a))

    def map(self, fn) -> "RatFunc":
        return RatFunc(self.num.map(fn), self.den.map(fn))

    def pole_order(self, t) -> int:
        """Order of the pole at an exact point ``t`` (0 if regular there)."""
        lin = Poly([-t, t ** 0 if isinstance(t, GaussRat) else 1])
        order = 0
        d = self.den
        while d.degree > 0:
            q, r = d.divmod(lin)
            if not r.is_zero():
                break
            d = q
            order += 1
        return order


def _as_rf(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, Poly):
        return RatFunc(x)
    if isinstance(x, (int, Fraction)):
        x = GaussRat(x)
    return RatFunc(Poly([x]))
