"""Complex scalars in two backends.

The exact backend uses :class:`GaussRat`, a complex number whose real and
imaginary parts are :class:`fractions.Fraction`.  The float backend uses
Python ``complex`` at 53 bits, or ``mpmath.mpc`` at any other precision.
Mixing the two in one expression raises :class:`BackendMismatch`.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import mpmath

__all__ = [
    "BackendMismatch",
    "GaussRat",
    "Backend",
    "EXACT",
    "DOUBLE",
    "backend_of",
    "parse_component",
    "to_complex",
    "is_exact",
]


class BackendMismatch(TypeError):
    """An exact scalar met a floating point one."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise BackendMismatch(f"cannot use {type(x).__name__} as an exact component")


class GaussRat:
    """Gaussian rational ``re + im*i`` with exact arithmetic."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def from_complex(cls, z) -> "GaussRat":
        """Exact binary value of a float or complex (no rounding)."""
        z = complex(z)
        return cls(Fraction(z.real), Fraction(z.imag))

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussRat):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return GaussRat(other)
        if isinstance(other, bool):
            return GaussRat(int(other))
        raise BackendMismatch(
            f"exact scalar combined with {type(other).__name__}; convert explicitly"
        )

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        return GaussRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return GaussRat(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        if not self.im and not o.im:
            return GaussRat(self.re * o.re)
        return GaussRat(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if not o.im:
            if not o.re:
                raise ZeroDivisionError("division by exact zero")
            return GaussRat(self.re / o.re, self.im / o.re)
        d = o.re * o.re + o.im * o.im
        return GaussRat(
            (self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d
        )

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("only integer powers of exact scalars")
        if k < 0:
            return GaussRat(1) / (self ** (-k))
        result, base = GaussRat(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Exact squared modulus."""
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return math.hypot(float(self.re), float(self.im))

    # comparisons / conversions ------------------------------------------
    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except BackendMismatch:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return not self.im

    def is_integer(self) -> bool:
        return not self.im and self.re.denominator == 1

    def __repr__(self):
        return f"GaussRat({str(self.re)!r}, {str(self.im)!r})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


def is_exact(x) -> bool:
    return isinstance(x, (GaussRat, int, Fraction)) and not isinstance(x, bool)


def to_complex(x) -> complex:
    return complex(x)


def parse_component(text):
    """Parse one real component: ``"3/4"``, ``"-2"``, ``"0.25"`` or a number."""
    if isinstance(text, bool):
        raise ValueError("boolean is not a number")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        return Fraction(text)
    if isinstance(text, str):
        return Fraction(text.strip())
    raise ValueError(f"not a numeric component: {text!r}")


@dataclass(frozen=True)
class Backend:
    """Scalar backend: ``kind`` is ``"exact"`` or ``"float"``."""

    kind: str = "exact"
    precision_bits: int = 53

    def __post_init__(self):
        if self.kind not in ("exact", "float"):
            raise ValueError(f"unknown backend {self.kind!r}")
        if self.precision_bits < 2:
            raise ValueError("precision_bits must be >= 2")

    @property
    def exact(self) -> bool:
        return self.kind == "exact"

    @property
    def uses_mpmath(self) -> bool:
        return self.kind == "float" and self.precision_bits != 53

    @property
    def eps(self) -> float:
        return 0.0 if self.exact else 2.0 ** (1 - self.precision_bits)

    def context(self):
        if self.uses_mpmath:
            return mpmath.workprec(self.precision_bits)
        return contextlib.nullcontext()

    def coerce(self, x):
        """Convert ``x`` into this backend's scalar type.

        Float to exact conversion is exact (the binary value is kept).
        """
        if self.exact:
            if isinstance(x, GaussRat):
                return x
            if isinstance(x, (int, Fraction, str)) and not isinstance(x, bool):
                return GaussRat(x)
            if isinstance(x, (float, complex)):
                return GaussRat.from_complex(x)
            if isinstance(x, (mpmath.mpf, mpmath.mpc)):
                return GaussRat.from_complex(complex(x))
            raise BackendMismatch(f"cannot coerce {type(x).__name__}")
        if self.uses_mpmath:
            with mpmath.workprec(self.precision_bits):
                if isinstance(x, GaussRat):
                    re = mpmath.mpf(x.re.numerator) / x.re.denominator
                    im = mpmath.mpf(x.im.numerator) / x.im.denominator
                    return mpmath.mpc(re, im)
                if isinstance(x, Fraction):
                    return mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator)
                return mpmath.mpc(x)
        return complex(x)

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)

    def to_json(self) -> dict:
        return {"backend": self.kind, "precision_bits": self.precision_bits}


EXACT = Backend("exact")
DOUBLE = Backend("float", 53)


def backend_of(x) -> Backend:
    """Backend a scalar belongs to; ints and Fractions count as exact."""
    if is_exact(x):
        return EXACT
    if isinstance(x, (mpmath.mpc, mpmath.mpf)):
        return Backend("float", mpmath.mp.prec)
    if isinstance(x, (float, complex)):
        return DOUBLE
    raise BackendMismatch(f"not a scalar: {type(x).__name__}")
