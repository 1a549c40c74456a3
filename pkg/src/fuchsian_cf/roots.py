"""Polynomial roots by Aberth-Ehrlich simultaneous iteration.

Exact polynomials are first split into square-free factors (Yun), so each
factor has simple roots and the iteration converges quadratically-cubically.
Roots of exact polynomials that are Gaussian rationals are snapped to exact
values when an exact evaluation confirms them.
"""

from __future__ import annotations

import cmath
import contextlib
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .polynomials import Poly
from .scalars import GaussRat, is_exact

__all__ = ["RootFindingError", "Root", "aberth", "poly_roots", "nonneg_integer_roots"]


class RootFindingError(ArithmeticError):
    def __init__(self, message, residuals=()):
        super().__init__(message)
        self.residuals = list(residuals)


@dataclass(frozen=True)
class Root:
    value: object  # GaussRat when exact, complex otherwise
    multiplicity: int
    exact: bool


def _initial_guesses(coeffs, n):
    # Guesses on a circle whose radius follows the geometric mean of |a0/an|;
    # an irrational angle offset avoids symmetric stalls.
    a0 = abs(coeffs[0]) if coeffs[0] != 0 else 0.0
    an = abs(coeffs[-1])
    r = (float(a0) / float(an)) ** (1.0 / n) if a0 else 1.0
    bound = 1 + max(float(abs(c)) for c in coeffs[:-1]) / float(an)
    r = min(max(r, 1e-3), bound)
    return [r * cmath.exp(1j * (2 * math.pi * k / n + 0.4)) for k in range(n)]


def aberth(coeffs, *, tol: float = 1e-15, max_iter: int = 500, prec: int = 53):
    """Roots of ``sum coeffs[i] x**i`` (complex coefficients).

    With ``prec > 53`` the iteration runs in mpmath at that precision.
    Raises :class:`RootFindingError` (with residuals) if it does not settle.
    """
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    n = len(coeffs) - 1
    if n < 1:
        return []
    use_mp = prec != 53
    if use_mp:
        ctx = mpmath.workprec(prec)
        conv = mpmath.mpc
        tol = max(tol, 2.0 ** (4 - prec))
    else:
        ctx = contextlib.nullcontext()
        conv = complex
    with ctx:
        cs = [conv(c) for c in coeffs]
        dcs = [cs[i] * i for i in range(1, n + 1)]
        zs = [conv(z) for z in _initial_guesses([complex(c) for c in cs], n)]

        def ev(c, x):
            acc = c[-1]
            for a in reversed(c[:-1]):
                acc = acc * x + a
            return acc

        scale = [abs(c) for c in cs]
        for _ in range(max_iter):
            done = True
            new = list(zs)
            for k in range(n):
                z = zs[k]
                p = ev(cs, z)
                if p == 0:
                    continue
                dp = ev(dcs, z)
                s = 0
                for j in range(n):
                    if j != k:
                        d = z - zs[j]
                        if d != 0:
                            s += 1 / d
                ratio = p / dp if dp != 0 else p
                denom = 1 - ratio * s
                corr = ratio / denom if denom != 0 else ratio
                new[k] = z - corr
                if abs(corr) > tol * max(1.0, abs(z)):
                    done = False
            zs = new
            if done:
                break
        else:
            res = [abs(ev(cs, z)) for z in zs]
            bounds = [sum(a * abs(z) ** i for i, a in enumerate(scale)) for z in zs]
            if any(r > 1e3 * tol * max(b, 1e-300) for r, b in zip(res, bounds)):
                raise RootFindingError("Aberth iteration did not converge", res)
        if use_mp:
            return [mpmath.mpc(z) for z in zs]
        return [complex(z) for z in zs]


def _snap(z: complex, p: Poly, max_den: int):
    """Try to identify ``z`` as an exact Gaussian rational root of ``p``."""
    cands = []
    for md in (max_den, 10**4, 10**8):
        re = Fraction(z.real).limit_denominator(md)
        im = Fraction(z.imag).limit_denominator(md)
        cands.append(GaussRat(re, im))
    for c in cands:
        if p(c) == 0:
            return c
    return None


def _denominator_hint(p: Poly) -> int:
    # For rational roots p/q of an integer polynomial, q divides the leading
    # coefficient; clear denominators to get a useful bound.
    den = 1
    for c in p.coeffs:
        g = c if isinstance(c, GaussRat) else GaussRat(c)
        den = den * g.re.denominator * g.im.denominator // math.gcd(den, g.re.denominator * g.im.denominator)
    lc = p.lc if isinstance(p.lc, GaussRat) else GaussRat(p.lc)
    lead = int(abs(lc.re * den)) + int(abs(lc.im * den))
    return max(1, min(lead, 10**12))


def poly_roots(p: Poly, *, prec: int = 53, tol: float = 1e-14) -> list[Root]:
    """Roots with multiplicity.

    Exact input: Yun square-free split, Aberth per factor, exact snapping.
    Float input: Aberth on the whole polynomial; clustered roots are merged
    and reported with their cluster size as multiplicity.
    """
    if p.degree < 1:
        return []
    if p.exact:
        out: list[Root] = []
        for factor, mult in p.squarefree_decomposition():
            work = factor
            # peel exact linear factors first; they are cheap and certain
            approx = aberth([complex(c) for c in factor.coeffs], prec=prec)
            hint = _denominator_hint(factor)
            for z in approx:
                z = complex(z)
                ex = _snap(z, work, hint) if work.degree >= 1 else None
                if ex is not None:
                    out.append(Root(ex, mult, True))
                    work = work.exact_div(Poly([-ex, GaussRat(1)]))
                else:
                    z = _polish(factor, z)
                    if _is_real_poly(factor) and abs(z.imag) <= 1e-12 * max(1.0, abs(z)):
                        z = complex(z.real, 0.0)
                    out.append(Root(z, mult, False))
        return out
    zs = aberth(list(p.coeffs), prec=prec)
    return _cluster(zs, tol=max(tol, 1e-7))


def _is_real_poly(p: Poly) -> bool:
    return all(not (c.im if isinstance(c, GaussRat) else complex(c).imag) for c in p.coeffs)


def _polish(p: Poly, z: complex, steps: int = 3) -> complex:
    cs = [complex(c) for c in p.coeffs]
    dp = [cs[i] * i for i in range(1, len(cs))]
    for _ in range(steps):
        f = sum(c * z**i for i, c in enumerate(cs))
        d = sum(c * z**i for i, c in enumerate(dp))
        if d == 0:
            break
        z = z - f / d
    return z


def _cluster(zs, tol):
    zs = sorted(zs, key=lambda z: (float(mpmath.re(z)), float(mpmath.im(z))))
    groups: list[list] = []
    for z in zs:
        for g in groups:
            if abs(g[0] - z) <= tol * max(1.0, abs(z)):
                g.append(z)
                break
        else:
            groups.append([z])
    return [Root(sum(g) / len(g), len(g), False) for g in groups]


def nonneg_integer_roots(p: Poly, *, tol: float = 1e-8) -> list[int]:
    """Distinct nonnegative integer roots, ascending.

    Exact polynomials are scanned exactly up to the Cauchy bound; float
    polynomials use rounded Aberth roots accepted within ``tol``.
    """
    if p.is_zero():
        raise ValueError("every integer is a root of the zero polynomial")
    if p.degree < 1:
        return []
    if p.exact:
        lc = abs(p.lc)
        bound = 1 + max(abs(c) for c in p.coeffs[:-1]) / lc
        return [n for n in range(int(math.floor(bound)) + 2) if p(n) == 0]
    out = set()
    for r in aberth(list(p.coeffs)):
        r = complex(r)
        n = round(r.real)
        if n >= 0 and abs(r - n) <= tol * max(1.0, abs(n)):
            out.add(n)
    return sorted(out)


def is_exact_root(p: Poly, t) -> bool:
    return is_exact(t) and p(t) == 0
