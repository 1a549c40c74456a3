"""Nearest-singularity cells and the set of perpendicular bisectors between them.

Every predicate is a pairwise distance comparison.  With exact sites and an
exact query point the comparisons use exact squared distances, so results
are translation-invariant bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import PreconditionError
from .scalars import GaussRat, is_exact

__all__ = [
    "BisectorLine",
    "RegionQueryResult",
    "DEFAULT_TIE_TOL",
    "bisector_lines",
    "classify_point",
    "region_guard",
    "component_signature",
    "same_component",
]

DEFAULT_TIE_TOL = 1e-12


@dataclass(frozen=True)
class BisectorLine:
    midpoint: object
    direction: complex
    site_pair: tuple

    def distance(self, z) -> float:
        w = complex(z) - complex(self.midpoint)
        # component of w normal to the line
        normal = self.direction * 1j
        return abs((w * normal.conjugate()).real)


@dataclass(frozen=True)
class RegionQueryResult:
    nearest_index: int | None
    distance: float
    is_tie: bool
    distance_to_bisectors: float


def _abs2(w):
    if isinstance(w, GaussRat):
        return w.abs2()
    w = complex(w)
    return w.real * w.real + w.imag * w.imag


def _diff(a, b):
    if is_exact(a) and is_exact(b):
        return GaussRat._coerce(a) - GaussRat._coerce(b)
    return complex(a) - complex(b)


def bisector_lines(S) -> list[BisectorLine]:
    """One perpendicular bisector per unordered pair of sites."""
    pts = list(S)
    out = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            a, b = pts[i], pts[j]
            if is_exact(a) and is_exact(b):
                mid = (GaussRat._coerce(a) + b) / 2
            else:
                mid = (complex(a) + complex(b)) / 2
            d = complex(b) - complex(a)
            direction = 1j * d / abs(d)
            out.append(BisectorLine(mid, direction, (i, j)))
    return out


def _line_distance(z, a, b) -> float:
    # | |z-a|^2 - |z-b|^2 | / (2 |a-b|), exact up to the final sqrt
    num = abs(_abs2(_diff(z, a)) - _abs2(_diff(z, b)))
    return float(num) / (2.0 * math.sqrt(float(_abs2(_diff(a, b)))))


def classify_point(S, z, tol: float = DEFAULT_TIE_TOL) -> RegionQueryResult:
    """Nearest site of ``z`` and its distance to the bisector set.

    ``is_tie`` means the two closest sites are equidistant (within ``tol``);
    ``distance_to_bisectors`` is the distance to the nearest full bisector line
    (``inf`` when there are fewer than two sites).
    """
    pts = list(S)
    if not pts:
        return RegionQueryResult(None, math.inf, False, math.inf)
    d2 = [_abs2(_diff(z, t)) for t in pts]
    dist = [math.sqrt(float(x)) for x in d2]
    order = sorted(range(len(pts)), key=lambda i: d2[i])
    i0 = order[0]
    if dist[i0] <= tol:
        raise PreconditionError(f"point {z} coincides with singularity {pts[i0]}", reason="at_singularity")
    if len(pts) == 1:
        return RegionQueryResult(i0, dist[i0], False, math.inf)
    dAL = min(_line_distance(z, pts[i], pts[j]) for i in range(len(pts)) for j in range(i + 1, len(pts)))
    i1 = order[1]
    tie_gap = _line_distance(z, pts[i0], pts[i1])
    is_tie = d2[i0] == d2[i1] or tie_gap <= tol
    return RegionQueryResult(None if is_tie else i0, dist[i0], is_tie, dAL)


def region_guard(S, z, tol: float = DEFAULT_TIE_TOL) -> bool:
    """True iff ``z`` is farther than ``tol`` from every bisector line."""
    pts = list(S)
    if len(pts) < 2:
        return True
    dAL = min(_line_distance(z, pts[i], pts[j]) for i in range(len(pts)) for j in range(i + 1, len(pts)))
    return dAL > tol


def component_signature(S, z, tol: float = DEFAULT_TIE_TOL) -> tuple:
    """Side of every bisector ``z`` lies on (+1 nearer the first site, -1, or 0 on it).

    Two points lie in the same connected component of the complement of
    the bisector set exactly when their signatures agree and contain no zeros.
    """
    pts = list(S)
    sig = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if _line_distance(z, pts[i], pts[j]) <= tol:
                sig.append(0)
                continue
            diff = _abs2(_diff(z, pts[j])) - _abs2(_diff(z, pts[i]))
            sig.append(1 if diff > 0 else -1)
    return tuple(sig)


def same_component(S, z1, z2, tol: float = DEFAULT_TIE_TOL) -> bool:
    s1 = component_signature(S, z1, tol)
    s2 = component_signature(S, z2, tol)
    return 0 not in s1 and s1 == s2
