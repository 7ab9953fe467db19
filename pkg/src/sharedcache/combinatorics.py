"""Exact integer and rational primitives.

Everything here works on Python ints and :class:`fractions.Fraction`, so
results never lose precision (factorial-sized counts appear quickly).
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction]


def binomial(n: int, k: int) -> int:
    """C(n, k), with 0 whenever k < 0, k > n or n < 0."""
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def falling_factorial(n: int, k: int) -> int:
    """n! / (n - k)!.  Requires 0 <= k <= n."""
    if n < 0 or k < 0:
        raise ValueError(f"falling_factorial needs non-negative arguments, got ({n}, {k})")
    if k > n:
        raise ValueError(f"falling_factorial needs k <= n, got ({n}, {k})")
    return math.perm(n, k)


def falling_factorial_or_zero(n: int, k: int) -> int:
    # Counting convention: no way to pick k ordered items from fewer than k.
    if n < 0 or k < 0 or k > n:
        return 0
    return math.perm(n, k)


def colex_subsets(n: int, k: int) -> list[tuple[int, ...]]:
    """All k-subsets of {1..n} as sorted tuples, in colexicographic order."""
    if k < 0 or k > n:
        return []
    return sorted(combinations(range(1, n + 1), k), key=lambda s: s[::-1])


def all_subsets(items: Iterable[int]) -> list[tuple[int, ...]]:
    """Every subset of ``items`` (as sorted tuples), by size then colex."""
    items = sorted(items)
    out: list[tuple[int, ...]] = []
    for k in range(len(items) + 1):
        out.extend(sorted(combinations(items, k), key=lambda s: s[::-1]))
    return out


def format_rational(q: Number) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or an integer string into an exact Fraction."""
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


@dataclass(frozen=True)
class EnvelopePoint:
    t: int
    value: Fraction


def _cross(o: EnvelopePoint, a: EnvelopePoint, b: EnvelopePoint) -> Fraction:
    return (a.t - o.t) * (b.value - o.value) - (a.value - o.value) * (b.t - o.t)


class Envelope:
    """Lower convex envelope of a finite point set, as a piecewise-linear map.

    ``vertices`` are the points of the lower hull, left to right.  Calling the
    envelope at a rational abscissa inside ``[t_min, t_max]`` interpolates
    linearly between the two enclosing vertices.
    """

    def __init__(self, points: Sequence[EnvelopePoint]):
        if len(points) < 2:
            raise ValueError("an envelope needs at least two points")
        pts = sorted(points, key=lambda p: p.t)
        for a, b in zip(pts, pts[1:]):
            if a.t == b.t:
                raise ValueError(f"duplicate abscissa t={a.t}")
        hull: list[EnvelopePoint] = []
        for p in pts:
            # pop while the last turn is not strictly counter-clockwise
            while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
                hull.pop()
            hull.append(p)
        self.vertices: tuple[EnvelopePoint, ...] = tuple(hull)
        self._ts = [v.t for v in hull]

    @property
    def t_min(self) -> int:
        return self._ts[0]

    @property
    def t_max(self) -> int:
        return self._ts[-1]

    def __call__(self, t: Number) -> Fraction:
        t = Fraction(t)
        if t < self.t_min or t > self.t_max:
            raise ValueError(f"t={t} outside envelope domain [{self.t_min}, {self.t_max}]")
        idx = bisect_right(self._ts, t)
        if idx == len(self._ts):
            return self.vertices[-1].value
        left, right = self.vertices[idx - 1], self.vertices[idx]
        if t == left.t:
            return left.value
        frac = (t - left.t) / (right.t - left.t)
        return left.value + frac * (right.value - left.value)

    def slopes(self) -> list[Fraction]:
        v = self.vertices
        return [(b.value - a.value) / (b.t - a.t) for a, b in zip(v, v[1:])]


def lower_convex_envelope(points: Iterable[tuple[int, Number] | EnvelopePoint]) -> Envelope:
    """Build the :class:`Envelope` of ``(t, value)`` pairs."""
    pts = [
        p if isinstance(p, EnvelopePoint) else EnvelopePoint(int(p[0]), Fraction(p[1]))
        for p in points
    ]
    return Envelope(pts)
