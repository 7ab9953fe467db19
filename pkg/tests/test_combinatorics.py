from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from sharedcache.combinatorics import (
    EnvelopePoint,
    all_subsets,
    binomial,
    colex_subsets,
    falling_factorial,
    falling_factorial_or_zero,
    format_rational,
    lower_convex_envelope,
    parse_rational,
)


@pytest.mark.parametrize("n,k,expected", [(3, 1, 3), (0, 2, 0), (6, 3, 20), (5, -1, 0), (-2, 1, 0), (4, 4, 1)])
def test_binomial(n, k, expected):
    assert binomial(n, k) == expected


@pytest.mark.parametrize("n,k,expected", [(9, 9, 362880), (5, 0, 1), (4, 2, 12)])
def test_falling_factorial(n, k, expected):
    assert falling_factorial(n, k) == expected


@pytest.mark.parametrize("n,k", [(2, 3), (-1, 0), (3, -1)])
def test_falling_factorial_rejects(n, k):
    with pytest.raises(ValueError):
        falling_factorial(n, k)
    assert falling_factorial_or_zero(n, k) == 0


def test_big_counts_stay_exact():
    # 21! overflows 64-bit integers
    assert falling_factorial(21, 21) * falling_factorial(8, 8) == 51090942171709440000 * 40320


def test_pascal_rule():
    for n in range(1, 65):
        for k in range(1, n):
            assert binomial(n, k) == binomial(n - 1, k) + binomial(n - 1, k - 1)


def test_hockey_stick():
    for lam in range(1, 65):
        for i in range(lam):
            assert sum(binomial(lam - r, i) for r in range(1, lam - i + 1)) == binomial(lam, i + 1)


def test_colex_order():
    assert colex_subsets(3, 2) == [(1, 2), (1, 3), (2, 3)]
    assert colex_subsets(4, 2) == [(1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 4)]
    assert colex_subsets(3, 0) == [()]
    assert colex_subsets(3, 4) == []
    assert len(all_subsets([1, 3, 4])) == 8


def _brute_envelope(points, t):
    """Lowest value at t over all chords (and points) of the set."""
    best = None
    for (a, fa), (b, fb) in combinations(points, 2):
        if a > b:
            (a, fa), (b, fb) = (b, fb), (a, fa)
        if a <= t <= b:
            v = fa + (fb - fa) * Fraction(t - a, b - a)
            best = v if best is None else min(best, v)
    for a, fa in points:
        if a == t:
            best = fa if best is None else min(best, fa)
    return best


def test_envelope_examples():
    assert lower_convex_envelope([(0, 3), (1, 1), (2, 0)])(1) == 1
    env = lower_convex_envelope([(0, 4), (1, 3), (2, 0)])
    assert env(1) == 2 == _brute_envelope([(0, 4), (1, 3), (2, 0)], 1)
    # (8,5,2) at t=1: (8·2 + 5·1) / 3
    pts = [(0, 15), (1, 7), (2, Fraction(8, 3)), (3, 0)]
    assert lower_convex_envelope(pts)(1) == 7 == _brute_envelope(pts, 1)


def test_envelope_rejects():
    env = lower_convex_envelope([(0, 1), (2, 0)])
    with pytest.raises(ValueError):
        env(3)
    with pytest.raises(ValueError):
        env(Fraction(-1, 2))
    with pytest.raises(ValueError):
        lower_convex_envelope([(0, 1)])
    with pytest.raises(ValueError):
        lower_convex_envelope([(0, 1), (0, 2)])


point_sets = st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=7), min_size=2, max_size=7)


@given(point_sets, st.integers(0, 60))
def test_envelope_matches_chord_oracle(values, step):
    pts = list(enumerate(values))
    t = Fraction(step, 10)
    if t > len(pts) - 1:
        t = Fraction(len(pts) - 1)
    assert lower_convex_envelope(pts)(t) == _brute_envelope(pts, t)


@given(point_sets)
def test_envelope_is_convex_and_below_points(values):
    env = lower_convex_envelope(enumerate(values))
    slopes = env.slopes()
    assert all(a <= b for a, b in zip(slopes, slopes[1:]))
    for t, v in enumerate(values):
        assert env(t) <= v
    for vertex in env.vertices:
        assert isinstance(vertex, EnvelopePoint)
        assert values[vertex.t] == vertex.value


@given(st.fractions(max_denominator=1000), st.fractions(max_denominator=1000))
def test_rational_roundtrip(a, b):
    assert (a + b) - b == a
    assert parse_rational(format_rational(a)) == a
