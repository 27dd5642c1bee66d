"""Point-set generation, exact interval counts, dump round-trips."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from equidist import (
    BudgetError,
    PointSet,
    WindowShift,
    alpha_from_values,
    count_in_interval,
    dump_sorted,
    frac_mul_int,
    generate_points,
    load_dump,
    random_alpha,
)
from equidist.lattice import count_in_interval_streaming, iter_point_lanes, strict_window
from equidist.unitfrac import MOD


def point_set_from_raws(raws):
    r = [int(x) for x in raws]
    hi = np.array([x >> 64 for x in r], dtype=np.uint64)
    lo = np.array([x & 0xFFFFFFFFFFFFFFFF for x in r], dtype=np.uint64)
    return PointSet(hi=hi, lo=lo, dim=1)


# {k1*g + k2*s} for k in {1,2}^2, g, s the golden/sqrt2 literals; sorted
# raw words, frozen from exact integer arithmetic mod 2**128
D2_N2_RAWS = [
    10973273023534969329054699975726024050,
    21946546047069938658109399951452048100,
    151922844438605528955747637499207926448,
    221279341552937842494791069859738357158,
]


def test_d2_n2_points_frozen(golden_sqrt2):
    pts = generate_points(golden_sqrt2, 2)
    assert pts.cardinality == 4
    assert sorted(pts.raws()) == D2_N2_RAWS


def test_points_match_exact_orbit(golden_sqrt2):
    g, s = golden_sqrt2.components
    pts = generate_points(golden_sqrt2, 3)
    want = [(k1 * g.raw + k2 * s.raw) % MOD
            for k1 in range(1, 4) for k2 in range(1, 4)]
    # k1-major lexicographic generation order
    assert pts.raws() == want


def test_count_interval_basic():
    pts = point_set_from_raws([int(0.95 * MOD), int(0.05 * MOD), MOD // 2])
    assert count_in_interval(pts, 0.0, 0.5) == 1
    assert count_in_interval(pts, 0.5, 1.0) == 2
    assert count_in_interval(pts, 0.9, 0.1) == 2      # wraps across 0
    assert count_in_interval(pts, 0.5, 0.5) == 0
    assert count_in_interval(pts, 0.0, 1.0) == 3


def test_count_interval_boundary_is_half_open():
    pts = point_set_from_raws([MOD // 4])
    assert count_in_interval(pts, 0.25, 0.5) == 1
    assert count_in_interval(pts, 0.0, 0.25) == 0


def test_count_interval_rejects_long_arcs():
    pts = point_set_from_raws([0])
    with pytest.raises(ValueError):
        count_in_interval(pts, 0.0, 2.5)


@given(st.integers(0, 2 ** 32), st.integers(1, 2), st.integers(1, 40),
       st.fractions(min_value=0, max_value=1, max_denominator=10 ** 6))
@settings(max_examples=60, deadline=None)
def test_partition_invariant(seed, d, N, t):
    alpha = random_alpha(seed, d)
    pts = generate_points(alpha, N)
    lowside = count_in_interval(pts, 0, t)
    highside = count_in_interval(pts, t, 1)
    assert lowside + highside == pts.cardinality


@given(st.integers(0, 2 ** 32),
       st.fractions(min_value=0, max_value=Fraction(999, 1000), max_denominator=10 ** 6),
       st.fractions(min_value=0, max_value=Fraction(999, 1000), max_denominator=10 ** 6))
@settings(max_examples=60, deadline=None)
def test_wrap_complements_plain(seed, a, b):
    # [a, b) and [b, a) tile the circle, except [a, a) which is empty twice
    pts = generate_points(random_alpha(seed, 1), 25)
    want = 0 if a == b else pts.cardinality
    assert count_in_interval(pts, a, b) + count_in_interval(pts, b, a) == want


def test_budget_enforced():
    alpha = random_alpha(0, 2)
    with pytest.raises(BudgetError):
        generate_points(alpha, 1 << 14)
    # explicit budget overrides the default
    with pytest.raises(BudgetError):
        generate_points(alpha, 4, budget=15)
    assert generate_points(alpha, 4, budget=16).cardinality == 16


def test_strict_window_endpoints():
    assert list(strict_window(5, 0.0)) == [1, 2, 3, 4]
    assert list(strict_window(5, -0.5)) == [0, 1, 2, 3, 4]
    assert list(strict_window(5, 1.0)) == [2, 3, 4, 5]
    assert list(strict_window(5, 1.5)) == [2, 3, 4, 5, 6]


def test_shift_validation(golden1):
    with pytest.raises(ValueError):
        generate_points(golden1, 5, WindowShift(0.0, (3.0,)))
    with pytest.raises(ValueError):
        generate_points(golden1, 5, WindowShift(0.5, (0.0,)))   # u1 beyond 2/N^2
    with pytest.raises(ValueError):
        generate_points(golden1, 5, WindowShift(0.0, (0.0, 0.0)))


def test_shifted_window_cardinality(golden1):
    # 1 < k < 6 keeps 4 integers; 1.5 < k < 6.5 keeps 5
    assert generate_points(golden1, 5, WindowShift(0.0, (1.0,))).cardinality == 4
    assert generate_points(golden1, 5, WindowShift(0.0, (1.5,))).cardinality == 5
    shifted = generate_points(golden1, 5, WindowShift(0.0, (1.5,)))
    g = golden1.components[0]
    assert shifted.raws() == [frac_mul_int(g, k).raw for k in range(2, 7)]


@given(st.integers(0, 2 ** 32), st.integers(1, 2), st.integers(1, 30))
@settings(max_examples=40, deadline=None)
def test_streaming_matches_materialized(seed, d, N):
    alpha = random_alpha(seed, d)
    pts = generate_points(alpha, N)
    got = np.concatenate([
        (h.astype(object) * (1 << 64)) + l.astype(object)
        for h, l in iter_point_lanes(alpha, N, max_block=7 if d == 1 else 64)
    ])
    assert list(got) == pts.raws()
    assert count_in_interval_streaming(alpha, N, 0.2, 0.7) \
        == count_in_interval(pts, 0.2, 0.7)


def test_dump_roundtrip(tmp_path, golden_sqrt2):
    pts = generate_points(golden_sqrt2, 2)
    path = tmp_path / "points.bin"
    dump_sorted(pts, path)
    assert path.stat().st_size == 4 * 16
    assert load_dump(path) == D2_N2_RAWS
