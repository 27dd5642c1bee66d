"""Frequency-side series: terms, index filters, component sums."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from equidist import (
    FourierParams,
    all_masks,
    alpha_from_specs,
    averaged_discrepancy_direct,
    component_sum,
    f_term,
    fejer,
    index_set_membership,
    random_alpha,
    recombine,
    series_coefficient,
)
from equidist.fourier import (
    default_s_exponent,
    fourier_tail_bound,
    g_factor,
    lambda_form,
    product_threshold,
    u1_limit,
    u4_limit,
)

# mpmath reference values at 50 digits for the scalar term, covering both
# dimensions, a negative n1, a non-nearest n2, and the r = 0 limit
F_TERM_CASES = [
    ((3, 2), 0.3, ("golden",), 8,
     -0.025533359388278387 - 0.005470693763265393j),
    ((3, 1), 0.3, ("golden",), 8,
     0.0001272703123815417 + 2.7268519336087424e-05j),
    ((-7, -4), 0.7, ("golden",), 32,
     0.00031307581350388606 - 0.0025026864545120986j),
    ((5, 3, 2), 0.7, ("golden", "sqrt2"), 16,
     0.3345003965829555 - 0.08566569201653984j),
    ((2, 1, 1), 0.3, ("golden", "sqrt2"), 8,
     0.03434537083075176 + 0.009284491604043432j),
    ((4, 1), 0.3, ("quarter",), 8,
     0.287485538186589 + 0.20887046967906606j),
]

# frozen pair for the two evaluation paths at d=1, x=0.3, N=8
SWEEP_G1_X03_N8 = -0.13874582183519601
FOURIER_G1_X03_N8 = -0.13875465996360656 + 2.4646846835067043e-07j
FOURIER_G1_TAIL = 0.003679874096464893
FOURIER_G1_TERMS = 17664


def _lookup(tokens, golden1, golden_sqrt2):
    table = {
        ("golden",): golden1,
        ("golden", "sqrt2"): golden_sqrt2,
        ("quarter",): alpha_from_specs(["0.25"]),
    }
    return table[tokens]


def test_series_coefficient_values():
    assert series_coefficient(1) == 1
    assert series_coefficient(2) == -1j
    assert series_coefficient(3) == -1
    assert abs(series_coefficient(1)) == 1


def test_fejer_values():
    assert fejer(0.0) == 1.0
    assert fejer(0.5) == pytest.approx(0.0, abs=1e-30)
    assert fejer(0.25) == pytest.approx((2 / math.pi) ** 2, rel=1e-15)
    assert fejer(-0.25) == fejer(0.25)


def test_f_term_frozen(golden1, golden_sqrt2):
    for n, x, tokens, N, want in F_TERM_CASES:
        alpha = _lookup(tokens, golden1, golden_sqrt2)
        got = f_term(n, x, alpha, N)
        assert got == pytest.approx(want, rel=1e-12), (n, x, tokens, N)


def test_f_term_degenerate_inputs(golden1):
    assert f_term((0, 5), 0.3, golden1, 8) == 0j
    with pytest.raises(ValueError):
        f_term((0, 0), 0.3, golden1, 8)
    with pytest.raises(ValueError):
        f_term((3, 2, 1), 0.3, golden1, 8)
    with pytest.raises(ValueError):
        f_term((3, 2), 0.3, golden1, 1)     # needs ln N > 0


def test_g_factor_bounds(golden1, golden_sqrt2):
    for alpha in (golden1, golden_sqrt2):
        for n1 in (1, 2, 3, 17, -9):
            n = (n1,) + tuple(0 for _ in range(alpha.dim))
            g = g_factor(n, alpha, 16)
            assert 0.0 <= g <= 1.0


def test_limits_monotone():
    assert default_s_exponent(1) == 7
    assert default_s_exponent(2) == 12
    for N in (4, 16, 64, 256):
        assert u4_limit(N) <= u1_limit(N)
        assert u4_limit(N) == (N * N - 1) // 4    # strictly below N^2/4
    # threshold is an exact rational of the float ln N
    t = product_threshold(64, 7)
    assert t > 0 and t.denominator >= 1


def test_index_sets_nest_small(golden1):
    N = 16
    params = FourierParams()
    for n1 in range(-u1_limit(N) - 2, u1_limit(N) + 3):
        for off in (-1, 0, 1):
            base = round(n1 * golden1.components[0].value) if n1 else 0
            n = (n1, base + off)
            flags = [index_set_membership(w, n, golden1, N, params)
                     for w in ("u1", "u2", "u3", "u4")]
            assert flags[3] <= flags[2] <= flags[1] <= flags[0]


def test_membership_matches_definitions(golden1):
    N = 16
    # u1 is a pure n1 window
    assert index_set_membership("u1", (u1_limit(N), 0), golden1, N)
    assert not index_set_membership("u1", (u1_limit(N) + 1, 0), golden1, N)
    assert not index_set_membership("u1", (0, 3), golden1, N)
    # u2 pins the nearest integer
    n1 = 5
    nearest = round(n1 * golden1.components[0].value)
    assert index_set_membership("u2", (n1, nearest), golden1, N)
    assert not index_set_membership("u2", (n1, nearest + 1), golden1, N)
    with pytest.raises(ValueError):
        index_set_membership("u9", (1, 1), golden1, N)


def test_dual_paths_agree_frozen(golden1):
    sweep = averaged_discrepancy_direct(golden1, 0.3, 8)
    assert sweep.value == SWEEP_G1_X03_N8
    rep = component_sum("dbar", golden1, 0.3, 8)
    assert rep.value == FOURIER_G1_X03_N8
    assert rep.term_count == FOURIER_G1_TERMS
    assert rep.tail_bound == pytest.approx(FOURIER_G1_TAIL, rel=1e-12)
    assert abs(rep.value.real - sweep.value) <= rep.tail_bound + 1e-6
    assert abs(rep.value.imag) <= 1e-6


def test_component_guards(golden1):
    with pytest.raises(ValueError):
        component_sum("dbar9", golden1, 0.3, 16)
    with pytest.raises(ValueError):
        component_sum("dbar6", golden1, 0.3, 16)            # mask required
    with pytest.raises(ValueError):
        component_sum("dbar6", golden1, 0.3, 16, mask=(0, 0))
    with pytest.raises(ValueError):
        component_sum("dbar6", golden1, 0.3, 16, mask=(1, 1, 1))
    with pytest.raises(ValueError):
        FourierParams(s_exponent=2).resolve_s(1)            # below the s floor


def test_all_masks_shape():
    masks = all_masks(2)
    assert len(masks) == 7
    assert all(len(m) == 3 and any(m) for m in masks)
    assert len(set(masks)) == 7


def test_truncations_shrink(golden1):
    N = 32
    full = component_sum("dbar", golden1, 0.3, N)
    u1 = component_sum("dbar1", golden1, 0.3, N)
    u2 = component_sum("dbar2", golden1, 0.3, N)
    assert u1.term_count <= full.term_count
    assert u2.term_count <= u1.term_count
    # truncation to U1 changes the value by roughly the dropped tail
    assert abs(full.value - u1.value) <= full.tail_bound + u1.tail_bound


def test_recombination_identity_small(golden1):
    N = 1 << 6
    rep4 = component_sum("dbar4", golden1, 0.3, N)
    rep5 = component_sum("dbar5", golden1, 0.3, N)
    by_mask = {m: component_sum("dbar6", golden1, 0.3, N, mask=m).value
               for m in all_masks(1)}
    rebuilt = recombine(rep5.value, by_mask, 1)
    gap = abs(rep4.value - rebuilt)
    if abs(rep4.value) > 0:
        assert gap / abs(rep4.value) <= 1e-9
    else:
        assert gap == 0.0


@given(st.integers(0, 2 ** 32))
@settings(max_examples=10, deadline=None)
def test_recombination_identity_seeded(seed):
    alpha = random_alpha(seed, 1)
    N = 1 << 6
    rep4 = component_sum("dbar4", alpha, 0.3, N)
    rep5 = component_sum("dbar5", alpha, 0.3, N)
    by_mask = {m: component_sum("dbar6", alpha, 0.3, N, mask=m).value
               for m in all_masks(1)}
    rebuilt = recombine(rep5.value, by_mask, 1)
    gap = abs(rep4.value - rebuilt)
    scale = abs(rep4.value)
    assert gap <= max(scale, 1e-12) * 1e-9 + (0.0 if scale else 1e-15)


def test_lambda_form_is_phase(golden1):
    v = lambda_form((3, 2), 0.3, golden1, 8, (1, 1))
    assert isinstance(v, float)
    w = lambda_form((3, 2), 0.3, golden1, 8, (1, 0))
    assert v != w


def test_tail_bound_decreases_with_cutoff():
    d = 1
    b1 = fourier_tail_bound(32, d, 10 ** 4, 32)
    b2 = fourier_tail_bound(32, d, 10 ** 5, 32)
    assert b2 < b1
    assert FourierParams().resolve_cutoff(32) == u1_limit(32)
    assert FourierParams(cutoff_n1=500).resolve_cutoff(32) == 500
