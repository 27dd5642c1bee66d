"""uint64-lane arithmetic for exact 128-bit words in numpy arrays.

A raw word w with 0 <= w < 2**128 is split as w = hi * 2**64 + lo and held
in two uint64 arrays.  Multiplication by a small integer runs over 32-bit
limbs so every partial product fits uint64; addition propagates one carry.
Everything here is exact; only the float conversions round, and they use
the same two-step formula as unitfrac.raw_to_float so scalar and vector
paths produce bit-identical floats.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
MASK128 = (1 << 128) - 1

_U0 = np.uint64(0)
_U32 = np.uint64(32)
_M32 = np.uint64(0xFFFFFFFF)
_HI_HALF = np.uint64(1 << 63)

_INV64 = 2.0 ** -64
_INV128 = 2.0 ** -128


def split_raw(raw: int):
    return np.uint64(raw >> 64), np.uint64(raw & MASK64)


def mul_block(raw: int, n0: int, count: int):
    """Lanes of (n * raw) mod 2**128 for n = n0, ..., n0 + count - 1.

    The block is formed as base + j*raw with base = (n0*raw) mod 2**128
    computed in exact Python ints, so n0 may be any integer (negative
    included); only the offset j has to fit the 32-bit limb multiplier.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    if count >= (1 << 32):
        raise ValueError("block too long for 32-bit limb multiply")
    j = np.arange(count, dtype=np.uint64)
    l0 = np.uint64(raw & 0xFFFFFFFF)
    l1 = np.uint64((raw >> 32) & 0xFFFFFFFF)
    l2 = np.uint64((raw >> 64) & 0xFFFFFFFF)
    l3 = np.uint64((raw >> 96) & 0xFFFFFFFF)
    # j * limb <= (2**32 - 1)**2 < 2**64, carry < 2**32: no uint64 overflow
    t = j * l0
    s0 = t & _M32
    c = t >> _U32
    t = j * l1 + c
    s1 = t & _M32
    c = t >> _U32
    t = j * l2 + c
    s2 = t & _M32
    c = t >> _U32
    t = j * l3 + c
    s3 = t & _M32
    lo = s0 | (s1 << _U32)
    hi = s2 | (s3 << _U32)
    base = (n0 * raw) & MASK128
    if base:
        bhi, blo = split_raw(base)
        lo2 = lo + blo
        carry = (lo2 < blo).astype(np.uint64)
        hi = hi + bhi + carry
        lo = lo2
    return hi, lo


def add_lanes(hi1, lo1, hi2, lo2):
    """Elementwise (a + b) mod 2**128 on lane pairs (broadcasting ok)."""
    lo = lo1 + lo2
    carry = (lo < lo2).astype(np.uint64)
    hi = hi1 + hi2 + carry
    return hi, lo


def lanes_to_float(hi, lo):
    """Canonical float map, bit-identical to unitfrac.raw_to_float."""
    return hi.astype(np.float64) * _INV64 + lo.astype(np.float64) * _INV128


def residue_lanes(hi, lo):
    """Signed residues in [-1/2, 1/2] with the tie at 1/2 kept positive.

    Returns (res, wrapped): res[i] = sign * raw_to_float(|num|) where num is
    the exact signed numerator, wrapped[i] is True where the nearest integer
    is floor + 1 (i.e. the residue is negative).
    """
    neg = (hi > _HI_HALF) | ((hi == _HI_HALF) & (lo > _U0))
    borrow = (lo != _U0).astype(np.uint64)
    chi = np.where(neg, _U0 - hi - borrow, hi)
    clo = np.where(neg, _U0 - lo, lo)
    mag = lanes_to_float(chi, clo)
    return np.where(neg, -mag, mag), neg


def dist_lanes(hi, lo):
    """||raw/2**128|| as floats: raw_to_float(min(raw, 2**128 - raw))."""
    neg = (hi > _HI_HALF) | ((hi == _HI_HALF) & (lo > _U0))
    borrow = (lo != _U0).astype(np.uint64)
    chi = np.where(neg, _U0 - hi - borrow, hi)
    clo = np.where(neg, _U0 - lo, lo)
    return lanes_to_float(chi, clo)


def count_below(hi, lo, threshold: int) -> int:
    """Number of lane words < threshold (threshold any int in [0, 2**128])."""
    if threshold <= 0:
        return 0
    if threshold >= (1 << 128):
        return int(hi.shape[0])
    thi, tlo = split_raw(threshold)
    return int(np.count_nonzero((hi < thi) | ((hi == thi) & (lo < tlo))))


def sort_lanes(hi, lo):
    """Lane pair sorted ascending by the 128-bit word value."""
    idx = np.lexsort((lo, hi))
    return hi[idx], lo[idx]
