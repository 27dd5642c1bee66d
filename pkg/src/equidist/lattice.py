"""Generation and interval counting for linear-form point sets.

The points are the values {k_1 a_1 + ... + k_d a_d} mod 1 with each k_i
running over an integer window.  Unshifted windows are 1 <= k_i <= N.  A
WindowShift moves window i to the open interval (u_i, N + u_i); membership
is decided purely by the strict inequalities, with no special case at
integer shifts.  All points are exact 128-bit words; interval counts
compare raw words against exact thresholds, so a count is never off by a
point sitting on a float boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _lanes
from .errors import BudgetError
from .unitfrac import MOD, UnitFrac, AlphaVec

DEFAULT_POINT_BUDGET = 1 << 26


@dataclass(frozen=True, slots=True)
class WindowShift:
    """Shift of the counting geometry: u1 jitters the target interval
    (used by the averaging integral), u[i] jitters the i-th k-window."""

    u1: float
    u: tuple

    @property
    def dim(self) -> int:
        return len(self.u)


@dataclass(frozen=True)
class PointSet:
    """Multiset of exact points in generation (lexicographic) order."""

    hi: np.ndarray
    lo: np.ndarray
    dim: int
    windows: tuple = field(default_factory=tuple)

    @property
    def cardinality(self) -> int:
        return int(self.hi.shape[0])

    def raws(self) -> list:
        return [(int(h) << 64) | int(l) for h, l in zip(self.hi, self.lo)]

    def values(self) -> list:
        return [UnitFrac(r) for r in self.raws()]

    def sorted_lanes(self):
        return _lanes.sort_lanes(self.hi, self.lo)


def strict_window(N: int, u: float) -> range:
    """Integers k with u < k < N + u, both inequalities strict."""
    start = math.floor(u) + 1
    stop = math.ceil(N + u)
    return range(start, max(start, stop))


def _validate_shift(shift: WindowShift, alpha: AlphaVec, N: int):
    if shift.dim != alpha.dim:
        raise ValueError(f"shift has {shift.dim} window offsets, alpha has dim {alpha.dim}")
    lim = 2.0 / (N * N)
    if not -lim <= shift.u1 <= lim:
        raise ValueError(f"u1 out of range [-2/N^2, 2/N^2]: {shift.u1}")
    for ui in shift.u:
        if not -2.0 <= ui <= 2.0:
            raise ValueError(f"window shift out of range [-2, 2]: {ui}")


def _resolve_windows(alpha: AlphaVec, N: int, shift: WindowShift | None) -> tuple:
    if N < 1:
        raise ValueError("N must be >= 1")
    if shift is None:
        return tuple(range(1, N + 1) for _ in range(alpha.dim))
    _validate_shift(shift, alpha, N)
    return tuple(strict_window(N, ui) for ui in shift.u)


def _fold_axes(alpha: AlphaVec, windows: tuple):
    """Exact lanes for all window combinations, k_1-major lexicographic."""
    hi = None
    lo = None
    for comp, win in zip(alpha.components, windows):
        ahi, alo = _lanes.mul_block(comp.raw, win.start, len(win))
        if hi is None:
            hi, lo = ahi, alo
        else:
            hi, lo = _lanes.add_lanes(hi[:, None], lo[:, None], ahi[None, :], alo[None, :])
            hi = hi.reshape(-1)
            lo = lo.reshape(-1)
    return hi, lo


def generate_points(alpha: AlphaVec, N: int, shift: WindowShift | None = None,
                    budget: int = DEFAULT_POINT_BUDGET) -> PointSet:
    """Materialize the full point multiset (cardinality = product of window
    lengths).  Raises BudgetError beyond `budget` points."""
    windows = _resolve_windows(alpha, N, shift)
    m = 1
    for w in windows:
        m *= len(w)
    if m > budget:
        raise BudgetError(f"point set of {m} exceeds budget {budget}")
    if m == 0:
        empty = np.empty(0, dtype=np.uint64)
        return PointSet(hi=empty, lo=empty, dim=alpha.dim, windows=windows)
    hi, lo = _fold_axes(alpha, windows)
    return PointSet(hi=hi, lo=lo, dim=alpha.dim, windows=windows)


def iter_point_lanes(alpha: AlphaVec, N: int, shift: WindowShift | None = None,
                     max_block: int = 1 << 22):
    """Stream the same multiset as generate_points in lexicographic order,
    yielding (hi, lo) lane blocks, never holding more than max_block points.

    Blocks split along the leading window, so consumers can count without
    materializing; the tail lattice over the remaining axes must fit one
    block.
    """
    windows = _resolve_windows(alpha, N, shift)
    if any(len(w) == 0 for w in windows):
        return
    lead = windows[0]
    comp0 = alpha.components[0]
    if alpha.dim == 1:
        for s in range(0, len(lead), max_block):
            n = min(max_block, len(lead) - s)
            yield _lanes.mul_block(comp0.raw, lead.start + s, n)
        return
    tail = 1
    for w in windows[1:]:
        tail *= len(w)
    if tail > max_block:
        raise BudgetError(f"tail lattice of {tail} exceeds block size {max_block}")
    thi, tlo = _fold_axes(AlphaVec(alpha.components[1:]), windows[1:])
    group = max(1, max_block // tail)
    for s in range(0, len(lead), group):
        n = min(group, len(lead) - s)
        bhi, blo = _lanes.mul_block(comp0.raw, lead.start + s, n)
        hi, lo = _lanes.add_lanes(bhi[:, None], blo[:, None], thi[None, :], tlo[None, :])
        yield hi.reshape(-1), lo.reshape(-1)


def _arc_thresholds(a, b):
    """Exact raw-word thresholds for the mod-1 arc [a, b).

    Returns (mode, lo_threshold, hi_threshold): mode "all", "empty",
    "plain" (count raws in [A, B)) or "wrap" (count raws >= A plus < B).
    """
    fa = a if isinstance(a, Fraction) else Fraction(a)
    fb = b if isinstance(b, Fraction) else Fraction(b)
    diff = fb - fa
    if not -1 <= diff <= 1:
        raise ValueError(f"interval length {float(diff)} outside [-1, 1]")
    if diff >= 1:
        return "all", 0, 0
    if diff == 0:
        return "empty", 0, 0
    a1 = fa - math.floor(fa)
    b1 = fb - math.floor(fb)
    ta = math.ceil(a1 * MOD)
    tb = math.ceil(b1 * MOD)
    if a1 < b1:
        return "plain", ta, tb
    return "wrap", ta, tb


def _count_arc_lanes(hi, lo, mode, ta, tb) -> int:
    total = int(hi.shape[0])
    if mode == "all":
        return total
    if mode == "empty":
        return 0
    below_b = _lanes.count_below(hi, lo, tb)
    below_a = _lanes.count_below(hi, lo, ta)
    if mode == "plain":
        return below_b - below_a
    return (total - below_a) + below_b


def count_in_interval(points: PointSet, a, b) -> int:
    """Exact count of points in the interval [a, b) taken mod 1.

    Endpoints may be floats, Fractions or ints; they convert exactly, and
    each point is compared against the exact thresholds, left-closed and
    right-open.  b < a (or an interval straddling an integer) wraps.
    """
    mode, ta, tb = _arc_thresholds(a, b)
    return _count_arc_lanes(points.hi, points.lo, mode, ta, tb)


def count_in_interval_streaming(alpha: AlphaVec, N: int, a, b,
                                shift: WindowShift | None = None,
                                max_block: int = 1 << 22) -> int:
    """count_in_interval without materializing the point set."""
    mode, ta, tb = _arc_thresholds(a, b)
    total = 0
    for hi, lo in iter_point_lanes(alpha, N, shift, max_block=max_block):
        total += _count_arc_lanes(hi, lo, mode, ta, tb)
    return total


def dump_sorted(points: PointSet, path) -> None:
    """Write the sorted multiset as little-endian 128-bit words."""
    hi, lo = points.sorted_lanes()
    buf = np.empty((points.cardinality, 2), dtype="<u8")
    buf[:, 0] = lo
    buf[:, 1] = hi
    with open(path, "wb") as fh:
        fh.write(buf.tobytes())


def load_dump(path) -> list:
    """Raw words back from a dump_sorted file (for round-trip checks)."""
    data = np.fromfile(path, dtype="<u8").reshape(-1, 2)
    return [(int(h) << 64) | int(l) for l, h in data]
