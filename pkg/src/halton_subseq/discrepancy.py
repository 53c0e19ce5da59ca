"""Exact counting, exact star discrepancy (s <= 3) and local cell discrepancy.

Star discrepancy is the supremum over anchored boxes ``[0, w)``.  For each
axis the only relevant ``w`` are the point coordinates and 1.  At a grid
corner ``w`` two one-sided quantities are evaluated:

* ``vol(w) - #{x < w}/N`` -- attained at ``w`` itself (open side);
* ``#{x <= w}/N - vol(w)`` -- the limit as ``w`` is approached from above
  (closed side).

Coordinates are rescaled to integers over a common denominator per axis so
the sweep runs in integer arithmetic; a numba kernel is used whenever the
largest intermediate fits in int64, a pure-Python one (unbounded ints)
otherwise.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .halton import BaseTuple, PointSet
from .real_arith import (
    PrecisionExhausted,
    RealSpec,
    frac_bracket_int,
    max_digits,
    reciprocal,
    scale,
)

__all__ = [
    "DimensionMismatch",
    "WorkBudgetExceeded",
    "IntervalBox",
    "DiscrepancyResult",
    "DEFAULT_WORK_BUDGET",
    "count_in_box",
    "count_anchored",
    "local_discrepancy",
    "star_discrepancy_1d",
    "star_discrepancy_exact",
    "extreme_from_star",
    "cell_counts",
    "local_delta",
]

DEFAULT_WORK_BUDGET = 10**9
_INT64_SAFE = 2**62


class DimensionMismatch(ValueError):
    pass


class WorkBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class IntervalBox:
    """Product of half-open intervals ``[lower_i, upper_i)``.

    ``lower_i == upper_i`` is allowed so that a closed-side witness at the
    origin (the limit ``w -> 0+``) is representable.
    """

    lower: tuple[Fraction, ...]
    upper: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise DimensionMismatch("lower/upper dimension differ")
        for u, w in zip(self.lower, self.upper):
            if not 0 <= u <= w <= 1:
                raise ValueError(f"invalid interval [{u}, {w})")

    @classmethod
    def anchored(cls, upper: Sequence) -> "IntervalBox":
        up = tuple(Fraction(w) for w in upper)
        return cls(tuple(Fraction(0) for _ in up), up)

    @property
    def s(self) -> int:
        return len(self.upper)

    def volume(self) -> Fraction:
        return math.prod((w - u for u, w in zip(self.lower, self.upper)), start=Fraction(1))

    def to_text(self, closed: bool = False) -> str:
        right = "]" if closed else ")"
        return "x".join(f"[{u},{w}{right}" for u, w in zip(self.lower, self.upper))


@dataclass(frozen=True)
class DiscrepancyResult:
    """``value`` is attained by the anchored box ``witness``.

    ``closed`` marks the limit from above (count points with ``x <= w``).
    """

    value: Fraction
    witness: IntervalBox
    N: int
    closed: bool = False

    def witness_text(self) -> str:
        return self.witness.to_text(self.closed)


def count_in_box(ps: PointSet, J: IntervalBox, closed: bool = False) -> int:
    """A_N(J); ``closed`` makes the upper faces inclusive."""
    if ps.N == 0:
        return 0
    if ps.s != J.s:
        raise DimensionMismatch(f"point dimension {ps.s} != box dimension {J.s}")
    lo, up = J.lower, J.upper
    if closed:
        return sum(all(l <= c <= w for c, l, w in zip(p, lo, up)) for p in ps.points)
    return sum(all(l <= c < w for c, l, w in zip(p, lo, up)) for p in ps.points)


def count_anchored(ps: PointSet, w: Sequence, closed: bool = False) -> int:
    return count_in_box(ps, IntervalBox.anchored(w), closed)


def local_discrepancy(ps: PointSet, w: Sequence, closed: bool = False) -> Fraction:
    """|A(w)/N - vol(w)| for the anchored box (closed = limit from above)."""
    box = IntervalBox.anchored(w)
    return abs(Fraction(count_in_box(ps, box, closed), ps.N) - box.volume())


def extreme_from_star(star: DiscrepancyResult | Fraction, s: int) -> tuple[Fraction, Fraction]:
    """Bounds D* <= D <= 2^s D* on the extreme discrepancy."""
    v = star.value if isinstance(star, DiscrepancyResult) else Fraction(star)
    return v, 2**s * v


# ---------------------------------------------------------------------------
# 1D closed formula


def star_discrepancy_1d(ps: PointSet) -> DiscrepancyResult:
    """D* = 1/(2N) + max_i |x_(i) - (2i-1)/(2N)| over the sorted sample."""
    if ps.s != 1:
        raise DimensionMismatch("one-dimensional point set expected")
    N = ps.N
    if N < 1:
        raise ValueError("empty point set")
    xs = sorted(p[0] for p in ps.points)
    D = math.lcm(*{x.denominator for x in xs})
    X = np.array([x.numerator * (D // x.denominator) for x in xs], dtype=object)
    if 2 * N * D < _INT64_SAFE:
        X = X.astype(np.int64)
    i = np.arange(1, N + 1, dtype=X.dtype)
    # over the common denominator 2*N*D:
    #   open side  x_(i) - (i-1)/N  ->  2N X - 2(i-1) D
    #   closed side i/N - x_(i)     ->  2 i D - 2N X
    open_side = 2 * N * X - 2 * (i - 1) * D
    closed_side = 2 * i * D - 2 * N * X
    ko, kc = int(np.argmax(open_side)), int(np.argmax(closed_side))
    vo, vc = int(open_side[ko]), int(closed_side[kc])
    if vo >= vc:
        best, w, closed = vo, xs[ko], False
    else:
        best, w, closed = vc, xs[kc], True
    if best <= 0:
        # only possible without any excess; the full box gives zero
        return DiscrepancyResult(Fraction(0), IntervalBox.anchored([1]), N, False)
    return DiscrepancyResult(Fraction(best, 2 * N * D), IntervalBox.anchored([w]), N, closed)


# ---------------------------------------------------------------------------
# grid sweeps (plain Python bodies, jitted below when numba is available)


def _sweep1(rx, gx, N, scale1):
    best, bi, bc = -1, 0, 0
    npts = len(rx)
    p = 0
    cum = 0
    for i in range(len(gx)):
        v = gx[i] * N - cum * scale1
        if v > best:
            best, bi, bc = v, i, 0
        while p < npts and rx[p] == i:
            cum += 1
            p += 1
        v = cum * scale1 - gx[i] * N
        if v > best:
            best, bi, bc = v, i, 1
    return best, bi, 0, 0, bc


def _sweep2(rx, ry, gx, gy, N, scale2, hist):
    best, bi, br, bc = -1, 0, 0, 0
    npts = len(rx)
    m2 = len(gy)
    p = 0
    for i in range(len(gx)):
        wx = gx[i] * N
        cum = 0
        for r in range(m2):
            v = wx * gy[r] - cum * scale2
            if v > best:
                best, bi, br, bc = v, i, r, 0
            cum += hist[r]
        while p < npts and rx[p] == i:
            hist[ry[p]] += 1
            p += 1
        cum = 0
        for r in range(m2):
            cum += hist[r]
            v = cum * scale2 - wx * gy[r]
            if v > best:
                best, bi, br, bc = v, i, r, 1
    return best, bi, br, 0, bc


def _sweep3(rx, ry, rz, gx, gy, gz, N, scale3, hist):
    # points are sorted by ry
    best, bi, bj, bk, bc = -1, 0, 0, 0, 0
    npts = len(rx)
    m2, m3 = len(gy), len(gz)
    for i in range(len(gx)):
        for closed in range(2):
            for k in range(m3):
                hist[k] = 0
            p = 0
            for j in range(m2):
                wxy = gx[i] * gy[j] * N
                if closed == 1:
                    while p < npts and ry[p] == j:
                        if rx[p] <= i:
                            hist[rz[p]] += 1
                        p += 1
                cum = 0
                for k in range(m3):
                    if closed == 1:
                        cum += hist[k]
                        v = cum * scale3 - wxy * gz[k]
                    else:
                        v = wxy * gz[k] - cum * scale3
                        cum += hist[k]
                    if v > best:
                        best, bi, bj, bk, bc = v, i, j, k, closed
                if closed == 0:
                    while p < npts and ry[p] == j:
                        if rx[p] < i:
                            hist[rz[p]] += 1
                        p += 1
    return best, bi, bj, bk, bc


try:  # pragma: no cover - exercised implicitly
    import numba

    _jit = numba.njit(cache=True, nogil=True)
    _sweep1_nb = _jit(_sweep1)
    _sweep2_nb = _jit(_sweep2)
    _sweep3_nb = _jit(_sweep3)
except ImportError:  # pragma: no cover
    _sweep1_nb = _sweep2_nb = _sweep3_nb = None


def _axis_grid(values: Sequence[Fraction]):
    """Common denominator, sorted grid numerators (ending in D), rank map."""
    D = math.lcm(*{v.denominator for v in values}) if values else 1
    nums = sorted({v.numerator * (D // v.denominator) for v in values} | {D})
    rank = {n: i for i, n in enumerate(nums)}
    ranks = [rank[v.numerator * (D // v.denominator)] for v in values]
    return D, nums, ranks


def star_discrepancy_exact(
    ps: PointSet,
    work_budget: int = DEFAULT_WORK_BUDGET,
    use_numba: bool | None = None,
) -> DiscrepancyResult:
    """Exact D* for s in {1, 2, 3} by sweeping the critical grid."""
    s, N = ps.s, ps.N
    if N < 1:
        raise ValueError("empty point set")
    if s not in (1, 2, 3):
        raise DimensionMismatch(f"exact star discrepancy supports s <= 3, got {s}")
    axes = [_axis_grid([p[a] for p in ps.points]) for a in range(s)]
    work = math.prod(len(g) for _, g, _ in axes) * (2 if s == 3 else 1)
    if work > work_budget:
        raise WorkBudgetExceeded(f"{work} grid evaluations exceed budget {work_budget}")
    dens = [D for D, _, _ in axes]
    big = N * math.prod(dens)
    if use_numba is None:
        use_numba = _sweep2_nb is not None and big < _INT64_SAFE
    elif use_numba and big >= _INT64_SAFE:
        raise OverflowError("grid numerators exceed int64")
    scale_all = math.prod(dens)

    if s == 1:
        (D1, g1, r1), = axes
        order = sorted(range(N), key=lambda t: r1[t])
        rx = [r1[t] for t in order]
        if use_numba:
            res = _sweep1_nb(np.array(rx, np.int64), np.array(g1, np.int64), N, D1)
        else:
            res = _sweep1(rx, g1, N, D1)
        best, i, _, _, closed = (int(v) for v in res)
        value = Fraction(best, N * D1)
        w = (Fraction(g1[i], D1),)
    elif s == 2:
        (D1, g1, r1), (D2, g2, r2) = axes
        order = sorted(range(N), key=lambda t: r1[t])
        rx = [r1[t] for t in order]
        ry = [r2[t] for t in order]
        if use_numba:
            res = _sweep2_nb(
                np.array(rx, np.int64), np.array(ry, np.int64),
                np.array(g1, np.int64), np.array(g2, np.int64),
                N, scale_all, np.zeros(len(g2), np.int64),
            )
        else:
            res = _sweep2(rx, ry, g1, g2, N, scale_all, [0] * len(g2))
        best, i, r, _, closed = (int(v) for v in res)
        value = Fraction(best, N * scale_all)
        w = (Fraction(g1[i], D1), Fraction(g2[r], D2))
    else:
        (D1, g1, r1), (D2, g2, r2), (D3, g3, r3) = axes
        order = sorted(range(N), key=lambda t: r2[t])
        rx, ry, rz = ([r[t] for t in order] for r in (r1, r2, r3))
        if use_numba:
            res = _sweep3_nb(
                np.array(rx, np.int64), np.array(ry, np.int64), np.array(rz, np.int64),
                np.array(g1, np.int64), np.array(g2, np.int64), np.array(g3, np.int64),
                N, scale_all, np.zeros(len(g3), np.int64),
            )
        else:
            res = _sweep3(rx, ry, rz, g1, g2, g3, N, scale_all, [0] * len(g3))
        best, i, j, k, closed = (int(v) for v in res)
        value = Fraction(best, N * scale_all)
        w = (Fraction(g1[i], D1), Fraction(g2[j], D2), Fraction(g3[k], D3))
    return DiscrepancyResult(value, IntervalBox.anchored(w), N, bool(closed))


# ---------------------------------------------------------------------------
# local cell discrepancy of the scaled Kronecker sequence


def cell_counts(N: int, alpha: RealSpec, B: int, cap: int | None = None) -> Counter:
    """Counts of n < N per cell R with {n/(alpha B)} in [R/B, (R+1)/B).

    Each fractional part comes from a certified bracket that lies inside a
    single cell; the bracket is tightened per n when it does not.
    """
    x = reciprocal(scale(alpha, B))
    cap = max_digits(cap)
    base = 30 + len(str(N)) + len(str(B))
    counts: Counter = Counter()
    for n in range(N):
        digits = base
        while True:
            got = frac_bracket_int(x, n, digits, B)
            if got is not None:
                lo, _, Q = got
                counts[(B * lo) // Q] += 1
                break
            if digits >= cap:
                raise PrecisionExhausted(f"cell of n={n} for B={B} not certified")
            digits = min(2 * digits, cap)
    return counts


def local_delta(
    N: int, alpha: RealSpec, j: Sequence[int], bases, cap: int | None = None
) -> Fraction:
    """N * Delta^(j): max over cells R of |A_N(cell R) - N/B|, B = prod b_i^j_i."""
    bt = BaseTuple.of(bases)
    if len(j) != bt.s:
        raise DimensionMismatch("j-tuple length differs from number of bases")
    if any(ji < 0 for ji in j):
        raise ValueError("j entries must be non-negative")
    B = math.prod(b**ji for b, ji in zip(bt.bases, j))
    if B == 1 or N == 0:
        return Fraction(0)
    counts = cell_counts(N, alpha, B, cap)
    mean = Fraction(N, B)
    worst = max(abs(c - mean) for c in counts.values())
    if len(counts) < B:
        worst = max(worst, mean)
    return worst
