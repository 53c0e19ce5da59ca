"""Bound chain for the subsequence: level exponents, residue reduction,
the decomposition into cell discrepancies, the partial-quotient bound on
each cell discrepancy, partial-quotient sums and growth-rate sweeps."""

from __future__ import annotations

import decimal
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .discrepancy import (
    DEFAULT_WORK_BUDGET,
    WorkBudgetExceeded,
    local_delta,
    star_discrepancy_exact,
)
from .halton import BaseTuple, subsequence_points
from .real_arith import (
    RealSpec,
    bracket,
    cf_expand,
    compare,
    reciprocal,
    scale,
)

__all__ = [
    "BoundReport",
    "GrowthSample",
    "GrowthSweep",
    "f_exponents",
    "log32_ceil",
    "elementary_residue",
    "crt_combine",
    "j_tuples",
    "prop1_rhs",
    "lemma1_rhs",
    "s_l_sum",
    "growth_sweep",
    "fit_slope",
]


@dataclass
class BoundReport:
    N: int
    alpha: str
    bases: tuple[int, ...]
    lhs: Fraction | None
    rhs: Fraction
    j: tuple[int, ...] | None = None
    components: dict = field(default_factory=dict)

    @property
    def satisfied(self) -> bool | None:
        if self.lhs is None:
            return None
        return self.lhs <= self.rhs


@dataclass(frozen=True)
class GrowthSample:
    N: int
    NDstar: Fraction
    logN: decimal.Decimal


@dataclass
class GrowthSweep:
    beta: str
    bases: tuple[int, ...]
    samples: list[GrowthSample]
    slope: float
    ratios: list[float]
    running_slopes: list[float | None]


def f_exponents(N: int, bases) -> tuple[int, ...]:
    """Least f_i with b_i**f_i >= N, i.e. ceil(log N / log b_i) exactly."""
    if N < 1:
        raise ValueError("N must be positive")
    out = []
    for b in BaseTuple.of(bases):
        f, p = 0, 1
        while p < N:
            p *= b
            f += 1
        out.append(f)
    return tuple(out)


def log32_ceil(N: int) -> int:
    """ceil(log_{3/2} N): least K with 3**K >= N * 2**K."""
    if N < 1:
        raise ValueError("N must be positive")
    K = 0
    while 3**K < N * 2**K:
        K += 1
    return K


def elementary_residue(j: int, k: int, u_digits: Sequence[int], b: int) -> int:
    """Residue mod b**j of indices whose radical inverse lies in the cell

    [sum_l u_l b^-l + (k-1) b^-j,  sum_l u_l b^-l + k b^-j),  l = 1..j-1.
    """
    if j < 1:
        raise ValueError("level j must be >= 1")
    if not 1 <= k <= b:
        raise ValueError(f"cell index k={k} outside 1..{b}")
    if len(u_digits) != j - 1:
        raise ValueError(f"expected {j - 1} leading digits, got {len(u_digits)}")
    if any(not 0 <= u < b for u in u_digits):
        raise ValueError(f"digit outside 0..{b - 1}")
    return (k - 1) * b ** (j - 1) + sum(u * b ** (l - 1) for l, u in enumerate(u_digits, 1))


def crt_combine(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Unique R in [0, prod moduli) with R = a_i mod m_i."""
    if len(residues) != len(moduli):
        raise ValueError("residues and moduli differ in length")
    for m1, m2 in itertools.combinations(moduli, 2):
        if math.gcd(m1, m2) != 1:
            raise ValueError(f"moduli {m1} and {m2} are not coprime")
    M = math.prod(moduli)
    R = 0
    for a, m in zip(residues, moduli):
        Mi = M // m
        R += a * Mi * pow(Mi, -1, m) if m > 1 else 0
    return R % M


def j_tuples(limits: Sequence[int]):
    """All tuples with 0 <= j_i <= limits[i], lexicographic."""
    return itertools.product(*(range(f + 1) for f in limits))


def _require_alpha_gt_1(alpha: RealSpec) -> None:
    if compare(alpha, 1) <= 0:
        raise ValueError("alpha must exceed 1 (beta in (0, 1))")


def _pmap(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def prop1_rhs(
    N: int,
    alpha: RealSpec,
    bases,
    *,
    with_lhs: bool = True,
    work_budget: int = DEFAULT_WORK_BUDGET,
    threads: int = 1,
) -> BoundReport:
    """(prod b_i) * sum_{0 <= j_i <= f_i} N Delta^(j) + s, paired with N D*_N."""
    bt = BaseTuple.of(bases)
    _require_alpha_gt_1(alpha)
    f = f_exponents(N, bt)
    tuples = list(j_tuples(f))
    if len(tuples) * N > work_budget:
        raise WorkBudgetExceeded(f"{len(tuples)} j-tuples x N={N} exceed budget {work_budget}")
    deltas = _pmap(lambda j: local_delta(N, alpha, j, bt), tuples, threads)
    components = dict(zip(tuples, deltas))
    rhs = math.prod(bt.bases) * sum(deltas, Fraction(0)) + bt.s
    lhs = None
    if with_lhs and bt.s <= 3:
        ps = subsequence_points(reciprocal(alpha), bt, N)
        lhs = N * star_discrepancy_exact(ps, work_budget=work_budget).value
    return BoundReport(N, alpha.to_text(), bt.bases, lhs, rhs, None, components)


def lemma1_rhs(
    N: int, alpha: RealSpec, j: Sequence[int], bases, *, with_lhs: bool = True
) -> BoundReport:
    """alpha + 1 + 2 * sum_{k=1}^{K} a_k(alpha B), K = ceil(log_{3/2} N).

    alpha is replaced by a certified upper bracket; the left side is
    N Delta^(j).
    """
    bt = BaseTuple.of(bases)
    _require_alpha_gt_1(alpha)
    j = tuple(j)
    B = math.prod(b**ji for b, ji in zip(bt.bases, j))
    K = log32_ceil(N)
    cf = cf_expand(scale(alpha, B), K)
    quotients = [cf.quotient(k) for k in range(1, K + 1)]
    _, H, Q = bracket(alpha, 40)
    alpha_hi = Fraction(H, Q)
    rhs = alpha_hi + 1 + 2 * sum(quotients)
    lhs = local_delta(N, alpha, j, bt) if with_lhs else None
    comps = {"alpha_upper": alpha_hi, "K": K, "quotients": tuple(quotients)}
    return BoundReport(N, alpha.to_text(), bt.bases, lhs, rhs, j, comps)


def s_l_sum(alpha: RealSpec, bases, L: int) -> int:
    """sum over 0 <= j_i <= L of sum_{k=1}^{L} a_k(alpha * prod b_i^j_i)."""
    if L < 1:
        raise ValueError("L must be positive")
    bt = BaseTuple.of(bases)
    total = 0
    for j in j_tuples([L] * bt.s):
        B = math.prod(b**ji for b, ji in zip(bt.bases, j))
        cf = cf_expand(scale(alpha, B), L)
        total += sum(cf.quotient(k) for k in range(1, L + 1))
    return total


def fit_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Ordinary least-squares slope of y against x."""
    if len(x) < 2:
        raise ValueError("need at least two samples")
    slope, _ = np.polyfit(np.asarray(x, float), np.asarray(y, float), 1)
    return float(slope)


_LN_CTX = decimal.Context(prec=40)


def growth_sweep(
    beta: RealSpec,
    bases,
    N_list: Sequence[int],
    *,
    work_budget: int = DEFAULT_WORK_BUDGET,
    threads: int = 1,
) -> GrowthSweep:
    """N D*_N of the subsequence at each N and the log-log growth slope.

    The slope is that of log(N D*_N) against log log N; ratios are
    N D*_N / (log N)^(s+1).
    """
    bt = BaseTuple.of(bases)
    N_list = list(N_list)
    if not N_list:
        raise ValueError("empty N list")
    if any(b <= a for a, b in zip(N_list, N_list[1:])) or N_list[0] < 2:
        raise ValueError("N list must be strictly increasing and start at >= 2")
    if bt.s > 3:
        raise ValueError("growth sweep needs exact D*, s <= 3")
    ps = subsequence_points(beta, bt, N_list[-1])
    values = _pmap(
        lambda N: N * star_discrepancy_exact(ps.prefix(N), work_budget=work_budget).value,
        N_list,
        threads,
    )
    samples = [
        GrowthSample(N, v, _LN_CTX.ln(decimal.Decimal(N))) for N, v in zip(N_list, values)
    ]
    loglog = [math.log(float(s.logN)) for s in samples]
    logv = [math.log(float(s.NDstar)) for s in samples]
    ratios = [float(s.NDstar) / float(s.logN) ** (bt.s + 1) for s in samples]
    running: list[float | None] = [None]
    for k in range(2, len(samples) + 1):
        running.append(fit_slope(loglog[:k], logv[:k]))
    slope = running[-1] if len(samples) > 1 else float("nan")
    return GrowthSweep(beta.to_text(), bt.bases, samples, slope, ratios, running)
