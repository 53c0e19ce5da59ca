"""Radical inverses, Halton points and the floor(n*beta)-indexed subsequence."""

from __future__ import annotations

import csv
import decimal
import io
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Sequence

from .real_arith import (
    Rational,
    RealSpec,
    certified_ceil,
    certified_floor,
    compare,
    mobius,
)

__all__ = [
    "NegativeIndex",
    "BaseTuple",
    "PointSet",
    "digits",
    "radical_inverse",
    "radical_inverse_int",
    "halton_points",
    "iter_subsequence",
    "subsequence_indices",
    "subsequence_points",
    "MergeReport",
    "verify_merge_identity",
    "points_to_csv",
    "points_from_csv",
    "format_float",
]


class NegativeIndex(ValueError):
    """beta < 0 would produce negative Halton indices."""


@dataclass(frozen=True)
class BaseTuple:
    bases: tuple[int, ...]

    def __post_init__(self):
        bases = tuple(int(b) for b in self.bases)
        if not bases:
            raise ValueError("at least one base required")
        if any(b < 2 for b in bases):
            raise ValueError(f"bases must be >= 2, got {bases}")
        for b1, b2 in combinations(bases, 2):
            if math.gcd(b1, b2) != 1:
                raise ValueError(f"bases {b1} and {b2} are not coprime")
        object.__setattr__(self, "bases", bases)

    @classmethod
    def of(cls, bases: "BaseTuple | Sequence[int] | int") -> "BaseTuple":
        if isinstance(bases, BaseTuple):
            return bases
        if isinstance(bases, int):
            return cls((bases,))
        return cls(tuple(bases))

    @property
    def s(self) -> int:
        return len(self.bases)

    def __iter__(self):
        return iter(self.bases)

    def __len__(self):
        return len(self.bases)

    def to_text(self) -> str:
        return ",".join(map(str, self.bases))


@dataclass(frozen=True)
class PointSet:
    """Points with exact rational coordinates.

    ``indices`` holds the Halton index of each point (``floor(n*beta)`` for a
    subsequence); ``provenance`` is ``"halton"``, ``"subsequence"`` or
    ``"external"``.
    """

    points: tuple[tuple[Fraction, ...], ...]
    provenance: str = "external"
    beta: str | None = None
    indices: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.points:
            s = len(self.points[0])
            if any(len(p) != s for p in self.points):
                raise ValueError("points of mixed dimension")

    @property
    def N(self) -> int:
        return len(self.points)

    @property
    def s(self) -> int:
        return len(self.points[0]) if self.points else 0

    def __len__(self):
        return len(self.points)

    def prefix(self, N: int) -> "PointSet":
        idx = self.indices[:N] if self.indices is not None else None
        return PointSet(self.points[:N], self.provenance, self.beta, idx)

    def multiset(self) -> Counter:
        return Counter(self.points)


def digits(n: int, b: int) -> list[int]:
    """Base-b digits of n, least significant first; [] for n == 0."""
    if b < 2:
        raise ValueError("base must be >= 2")
    if n < 0:
        raise ValueError("n must be non-negative")
    out = []
    while n:
        n, r = divmod(n, b)
        out.append(r)
    return out


def radical_inverse_int(n: int, b: int) -> tuple[int, int]:
    """(numerator, b**len(digits)) of the radical inverse of n."""
    num, den = 0, 1
    while n:
        n, r = divmod(n, b)
        num = num * b + r
        den *= b
    return num, den


def radical_inverse(n: int, b: int) -> Fraction:
    if b < 2:
        raise ValueError("base must be >= 2")
    if n < 0:
        raise ValueError("n must be non-negative")
    return Fraction(*radical_inverse_int(n, b))


def _point(index: int, bases: tuple[int, ...]) -> tuple[Fraction, ...]:
    return tuple(Fraction(*radical_inverse_int(index, b)) for b in bases)


def halton_points(bases, N: int, start: int = 0) -> PointSet:
    """Halton points y_start, ..., y_{start+N-1}."""
    bt = BaseTuple.of(bases)
    if N < 0 or start < 0:
        raise ValueError("N and start must be non-negative")
    idx = tuple(range(start, start + N))
    pts = tuple(_point(i, bt.bases) for i in idx)
    return PointSet(pts, "halton", None, idx)


def _check_beta(beta: RealSpec) -> None:
    sign = compare(beta, 0)
    if sign == 0:
        raise ValueError("beta must be nonzero")
    if sign < 0:
        raise NegativeIndex("negative beta is not supported")


def iter_subsequence(beta: RealSpec, N: int, start: int = 0) -> Iterator[int]:
    """Yield floor(n*beta) for n = start, ..., start+N-1."""
    _check_beta(beta)
    for n in range(start, start + N):
        yield certified_floor(beta, n)


def subsequence_indices(beta: RealSpec, N: int) -> list[int]:
    return list(iter_subsequence(beta, N))


def subsequence_points(beta: RealSpec, bases, N: int) -> PointSet:
    """The first N points x_n = (phi_b1(floor(n beta)), ..., phi_bs(floor(n beta)))."""
    bt = BaseTuple.of(bases)
    idx = tuple(iter_subsequence(beta, N))
    cache: dict[int, tuple[Fraction, ...]] = {}
    pts = []
    for i in idx:
        p = cache.get(i)
        if p is None:
            p = cache[i] = _point(i, bt.bases)
        pts.append(p)
    return PointSet(tuple(pts), "subsequence", beta.to_text(), idx)


@dataclass
class MergeReport:
    beta: str
    N: int
    passed: bool
    identity_checked: int
    values_checked: int
    counterexample: str | None = None


def verify_merge_identity(beta: RealSpec, N: int) -> MergeReport:
    """Check the beta > 1 reduction through alpha = beta/(beta+1).

    (a) floor(n alpha) == n - ceil(n/(beta+1)) for 0 <= n <= N;
    (b) as multisets, {floor(n alpha): 1 <= n <= N} equals
        {floor(k beta): k >= 1} plus one copy of each m >= 0, compared on the
        values below floor(N alpha) where both sides are complete.
    """
    if isinstance(beta, Rational):
        raise ValueError("merge identity requires an irrational beta")
    if compare(beta, 1) <= 0:
        raise ValueError("merge identity requires beta > 1")
    alpha = mobius(beta, 1, 0, 1, 1)
    gamma = mobius(beta, 0, 1, 1, 1)
    report = MergeReport(beta.to_text(), N, True, 0, 0)
    counts: Counter = Counter()
    for n in range(N + 1):
        lhs = certified_floor(alpha, n)
        rhs = n - certified_ceil(gamma, n)
        report.identity_checked += 1
        if lhs != rhs:
            report.passed = False
            report.counterexample = f"n={n}: floor(n*alpha)={lhs} != {rhs}"
            return report
        if n >= 1:
            counts[lhs] += 1
    top = certified_floor(alpha, N)
    expected: Counter = Counter(range(top))
    k = 1
    while True:
        v = certified_floor(beta, k)
        if v >= top:
            break
        expected[v] += 1
        k += 1
    for m in range(top):
        report.values_checked += 1
        if counts[m] != expected[m]:
            report.passed = False
            report.counterexample = (
                f"value {m}: {counts[m]} occurrences of floor(n*alpha), expected {expected[m]}"
            )
            return report
    return report


# ---------------------------------------------------------------------------
# CSV export


_CTX17 = decimal.Context(prec=17, rounding=decimal.ROUND_HALF_EVEN)


def format_float(v: Fraction) -> str:
    """Decimal text with 17 significant digits, rounded half-even."""
    v = Fraction(v)
    d = _CTX17.divide(decimal.Decimal(v.numerator), decimal.Decimal(v.denominator))
    return format(d.normalize(_CTX17), "f")


def points_to_csv(ps: PointSet, exact: bool = False) -> str:
    """CSV with header ``n,index,x1,...,xs``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "index"] + [f"x{i + 1}" for i in range(ps.s)])
    idx = ps.indices if ps.indices is not None else [""] * ps.N
    for n, (i, p) in enumerate(zip(idx, ps.points)):
        coords = [f"{c.numerator}/{c.denominator}" if exact else format_float(c) for c in p]
        w.writerow([n, i] + coords)
    return buf.getvalue()


def points_from_csv(text: str) -> PointSet:
    """Read a CSV written by :func:`points_to_csv` (exact or decimal)."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return PointSet(())
    header = rows[0]
    cols = [i for i, h in enumerate(header) if h.startswith("x")]
    pts = tuple(tuple(Fraction(r[i]) for i in cols) for r in rows[1:] if r)
    for p in pts:
        if any(not 0 <= c < 1 for c in p):
            raise ValueError(f"coordinate outside [0,1): {p}")
    return PointSet(pts, "external")

