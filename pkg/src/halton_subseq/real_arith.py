"""Exact real parameters: rationals, quadratic surds and certified decimals.

Every number used to index the subsequence (beta, alpha = 1/beta and the
scaled values alpha * B) is one of three kinds:

* ``Rational``  -- an exact fraction,
* ``Quadratic`` -- ``(a + b*sqrt(d)) / c`` with ``d`` not a perfect square,
* ``DecimalReal`` -- a decimal approximation with a guaranteed absolute
  error bound, optionally post-composed with an integer Moebius map so that
  ``1/pi`` or ``pi/(pi+1)`` stay representable.

Floors, fractional parts and continued fractions are *certified*: either the
integer arithmetic is exact, or an enclosing rational bracket is shown not to
straddle the relevant boundary.  Brackets are escalated along a fixed
precision ladder before giving up with :class:`PrecisionExhausted`.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Union

__all__ = [
    "PrecisionExhausted",
    "InsufficientConvergents",
    "Rational",
    "Quadratic",
    "DecimalReal",
    "RealSpec",
    "ContinuedFraction",
    "Convergents",
    "OstrowskiExpansion",
    "parse_real",
    "quadratic",
    "golden_ratio",
    "sqrt",
    "PI",
    "E",
    "max_digits",
    "certified_floor",
    "certified_ceil",
    "certified_frac",
    "frac_bracket_int",
    "bracket",
    "compare",
    "mobius",
    "reciprocal",
    "scale",
    "cf_expand",
    "quadratic_period",
    "convergents",
    "ostrowski_digits",
    "ostrowski_expand",
    "reciprocal_cf_shift",
]

START_DIGITS = 50
DEFAULT_MAX_DIGITS = 3200
MAX_DIGITS_ENV = "HALTON_SUBSEQ_MAX_DIGITS"
DEFAULT_FRAC_TOL = Fraction(1, 10**30)

_PI_200 = (
    "3.14159265358979323846264338327950288419716939937510582097494459230781640628"
    "620899862803482534211706798214808651328230664709384460955058223172535940812848"
    "111745028410270193852110555964462294895493038196"
)
_E_200 = (
    "2.71828182845904523536028747135266249775724709369995957496696762772407663035"
    "354759457138217852516642742746639193200305992181741359662904357290033429526059"
    "563073813232862794349076323382988075319525101901"
)


class PrecisionExhausted(ArithmeticError):
    """A decimal bracket could not certify a result within the digit cap."""


class InsufficientConvergents(ValueError):
    """The continued fraction does not reach a denominator beyond N."""


def max_digits(override: int | None = None) -> int:
    """Precision cap for decimal escalation (env var wins over the default)."""
    if override is not None:
        return override
    env = os.environ.get(MAX_DIGITS_ENV)
    if env:
        return int(env)
    return DEFAULT_MAX_DIGITS


def _ladder(cap: int):
    p = START_DIGITS
    while p < cap:
        yield p
        p *= 2
    yield cap


# ---------------------------------------------------------------------------
# exact integer helpers


def _floor_surd(A: int, B: int, d: int, C: int) -> int:
    """floor((A + B*sqrt(d)) / C) for C != 0 and d a non-square (or B == 0)."""
    if C < 0:
        A, B, C = -A, -B, -C
    if B == 0:
        return A // C
    r = math.isqrt(B * B * d)
    # B*sqrt(d) is irrational, so it lies strictly between consecutive integers
    m = r if B > 0 else -r - 1
    return (A + m) // C


def _sign_surd(A: int, B: int, d: int) -> int:
    """Sign of A + B*sqrt(d)."""
    sa = (A > 0) - (A < 0)
    sb = (B > 0) - (B < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    return sa if A * A > B * B * d else sb


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


# ---------------------------------------------------------------------------
# number types


@dataclass(frozen=True)
class Rational:
    num: int
    den: int = 1

    def __post_init__(self):
        if self.den == 0:
            raise ZeroDivisionError("zero denominator")
        g = math.gcd(self.num, self.den)
        s = -1 if self.den < 0 else 1
        object.__setattr__(self, "num", s * self.num // g)
        object.__setattr__(self, "den", s * self.den // g)

    @property
    def value(self) -> Fraction:
        return Fraction(self.num, self.den)

    def to_text(self) -> str:
        return f"{self.num}/{self.den}"

    def __float__(self) -> float:
        return self.num / self.den


@dataclass(frozen=True)
class Quadratic:
    """(a + b*sqrt(d)) / c with d > 0 not a perfect square and c > 0."""

    a: int
    b: int
    d: int
    c: int = 1

    def __post_init__(self):
        if self.d <= 0 or _is_square(self.d):
            raise ValueError(f"sqrt({self.d}) is not a quadratic irrational")
        if self.b == 0:
            raise ValueError("b == 0 is rational; use Rational")
        if self.c == 0:
            raise ZeroDivisionError("zero denominator")
        a, b, c = self.a, self.b, self.c
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(math.gcd(a, b), c)
        object.__setattr__(self, "a", a // g)
        object.__setattr__(self, "b", b // g)
        object.__setattr__(self, "c", c // g)

    def to_text(self) -> str:
        sign = "+" if self.b >= 0 else "-"
        return f"({self.a}{sign}{abs(self.b)}*sqrt({self.d}))/{self.c}"

    def __float__(self) -> float:
        return (self.a + self.b * math.sqrt(self.d)) / self.c


@dataclass(frozen=True)
class DecimalReal:
    """Decimal approximation ``digits`` with |true - digits| <= 10**-err_exp.

    ``transform = (p, q, r, s)`` stands for ``(p*x + q) / (r*x + s)`` applied
    to the underlying decimal ``x``.  Named constants (``pi``, ``e``) can be
    recomputed to any precision, literal decimals cannot.
    """

    digits: str
    err_exp: int
    constant: str | None = None
    transform: tuple[int, int, int, int] = (1, 0, 0, 1)
    _base: Fraction = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.err_exp <= 0:
            raise ValueError("error bound must be < 1")
        object.__setattr__(self, "_base", Fraction(self.digits))
        p, q, r, s = self.transform
        if p * s - q * r == 0:
            raise ValueError("degenerate transform")

    def to_text(self) -> str:
        if self.constant is not None:
            base = self.constant
        else:
            base = f"{self.digits}~digits={self.err_exp}"
        if self.transform == (1, 0, 0, 1):
            return base
        p, q, r, s = self.transform
        return f"mobius({p},{q},{r},{s})[{base}]"

    def __float__(self) -> float:
        lo, hi, Q = bracket(self, 30)
        return (lo + hi) / (2 * Q)


RealSpec = Union[Rational, Quadratic, DecimalReal]

PI = DecimalReal(_PI_200, 200, constant="pi")
E = DecimalReal(_E_200, 200, constant="e")


def quadratic(a: int, b: int, d: int, c: int = 1) -> RealSpec:
    """Build ``(a + b*sqrt(d))/c``, collapsing to a Rational when possible."""
    if _is_square(d):
        return Rational(a + b * math.isqrt(d), c)
    if b == 0:
        return Rational(a, c)
    return Quadratic(a, b, d, c)


def sqrt(d: int) -> RealSpec:
    return quadratic(0, 1, d, 1)


def golden_ratio() -> Quadratic:
    return Quadratic(1, 1, 5, 2)


# ---------------------------------------------------------------------------
# parsing

_INT = r"[+-]?\d+"
_QUAD_RE = re.compile(
    r"^\(\s*(?P<a>[+-]?\d+)\s*(?P<sign>[+-])\s*(?P<b>\d+)\s*\*\s*sqrt\(\s*(?P<d>\d+)\s*\)\s*\)"
    r"\s*(?:/\s*(?P<c>\d+))?$"
)
_SQRT_RE = re.compile(r"^(?P<neg>-)?sqrt\(\s*(?P<d>\d+)\s*\)$")
_RAT_RE = re.compile(rf"^(?P<p>{_INT})\s*(?:/\s*(?P<q>{_INT}))?$")
_DEC_RE = re.compile(r"^(?P<lit>[+-]?\d+\.\d+)(?:\s*~\s*digits\s*=\s*(?P<D>\d+))?$")
_MOB_RE = re.compile(rf"^mobius\(({_INT}),({_INT}),({_INT}),({_INT})\)\[(?P<inner>.+)\]$")


def parse_real(text: str) -> RealSpec:
    """Parse the textual syntax used on the command line.

    Accepted forms: ``p/q`` or ``p``, ``(a+b*sqrt(d))/c``, ``sqrt(d)``,
    ``pi``, ``e``, ``phi``, a decimal literal (exact) or a decimal literal
    with a ``~digits=D`` suffix (approximate, error at most 10**-D).
    """
    s = text.strip()
    if s in ("pi", "e"):
        return PI if s == "pi" else E
    if s in ("phi", "golden"):
        return golden_ratio()
    m = _QUAD_RE.match(s)
    if m:
        b = int(m["b"]) * (1 if m["sign"] == "+" else -1)
        return quadratic(int(m["a"]), b, int(m["d"]), int(m["c"] or 1))
    m = _SQRT_RE.match(s)
    if m:
        return quadratic(0, -1 if m["neg"] else 1, int(m["d"]), 1)
    m = _RAT_RE.match(s)
    if m:
        q = int(m["q"]) if m["q"] else 1
        if q == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Rational(int(m["p"]), q)
    m = _DEC_RE.match(s)
    if m:
        if m["D"] is None:
            v = Fraction(m["lit"])
            return Rational(v.numerator, v.denominator)
        D = int(m["D"])
        if D == 0:
            raise ValueError("~digits must be positive")
        return DecimalReal(m["lit"], D)
    m = _MOB_RE.match(s)
    if m:
        inner = parse_real(m["inner"])
        return mobius(inner, *(int(m.group(i)) for i in range(1, 5)))
    raise ValueError(f"cannot parse real number {text!r}")


# ---------------------------------------------------------------------------
# transforms


def mobius(x: RealSpec, p: int, q: int, r: int, s: int) -> RealSpec:
    """(p*x + q) / (r*x + s) with integer coefficients."""
    if p * s - q * r == 0:
        raise ValueError("degenerate transform")
    if isinstance(x, Rational):
        num = p * x.num + q * x.den
        den = r * x.num + s * x.den
        if den == 0:
            raise ZeroDivisionError("transform pole")
        return Rational(num, den)
    if isinstance(x, Quadratic):
        A, Bc = p * x.a + q * x.c, p * x.b
        C, D = r * x.a + s * x.c, r * x.b
        den = C * C - D * D * x.d
        return quadratic(A * C - Bc * D * x.d, Bc * C - A * D, x.d, den)
    p0, q0, r0, s0 = x.transform
    composed = (p * p0 + q * r0, p * q0 + q * s0, r * p0 + s * r0, r * q0 + s * s0)
    g = math.gcd(*composed)
    composed = tuple(v // g for v in composed)
    if composed[2] < 0 or (composed[2] == 0 and composed[3] < 0):
        composed = tuple(-v for v in composed)
    return DecimalReal(x.digits, x.err_exp, x.constant, composed)


def reciprocal(x: RealSpec) -> RealSpec:
    return mobius(x, 0, 1, 1, 0)


def scale(x: RealSpec, k: int | Fraction) -> RealSpec:
    """k * x for a nonzero rational k."""
    k = Fraction(k)
    return mobius(x, k.numerator, 0, 0, k.denominator)


# ---------------------------------------------------------------------------
# brackets


def _constant_bracket(name: str, digits: int) -> tuple[Fraction, Fraction]:
    base = {"pi": _PI_200, "e": _E_200}[name]
    if digits <= 200:
        v = Fraction(base[: 2 + digits])
        return v, v + Fraction(1, 10**digits)
    import mpmath

    ctx = mpmath.mp.clone()
    ctx.dps = digits + 20
    val = ctx.pi if name == "pi" else ctx.e
    f = int(ctx.floor(val * ctx.mpf(10) ** digits))
    # two guard units cover the rounding of the 20 extra digits
    return Fraction(f - 2, 10**digits), Fraction(f + 3, 10**digits)


@lru_cache(maxsize=4096)
def _decimal_bracket(x: DecimalReal, digits: int) -> tuple[Fraction, Fraction]:
    if x.constant is not None:
        lo, hi = _constant_bracket(x.constant, digits)
    else:
        if digits > x.err_exp:
            digits = x.err_exp
        err = Fraction(1, 10**x.err_exp)
        lo, hi = x._base - err, x._base + err
    p, q, r, s = x.transform
    dlo, dhi = r * lo + s, r * hi + s
    if (dlo > 0) != (dhi > 0) or dlo == 0 or dhi == 0:
        raise PrecisionExhausted("transform pole inside bracket")
    a, b = (p * lo + q) / dlo, (p * hi + q) / dhi
    return (a, b) if a <= b else (b, a)


def _available(x: RealSpec, digits: int) -> bool:
    """Whether asking for this many digits can still tighten the bracket."""
    return not (isinstance(x, DecimalReal) and x.constant is None and digits > x.err_exp)


@lru_cache(maxsize=4096)
def bracket(x: RealSpec, digits: int) -> tuple[int, int, int]:
    """Integer bracket ``(L, H, Q)`` with ``L/Q <= x <= H/Q``.

    For rationals ``L == H``.  For surds the width is ``10**-digits``; for
    decimals it is governed by the available precision.
    """
    if isinstance(x, Rational):
        return x.num, x.num, x.den
    Q = 10**digits
    if isinstance(x, Quadratic):
        F = _floor_surd(Q * x.a, Q * x.b, x.d, x.c)
        return F, F + 1, Q
    lo, hi = _decimal_bracket(x, digits)
    # round outward onto a grid finer than the bracket width
    grid = 10 ** (digits + 10)
    L = math.floor(lo * grid)
    H = math.ceil(hi * grid)
    return L, H, grid


def compare(x: RealSpec, r: Fraction | int, cap: int | None = None) -> int:
    """Sign of ``x - r`` (never 0 for irrational x)."""
    r = Fraction(r)
    if isinstance(x, Rational):
        v = x.value - r
        return (v > 0) - (v < 0)
    if isinstance(x, Quadratic):
        p, q = r.numerator, r.denominator
        return _sign_surd(x.a * q - p * x.c, x.b * q, x.d)
    for digits in _ladder(max_digits(cap)):
        L, H, Q = bracket(x, digits)
        if Fraction(L, Q) > r:
            return 1
        if Fraction(H, Q) < r:
            return -1
        if not _available(x, digits * 2):
            break
    raise PrecisionExhausted(f"cannot separate {x.to_text()} from {r}")


def certified_floor(x: RealSpec, n: int, cap: int | None = None) -> int:
    """Exact ``floor(n * x)`` for an integer ``n >= 0``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return 0
    if isinstance(x, Rational):
        return (n * x.num) // x.den
    if isinstance(x, Quadratic):
        return _floor_surd(n * x.a, n * x.b, x.d, x.c)
    extra = len(str(n))
    for digits in _ladder(max_digits(cap)):
        L, H, Q = bracket(x, digits + extra)
        lo = (n * L) // Q
        if lo == (n * H) // Q:
            return lo
        if not _available(x, 2 * digits + extra):
            break
    raise PrecisionExhausted(f"floor({n}*{x.to_text()}) not certified")


def certified_ceil(x: RealSpec, n: int, cap: int | None = None) -> int:
    """Exact ``ceil(n * x)`` for an integer ``n >= 0``."""
    if n == 0:
        return 0
    if isinstance(x, Rational):
        return -((-n * x.num) // x.den)
    if isinstance(x, Quadratic):
        return _floor_surd(n * x.a, n * x.b, x.d, x.c) + 1
    extra = len(str(n))
    for digits in _ladder(max_digits(cap)):
        L, H, Q = bracket(x, digits + extra)
        lo = -((-n * L) // Q)
        if lo == -((-n * H) // Q):
            return lo
        if not _available(x, 2 * digits + extra):
            break
    raise PrecisionExhausted(f"ceil({n}*{x.to_text()}) not certified")


def frac_bracket_int(
    x: RealSpec, n: int, digits: int, cells: int = 1
) -> tuple[int, int, int] | None:
    """Bracket of ``{n*x}`` as ``(L, H, Q)`` at the given precision.

    Returns ``None`` if the bracket straddles an integer or any multiple of
    ``1/cells``; callers then retry at a higher precision.
    """
    L, H, Q = bracket(x, digits)
    lo, hi = n * L, n * H
    fl = lo // Q
    if hi // Q != fl:
        return None
    lo -= fl * Q
    hi -= fl * Q
    if cells > 1 and (cells * lo) // Q != (cells * hi) // Q:
        return None
    return lo, hi, Q


def certified_frac(
    x: RealSpec,
    n: int,
    tol: Fraction = DEFAULT_FRAC_TOL,
    cells: int = 1,
    cap: int | None = None,
) -> tuple[Fraction, Fraction]:
    """Rational bracket ``(lo, hi)`` of ``{n*x}`` of width at most ``tol``.

    If ``cells`` is given, the bracket is additionally guaranteed not to
    straddle any endpoint ``R/cells``.
    """
    if n == 0:
        return Fraction(0), Fraction(0)
    if isinstance(x, Rational):
        v = Fraction(n * x.num % x.den, x.den)
        return v, v
    need = len(str(n)) + max(1, math.ceil(-math.log10(tol))) if tol > 0 else 30
    for digits in _ladder(max_digits(cap)):
        digits = max(digits, need)
        got = frac_bracket_int(x, n, digits, cells)
        if got is not None:
            lo, hi, Q = got
            if Fraction(hi - lo, Q) <= tol:
                return Fraction(lo, Q), Fraction(hi, Q)
        if not _available(x, 2 * digits):
            break
    raise PrecisionExhausted(f"frac({n}*{x.to_text()}) not certified")


# ---------------------------------------------------------------------------
# continued fractions


@dataclass(frozen=True)
class ContinuedFraction:
    a0: int
    partial_quotients: tuple[int, ...]

    def __post_init__(self):
        if any(a < 1 for a in self.partial_quotients):
            raise ValueError("partial quotients must be >= 1")

    def quotient(self, k: int) -> int:
        """a_k for k >= 0; zero past the end of a terminating expansion."""
        if k == 0:
            return self.a0
        if k <= len(self.partial_quotients):
            return self.partial_quotients[k - 1]
        return 0


@dataclass(frozen=True)
class Convergents:
    pairs: tuple[tuple[int, int], ...]

    @property
    def p(self) -> list[int]:
        return [p for p, _ in self.pairs]

    @property
    def q(self) -> list[int]:
        return [q for _, q in self.pairs]


def _cf_rational(num: int, den: int, K: int) -> ContinuedFraction:
    a0, r = divmod(num, den)
    out: list[int] = []
    num, den = den, r
    while den and len(out) < K:
        a, r = divmod(num, den)
        out.append(a)
        num, den = den, r
    return ContinuedFraction(a0, tuple(out))


def _surd_state(x: Quadratic) -> tuple[int, int, int]:
    """(P, D, Q) with x = (P + sqrt(D))/Q and Q | D - P^2."""
    P, D, Q = x.a, x.b * x.b * x.d, x.c
    if x.b < 0:
        P, Q = -P, -Q
    if (D - P * P) % Q:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    return P, D, Q


def _cf_surd(x: Quadratic, K: int) -> list[int]:
    P, D, Q = _surd_state(x)
    quotients: list[int] = []
    while len(quotients) < K + 1:
        a = _floor_surd(P, 1, D, Q)
        quotients.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    return quotients


def quadratic_period(x: Quadratic) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split the expansion of a surd into (pre-period, period) quotients.

    The pre-period includes ``a_0``.
    """
    P, D, Q = _surd_state(x)
    seen: dict[tuple[int, int], int] = {}
    quotients: list[int] = []
    while (P, Q) not in seen:
        seen[(P, Q)] = len(quotients)
        a = _floor_surd(P, 1, D, Q)
        quotients.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    start = seen[(P, Q)]
    return tuple(quotients[:start]), tuple(quotients[start:])


def _cf_interval(lo: Fraction, hi: Fraction, K: int) -> tuple[int, list[int]]:
    """Quotients shared by every real in [lo, hi]; a0 first."""
    out: list[int] = []
    while len(out) < K + 1:
        a, b = math.floor(lo), math.floor(hi)
        if a != b:
            break
        out.append(a)
        flo, fhi = lo - a, hi - a
        if flo == 0 or fhi == 0:
            break
        lo, hi = 1 / fhi, 1 / flo
    if not out:
        raise PrecisionExhausted("bracket straddles an integer")
    return out[0], out[1:]


def cf_expand(x: RealSpec, K: int, cap: int | None = None) -> ContinuedFraction:
    """First ``K`` partial quotients of ``x`` (fewer if x is rational)."""
    if K < 0:
        raise ValueError("K must be non-negative")
    if isinstance(x, Rational):
        return _cf_rational(x.num, x.den, K)
    if isinstance(x, Quadratic):
        q = _cf_surd(x, K)
        return ContinuedFraction(q[0], tuple(q[1 : K + 1]))
    for digits in _ladder(max_digits(cap)):
        L, H, Q = bracket(x, digits)
        try:
            a0, qs = _cf_interval(Fraction(L, Q), Fraction(H, Q), K)
        except PrecisionExhausted:
            qs = None
        if qs is not None and len(qs) >= K:
            return ContinuedFraction(a0, tuple(qs[:K]))
        if not _available(x, 2 * digits):
            break
    raise PrecisionExhausted(f"only part of {K} quotients of {x.to_text()} certified")


def convergents(cf: ContinuedFraction) -> Convergents:
    """(p_k, q_k) from q_k = a_k q_{k-1} + q_{k-2}, q_0 = 1, q_{-1} = 0."""
    p_prev, q_prev = 1, 0
    p, q = cf.a0, 1
    pairs = [(p, q)]
    for a in cf.partial_quotients:
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        pairs.append((p, q))
    return Convergents(tuple(pairs))


# ---------------------------------------------------------------------------
# Ostrowski numeration


@dataclass(frozen=True)
class OstrowskiExpansion:
    digits: tuple[int, ...]
    denominators: tuple[int, ...]

    def value(self) -> int:
        return sum(n * q for n, q in zip(self.digits, self.denominators))


def ostrowski_digits(N: int, q: list[int]) -> OstrowskiExpansion:
    """Greedy expansion of N against the denominators ``q`` (q[0] = 1).

    ``q`` must contain an entry larger than N.
    """
    if N < 1:
        raise ValueError("N must be positive")
    r = -1
    for i, qi in enumerate(q):
        if qi > N:
            break
        r = i
    else:
        raise InsufficientConvergents(f"largest denominator {q[-1]} <= N = {N}")
    digits = [0] * (r + 1)
    rest = N
    for i in range(r, -1, -1):
        digits[i], rest = divmod(rest, q[i])
    return OstrowskiExpansion(tuple(digits), tuple(q[: r + 1]))


def ostrowski_expand(N: int, x: RealSpec, cap: int | None = None) -> OstrowskiExpansion:
    """Ostrowski expansion of N in the denominators of the convergents of x."""
    if compare(x, 0, cap) <= 0 or compare(x, 1, cap) >= 0:
        raise ValueError("x must lie in (0, 1)")
    K = 8
    while True:
        cf = cf_expand(x, K, cap)
        q = convergents(cf).q
        if q[-1] > N:
            return ostrowski_digits(N, q)
        if len(cf.partial_quotients) < K:
            raise InsufficientConvergents(
                f"expansion of {x.to_text()} terminates at q = {q[-1]} <= {N}"
            )
        K *= 2


def reciprocal_cf_shift(y: RealSpec, cap: int | None = None) -> tuple[int, int]:
    """(floor(y), a_1(1/y)) for y > 1; the two agree."""
    if compare(y, 1, cap) <= 0:
        raise ValueError("y must exceed 1")
    fl = certified_floor(y, 1, cap)
    a1 = cf_expand(reciprocal(y), 1, cap).quotient(1)
    return fl, a1
