import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from halton_subseq import real_arith as ra
from halton_subseq.real_arith import (
    E,
    PI,
    PrecisionExhausted,
    Quadratic,
    Rational,
    certified_ceil,
    certified_floor,
    certified_frac,
    cf_expand,
    compare,
    convergents,
    golden_ratio,
    ostrowski_digits,
    ostrowski_expand,
    parse_real,
    quadratic,
    quadratic_period,
    reciprocal,
    reciprocal_cf_shift,
    scale,
    sqrt,
)

import oracles

SQRT2 = sqrt(2)
PHI = golden_ratio()


# --- certified_floor ---------------------------------------------------------


def test_floor_examples():
    assert certified_floor(Rational(3, 2), 3) == 4
    assert certified_floor(SQRT2, 5) == 7
    assert certified_floor(SQRT2, 0) == 0


@pytest.mark.parametrize(
    "x, oracle",
    [
        (SQRT2, oracles.dec_sqrt(2)),
        (Quadratic(1, 1, 5, 2), (1 + oracles.dec_sqrt(5)) / 2),
        (Quadratic(3, -2, 7, 5), (3 - 2 * oracles.dec_sqrt(7)) / 5),
        (PI, oracles.dec_pi()),
    ],
)
def test_floor_matches_decimal_oracle_exhaustive(x, oracle):
    for n in range(0, 20001):
        assert certified_floor(x, n) == oracles.dec_floor(n * oracle)


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_floor_matches_decimal_oracle_sampled(n):
    assert certified_floor(SQRT2, n) == oracles.dec_floor(n * oracles.dec_sqrt(2))
    assert certified_floor(PI, n) == oracles.dec_floor(n * oracles.dec_pi())
    inv_pi = reciprocal(PI)
    assert certified_floor(inv_pi, n) == oracles.dec_floor(n / oracles.dec_pi())


def test_ceil_is_floor_plus_one_for_irrationals():
    for n in range(1, 500):
        assert certified_ceil(SQRT2, n) == certified_floor(SQRT2, n) + 1
        assert certified_ceil(PI, n) == certified_floor(PI, n) + 1
    assert certified_ceil(Rational(1, 2), 4) == 2
    assert certified_ceil(Rational(1, 2), 5) == 3


def test_literal_decimal_exhausts():
    x = parse_real("1.4142~digits=4")
    assert certified_floor(x, 10) == 14
    # 10000 * (1.4142 +- 1e-4) straddles 14142/14143, undecidable at this precision
    with pytest.raises(PrecisionExhausted):
        certified_floor(x, 100000)


def test_constant_escalates_past_embedded_digits():
    # 10**240 * pi needs more than the 200 embedded digits
    n = 10**240
    expected = oracles.dec_floor(oracles.CTX.multiply(n, oracles.dec_pi()))
    assert certified_floor(PI, n) == expected


# --- certified_frac ----------------------------------------------------------


def test_frac_examples():
    lo, hi = certified_frac(Rational(1, 3), 4)
    assert lo == hi == Fraction(1, 3)
    lo, hi = certified_frac(SQRT2, 1)
    assert hi - lo <= Fraction(1, 10**30)
    assert Fraction(41421356, 10**8) < lo < hi < Fraction(41421357, 10**8)
    assert certified_frac(SQRT2, 0) == (0, 0)


def test_frac_bracket_avoids_cell_endpoints():
    lo, hi = certified_frac(SQRT2, 7, cells=12)
    assert math.floor(lo * 12) == math.floor(hi * 12)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=10**6))
def test_frac_contains_oracle(n):
    v = n * oracles.dec_sqrt(2)
    frac = v - oracles.dec_floor(v)
    lo, hi = certified_frac(SQRT2, n)
    f = Fraction(str(frac))
    assert lo - Fraction(1, 10**200) <= f <= hi + Fraction(1, 10**200)


# --- transforms and comparisons ---------------------------------------------


def test_mobius_of_quadratic_is_exact():
    inv = reciprocal(SQRT2)
    assert inv == Quadratic(0, 1, 2, 2)
    assert scale(SQRT2, 2) == Quadratic(0, 2, 2, 1)
    assert reciprocal(inv) == SQRT2
    assert quadratic(1, 1, 4) == Rational(3)


def test_compare():
    assert compare(SQRT2, Fraction(141421, 100000)) == 1
    assert compare(SQRT2, Fraction(141422, 100000)) == -1
    assert compare(Rational(1, 2), Fraction(1, 2)) == 0
    assert compare(PI, Fraction(22, 7)) == -1


@pytest.mark.parametrize(
    "text, expected",
    [
        ("3/2", Rational(3, 2)),
        ("5", Rational(5)),
        ("1.25", Rational(5, 4)),
        ("sqrt(2)", Quadratic(0, 1, 2)),
        ("(1+1*sqrt(5))/2", Quadratic(1, 1, 5, 2)),
        ("(0+1*sqrt(2))/2", Quadratic(0, 1, 2, 2)),
        ("(3-2*sqrt(7))/5", Quadratic(3, -2, 7, 5)),
        ("pi", PI),
        ("e", E),
    ],
)
def test_parse(text, expected):
    assert parse_real(text) == expected


@pytest.mark.parametrize("bad", ["", "sqrt", "1/0", "(1+sqrt(2))", "pie", "1.5~digits=0", "2^3"])
def test_parse_rejects(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_real(bad)


@pytest.mark.parametrize("x", [SQRT2, PHI, Rational(-7, 3), PI, reciprocal(E), parse_real("2.5~digits=3")])
def test_text_round_trip(x):
    assert parse_real(x.to_text()) == x


# --- continued fractions -----------------------------------------------------


def test_cf_examples():
    assert cf_expand(SQRT2, 5) == ra.ContinuedFraction(1, (2, 2, 2, 2, 2))
    assert cf_expand(PHI, 4) == ra.ContinuedFraction(1, (1, 1, 1, 1))
    assert cf_expand(Rational(10, 7), 10) == ra.ContinuedFraction(1, (2, 3))


@settings(max_examples=200, deadline=None)
@given(st.integers(-10**6, 10**6), st.integers(1, 10**6))
def test_cf_rational_is_euclid(p, q):
    cf = cf_expand(Rational(p, q), 100)
    x = Fraction(p, q)
    expected = oracles.euclid_quotients(x.numerator, x.denominator)
    assert [cf.a0, *cf.partial_quotients] == expected


@pytest.mark.parametrize(
    "x, oracle",
    [
        (PI, oracles.dec_pi()),
        (scale(PI, 48), 48 * oracles.dec_pi()),
        (Quadratic(2, 3, 11, 7), (2 + 3 * oracles.dec_sqrt(11)) / 7),
        (reciprocal(PI), 1 / oracles.dec_pi()),
    ],
)
def test_cf_matches_decimal_oracle(x, oracle):
    cf = cf_expand(x, 25)
    assert [cf.a0, *cf.partial_quotients] == oracles.decimal_cf(oracle, 25)


def _brute_period(d: int) -> tuple[int, ...]:
    # surd states (P, Q) of sqrt(d), scanned linearly for the first repeat
    a0 = math.isqrt(d)
    states, quots = [], []
    P, Q = 0, 1
    while True:
        a = (P + a0) // Q
        states.append((P, Q))
        quots.append(a)
        P = a * Q - P
        Q = (d - P * P) // Q
        if (P, Q) in states:
            i = states.index((P, Q))
            return tuple(quots[i:])


@pytest.mark.parametrize("d", [2, 3, 5, 6, 7, 13, 19, 31, 46, 94, 139])
def test_sqrt_period_matches_brute_force(d):
    pre, period = quadratic_period(sqrt(d))
    assert pre == (math.isqrt(d),)
    assert period == _brute_period(d)
    # classic shape: period ends in 2*a0 and is a palindrome before that
    assert period[-1] == 2 * math.isqrt(d)
    assert period[:-1] == period[:-1][::-1]


def test_convergent_examples():
    assert convergents(cf_expand(SQRT2, 4)).q == [1, 2, 5, 12, 29]
    assert convergents(cf_expand(PHI, 4)).q == [1, 1, 2, 3, 5]
    assert convergents(ra.ContinuedFraction(3, ())).pairs == ((3, 1),)


@pytest.mark.parametrize("x", [SQRT2, PHI, Quadratic(2, 3, 11, 7), PI, E])
def test_convergent_quality(x):
    conv = convergents(cf_expand(x, 30))
    for (p, q), (_, q1) in zip(conv.pairs, conv.pairs[1:]):
        assert math.gcd(p, q) == 1
        r = Fraction(p, q)
        eps = Fraction(1, q * q1)
        assert compare(x, r - eps) == 1 and compare(x, r + eps) == -1
    q = conv.q
    assert all(a < b for a, b in zip(q[1:], q[2:]))


def test_convergent_recursion_reruns():
    cf = cf_expand(PI, 20)
    q = convergents(cf).q
    q_prev, q_cur = 0, 1
    for k, a in enumerate(cf.partial_quotients, 1):
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        assert q[k] == q_cur


# --- Ostrowski ---------------------------------------------------------------


def test_ostrowski_examples():
    inv_phi = reciprocal(PHI)
    exp = ostrowski_expand(11, inv_phi)
    assert exp.denominators == (1, 1, 2, 3, 5, 8)
    assert exp.digits == (0, 0, 0, 1, 0, 1)
    # a_1 >= 2 so N = 1 lands on q_0
    assert ostrowski_expand(1, Quadratic(-1, 1, 2, 1)).digits == (1,)
    # a_1 = 1 gives q_0 = q_1 = 1; the digit goes to the larger index
    assert ostrowski_expand(1, inv_phi).digits == (0, 1)
    q = convergents(cf_expand(reciprocal(SQRT2), 10)).q
    for r in range(2, 9):
        exp = ostrowski_expand(q[r], reciprocal(SQRT2))
        assert exp.digits == (0,) * r + (1,)


def test_ostrowski_rational_runs_out():
    with pytest.raises(ra.InsufficientConvergents):
        ostrowski_expand(100, Rational(3, 7))


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10**9))
def test_ostrowski_digit_rules(N):
    x = reciprocal(PI)
    cf = cf_expand(x, 40)
    exp = ostrowski_digits(N, convergents(cf).q)
    assert exp.value() == N
    r = len(exp.digits) - 1
    assert exp.digits[r] >= 1
    q = convergents(cf).q
    assert q[r] <= N < q[r + 1]
    for i, d in enumerate(exp.digits):
        assert d <= cf.quotient(i + 1)
        if i == 0:
            assert d <= cf.quotient(1) - 1
        if d == cf.quotient(i + 1) and i >= 1:
            assert exp.digits[i - 1] == 0


def test_reciprocal_cf_shift_examples():
    assert reciprocal_cf_shift(scale(SQRT2, 2)) == (2, 2)
    assert reciprocal_cf_shift(Rational(3)) == (3, 3)
    assert reciprocal_cf_shift(PHI) == (1, 1)


@pytest.mark.parametrize("B", [1, 2, 3, 6, 12, 72, 1296])
def test_reciprocal_cf_index_shift(B):
    # a_{k+1}(1/y) == a_k(y) for y > 1
    y = scale(SQRT2, B)
    a = cf_expand(y, 12)
    b = cf_expand(reciprocal(y), 13)
    assert b.a0 == 0
    assert b.partial_quotients[0] == a.a0
    assert b.partial_quotients[1:] == a.partial_quotients


def test_max_digits_env(monkeypatch):
    monkeypatch.setenv(ra.MAX_DIGITS_ENV, "60")
    assert ra.max_digits() == 60
    assert ra.max_digits(100) == 100
