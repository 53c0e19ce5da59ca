from collections import Counter
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from halton_subseq.halton import (
    BaseTuple,
    NegativeIndex,
    PointSet,
    digits,
    format_float,
    halton_points,
    points_from_csv,
    points_to_csv,
    radical_inverse,
    subsequence_indices,
    subsequence_points,
    verify_merge_identity,
)
from halton_subseq.real_arith import PI, Rational, golden_ratio, parse_real, sqrt

import oracles


def test_digits_examples():
    assert digits(0, 2) == []
    assert digits(6, 2) == [0, 1, 1]
    assert digits(4, 3) == [1, 1]


@given(st.integers(0, 10**12), st.integers(2, 40))
def test_digits_match_division_oracle(n, b):
    d = digits(n, b)
    assert d == oracles.digits_by_division(n, b)
    assert sum(x * b**j for j, x in enumerate(d)) == n
    assert not d or d[-1] != 0


def test_radical_inverse_examples():
    assert radical_inverse(0, 7) == 0
    assert radical_inverse(5, 2) == F(5, 8)
    assert radical_inverse(4, 3) == F(4, 9)


@given(st.integers(0, 10**9), st.integers(2, 30))
def test_radical_inverse_is_digit_reversal(n, b):
    v = radical_inverse(n, b)
    assert v == oracles.reversed_fraction(n, b)
    assert 0 <= v < 1
    assert (b ** len(digits(n, b))) % v.denominator == 0


@pytest.mark.parametrize("b, m", [(2, 10), (3, 6), (5, 4), (7, 3)])
def test_radical_inverse_injective_on_block(b, m):
    vals = [radical_inverse(n, b) for n in range(b**m)]
    assert len(set(vals)) == b**m
    assert all((b**m) % v.denominator == 0 for v in vals)


@pytest.mark.parametrize("b, j, start", [(2, 4, 0), (2, 5, 13), (3, 3, 7), (5, 2, 101)])
def test_van_der_corput_cell_balance(b, j, start):
    cells = Counter(int(radical_inverse(n, b) * b**j) for n in range(start, start + b**j))
    assert sorted(cells) == list(range(b**j))
    assert set(cells.values()) == {1}


def test_halton_examples():
    assert halton_points((2, 3), 3).points == ((0, 0), (F(1, 2), F(1, 3)), (F(1, 4), F(2, 3)))
    assert halton_points((2,), 1).points == ((0,),)
    assert halton_points((2, 3, 5), 1, start=1).points == ((F(1, 2), F(1, 3), F(1, 5)),)


def test_base_tuple_validation():
    with pytest.raises(ValueError):
        BaseTuple((2, 4))
    with pytest.raises(ValueError):
        BaseTuple((1,))
    with pytest.raises(ValueError):
        BaseTuple(())
    assert BaseTuple.of([3, 5]).s == 2


def test_subsequence_examples():
    assert subsequence_points(Rational(1), (2, 3), 3) == halton_points((2, 3), 3).__class__(
        halton_points((2, 3), 3).points, "subsequence", "1/1", (0, 1, 2)
    )
    ps = subsequence_points(sqrt(2), (2,), 5)
    assert ps.indices == (0, 1, 2, 4, 5)
    assert ps.points == tuple((radical_inverse(i, 2),) for i in (0, 1, 2, 4, 5))
    assert subsequence_indices(Rational(1, 2), 4) == [0, 0, 1, 1]
    dup = subsequence_points(Rational(1, 2), (2,), 4)
    assert dup.points[0] == dup.points[1]


def test_subsequence_beta_one_is_halton():
    assert subsequence_points(Rational(1), (2, 3), 500).points == halton_points((2, 3), 500).points


def test_subsequence_rejects_bad_beta():
    with pytest.raises(ValueError):
        subsequence_points(Rational(0), (2,), 3)
    with pytest.raises(NegativeIndex):
        subsequence_points(parse_real("-3/2"), (2,), 3)


def test_subsequence_floor_oracle_pi():
    pi = oracles.dec_pi()
    idx = subsequence_indices(PI, 2000)
    assert idx == [oracles.dec_floor(n * pi) for n in range(2000)]
    assert idx[:5] == [0, 3, 6, 9, 12]


def test_determinism():
    a = subsequence_points(PI, (2, 3), 300)
    b = subsequence_points(parse_real("pi"), (2, 3), 300)
    assert a == b
    assert points_to_csv(a) == points_to_csv(b)


def test_merge_identity_examples():
    assert verify_merge_identity(sqrt(2), 100).passed
    assert verify_merge_identity(golden_ratio(), 1000).passed
    with pytest.raises(ValueError):
        verify_merge_identity(Rational(3, 2), 10)
    with pytest.raises(ValueError):
        verify_merge_identity(parse_real("(0+1*sqrt(2))/2"), 10)


def test_merge_identity_by_enumeration():
    # direct oracle: floor(n a) with a = b/(b+1) in decimal arithmetic
    b = oracles.dec_sqrt(3)
    a = b / (b + 1)
    vals = Counter(oracles.dec_floor(n * a) for n in range(1, 3001))
    top = oracles.dec_floor(3000 * a)
    beatty = Counter(oracles.dec_floor(k * b) for k in range(1, 3001))
    for m in range(top):
        assert vals[m] == 1 + beatty[m]
    assert verify_merge_identity(sqrt(3), 3000).passed


def test_csv_round_trip_exact():
    ps = subsequence_points(sqrt(2), (2, 3), 50)
    text = points_to_csv(ps, exact=True)
    assert text.splitlines()[0] == "n,index,x1,x2"
    back = points_from_csv(text)
    assert back.points == ps.points


def test_csv_float_format():
    ps = halton_points((2, 3), 3)
    lines = points_to_csv(ps).splitlines()
    assert lines[2] == "1,1,0.5,0.33333333333333333"
    assert lines[3] == "2,2,0.25,0.66666666666666667"
    assert format_float(F(2, 3)) == "0.66666666666666667"
    assert format_float(F(1, 8)) == "0.125"


def test_pointset_dimension_invariant():
    with pytest.raises(ValueError):
        PointSet(((F(0),), (F(0), F(0))))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.integers(1, 200))
def test_subsequence_rational_matches_integer_floor(d, N):
    ps = subsequence_points(Rational(1, d), (2, 3), N)
    assert ps.indices == tuple(n // d for n in range(N))
