import pytest
from hypothesis import given, strategies as st

from decigard import (BitVec, ParseError, Rat, Verdict, WidthError,
                      format_rat, parse_rat)

rationals = st.fractions(max_denominator=1000).map(Rat)


def bitvecs(max_width=10):
    return st.integers(1, max_width).flatmap(
        lambda w: st.integers(0, (1 << w) - 1).map(lambda v: BitVec(w, v)))


class TestBitVec:
    def test_string_round_trip(self):
        v = BitVec.from_string("10110")
        assert str(v) == "10110"
        assert v.width == 5 and v.value == 0b10110
        assert BitVec.from_bits([1, 0, 1, 1, 0]) == v

    def test_bit_indexing_is_msb_first(self):
        v = BitVec.from_string("100")
        assert (v.bit(0), v.bit(1), v.bit(2)) == (1, 0, 0)
        assert v.bits() == (1, 0, 0)

    def test_concat_and_slice(self):
        v = BitVec.from_string("101").concat(BitVec.from_string("01"))
        assert str(v) == "10101"
        assert str(v.slice(0, 3)) == "101"
        assert str(v.slice(3, 5)) == "01"
        with pytest.raises(WidthError):
            v.slice(2, 6)

    def test_constructor_rejects_bad_values(self):
        with pytest.raises(WidthError):
            BitVec(0, 0)
        with pytest.raises(WidthError):
            BitVec(3, 8)
        with pytest.raises(ParseError):
            BitVec.from_string("10a")

    def test_enumerate_is_lexicographic(self):
        vals = list(BitVec.enumerate(3))
        assert len(vals) == 8
        assert vals == sorted(vals)
        assert [str(v) for v in vals[:3]] == ["000", "001", "010"]

    @given(bitvecs(), bitvecs())
    def test_order_total_and_antisymmetric(self, a, b):
        assert (a < b) + (b < a) + (a == b) == 1

    @given(bitvecs(), bitvecs(), bitvecs())
    def test_order_transitive(self, a, b, c):
        if a < b and b < c:
            assert a < c

    @given(bitvecs(6), bitvecs(6))
    def test_order_matches_string_order(self, a, b):
        assert (a < b) == (str(a) < str(b))


class TestRat:
    @given(rationals, rationals, rationals)
    def test_addition_associative(self, a, b, c):
        assert (a + b) + c == a + (b + c)

    @given(rationals, rationals, rationals)
    def test_multiplication_distributes(self, a, b, c):
        assert a * (b + c) == a * b + a * c

    @given(st.integers(-10**6, 10**6), st.integers(1, 10**6))
    def test_normalization_idempotent(self, p, q):
        import math
        r = Rat(p, q)
        assert r.denominator > 0
        assert math.gcd(int(r.numerator), int(r.denominator)) == 1
        assert Rat(r.numerator, r.denominator) == r

    def test_parse_format_round_trip(self):
        for text in ["0", "5", "-3", "3/4", "-7/2"]:
            assert format_rat(parse_rat(text)) == text
        with pytest.raises(ParseError):
            parse_rat("1/0")
        with pytest.raises(ParseError):
            parse_rat("x")


class TestVerdict:
    def test_constructors(self):
        assert Verdict.aligned().is_aligned
        v = Verdict.misaligned(BitVec(2, 0), BitVec(2, 3))
        assert v.is_misaligned and v.counterexample == (BitVec(2, 0), BitVec(2, 3))
        assert Verdict.trivial_judge("why").reason == "why"
        r = Verdict.resource_exceeded("bits", 24)
        assert (r.budget, r.limit) == ("bits", 24)
