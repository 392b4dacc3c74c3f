"""Field arithmetic: examples, axioms, and text round-trips."""

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from richlines.errors import DescriptorMismatch, DivisionByZero, ParseError
from richlines.scalar import (
    FieldDescriptor,
    RationalField,
    Scalar,
    canon_value,
    is_prime,
    parse_fraction,
    parse_scalar,
    prime_field,
)

F7 = prime_field(7)


def q(v) -> Scalar:
    return Scalar(RationalField, v)


def f7(v) -> Scalar:
    return Scalar(F7, v)


def ext_euclid_inverse(a: int, p: int) -> int:
    """Independent oracle for modular inverses."""
    old_r, r = a % p, p
    old_s, s = 1, 0
    while r:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_s, s = s, old_s - quot * s
    assert old_r == 1
    return old_s % p


class TestExamples:
    def test_mul_mod7(self):
        assert f7(3).mul(f7(5)) == f7(1)

    def test_inv_mod7_matches_euclid(self):
        assert f7(3).inv() == f7(ext_euclid_inverse(3, 7))
        assert f7(3).inv() == f7(5)

    def test_rational_add(self):
        assert q(Fraction(1, 2)).add(q(Fraction(1, 3))) == q(Fraction(5, 6))

    def test_parse_normalizes(self):
        assert parse_scalar("-3/6", RationalField) == q(Fraction(-1, 2))

    def test_parse_reduces_mod_p(self):
        assert parse_scalar("10", F7) == f7(3)

    def test_parse_fraction_in_fp(self):
        got = parse_scalar("1/2", F7)
        assert got == f7(4)
        assert f7(2).mul(got) == f7(1)


class TestErrors:
    def test_descriptor_mismatch(self):
        with pytest.raises(DescriptorMismatch):
            q(1).add(f7(1))

    def test_division_by_zero(self):
        with pytest.raises(DivisionByZero):
            q(1).div(q(0))
        with pytest.raises(DivisionByZero):
            f7(0).inv()

    def test_fraction_with_zero_denominator_mod_p(self):
        with pytest.raises(DivisionByZero):
            parse_scalar("1/7", F7)

    def test_parse_garbage(self):
        for text in ["", "x", "1/2/3", "1.5", "2/0"]:
            with pytest.raises(ParseError):
                parse_scalar(text, RationalField)

    def test_nonprime_modulus_rejected(self):
        for n in [1, 4, 6, 561, 41041]:  # includes Carmichael numbers
            with pytest.raises(ValueError):
                prime_field(n)

    def test_prime_moduli_accepted(self):
        for p in [2, 3, 101, 257, 1_000_003]:
            assert prime_field(p).modulus == p


def test_is_prime_small_table():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}
    for n in range(50):
        assert is_prime(n) == (n in primes)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13])
def test_field_axioms_exhaustive_fp(p):
    field = prime_field(p)
    elems = [Scalar(field, v) for v in range(p)]
    for x, y, z in product(elems, repeat=3):
        assert x.add(y).add(z) == x.add(y.add(z))
        assert x.mul(y).mul(z) == x.mul(y.mul(z))
        assert x.mul(y.add(z)) == x.mul(y).add(x.mul(z))
    for x in elems:
        assert x.add(x.neg()).is_zero()
        if not x.is_zero():
            assert x.mul(x.inv()).is_one()


rationals = st.fractions(
    min_value=-(10**6), max_value=10**6, max_denominator=10**4
)


@given(rationals, rationals, rationals)
def test_field_axioms_rational(a, b, c):
    x, y, z = q(a), q(b), q(c)
    assert x.add(y).add(z) == x.add(y.add(z))
    assert x.mul(y.add(z)) == x.mul(y).add(x.mul(z))
    assert x.sub(x).is_zero()
    if not y.is_zero():
        assert x.div(y).mul(y) == x


@given(rationals)
def test_render_parse_round_trip_rational(a):
    x = q(a)
    assert parse_scalar(x.render(), RationalField) == x


@given(st.integers(min_value=0, max_value=100))
def test_render_parse_round_trip_fp(v):
    field = prime_field(101)
    x = Scalar(field, v)
    assert parse_scalar(x.render(), field) == x


def test_canonical_ordering():
    vals = [q(Fraction(1, 2)), q(-3), q(2), q(0)]
    assert sorted(vals, key=lambda s: s.sort_key()) == [
        q(-3),
        q(0),
        q(Fraction(1, 2)),
        q(2),
    ]
    residues = [f7(5), f7(0), f7(3)]
    assert sorted(residues, key=lambda s: s.sort_key()) == [f7(0), f7(3), f7(5)]


def test_canon_value_collapses_integral_fractions():
    assert canon_value(Fraction(6, 3)) == 2
    assert isinstance(canon_value(Fraction(6, 3)), int)
    assert canon_value(Fraction(1, 2)) == Fraction(1, 2)


def test_parse_fraction_parameter():
    assert parse_fraction("2/3") == Fraction(2, 3)
    assert parse_fraction("-4") == Fraction(-4)
    with pytest.raises(ParseError):
        parse_fraction("0.5")


def test_field_descriptor_json_round_trip():
    assert FieldDescriptor.from_json({"kind": "rational"}) == RationalField
    assert FieldDescriptor.from_json({"kind": "fp", "p": 101}) == prime_field(101)
    assert prime_field(101).to_json() == {"kind": "fp", "p": 101}
    with pytest.raises(ParseError):
        FieldDescriptor.from_json({"kind": "real"})
