"""Symmetry-set enumeration, bounds, and the group property at alpha=1."""

import math
import random
from fractions import Fraction

import pytest

from richlines.affine import AffineMap
from richlines.errors import AlphaTooSmall, CapExceeded
from richlines.grid import GroundSet, richness
from richlines.oracle import sym_fp_oracle
from richlines.scalar import RationalField, prime_field
from richlines.symset import sym_bound_report, sym_group_check, sym_set


def qmap(a, b):
    return AffineMap.of(RationalField, a, b)


def qset(values):
    return GroundSet(RationalField, values)


class TestSymSet:
    def test_contains_shifts(self):
        sym = sym_set(qset([0, 1, 2, 3]), Fraction(1, 2))
        assert qmap(1, 1) in sym
        assert qmap(1, -1) in sym
        assert sym.richness_of(qmap(1, 1)) == 3

    def test_contains_identity(self):
        for values in [[0, 1, 2], [5], [1, 2, 4, 8]]:
            y = qset(values)
            if len(y) < 2:
                continue  # alpha >= 2/|Y| unattainable
            sym = sym_set(y, Fraction(1))
            assert AffineMap.identity(RationalField) in sym

    def test_contains_dilations(self):
        sym = sym_set(qset([1, 2, 4, 8]), Fraction(1, 2))
        assert qmap(2, 0) in sym
        assert qmap(Fraction(1, 2), 0) in sym
        assert sym.richness_of(qmap(2, 0)) == 3

    def test_alpha_too_small(self):
        with pytest.raises(AlphaTooSmall):
            sym_set(qset([0, 1, 2, 3]), Fraction(1, 4))

    def test_cap(self):
        with pytest.raises(CapExceeded):
            sym_set(qset(range(100)), Fraction(1, 2))

    def test_every_member_meets_threshold(self):
        y = qset([0, 1, 2, 5, 8])
        alpha = Fraction(2, 5)
        sym = sym_set(y, alpha)
        for g, count in sym.entries:
            assert count == richness(g, y)
            assert Fraction(count) >= alpha * len(y)

    def test_inverse_closure(self):
        y = qset([0, 1, 3, 4, 9])
        sym = sym_set(y, Fraction(2, 5))
        members = set(sym.maps)
        assert members == {g.inverse() for g in members}

    def test_monotone_in_alpha(self):
        y = qset([0, 1, 2, 3, 4, 5])
        small = set(sym_set(y, Fraction(1, 3)).maps)
        large = set(sym_set(y, Fraction(2, 3)).maps)
        assert large <= small


class TestBoundReport:
    def test_universal_bound_asserted(self):
        report = sym_bound_report(qset(range(10)), Fraction(1, 2))
        assert report.size <= report.universal_bound == 10**4
        assert report.cubed_bound == Fraction(8) * 10
        assert report.side_condition_ok is None

    def test_fp_side_condition(self):
        y = GroundSet(prime_field(101), range(12))
        report = sym_bound_report(y, Fraction(1, 2))
        # |Y| = 12 <= (1/4) * 101
        assert report.side_condition_ok is True

    def test_ap_translation_count(self):
        # |Y ∩ (Y+b)| = n - |b| on an arithmetic progression
        n = 10
        alpha = Fraction(3, 5)
        sym = sym_set(qset(range(n)), alpha)
        translations = [g for g in sym.maps if g.a.is_one()]
        lower = 2 * math.ceil((1 - alpha) * n) - 1
        assert len(translations) >= lower
        for g in translations:
            b = int(g.b.value)
            assert n - abs(b) >= alpha * n

    def test_gp_dilation_count(self):
        # geometric progressions carry the same structure under x -> 2x
        n = 10
        alpha = Fraction(3, 5)
        sym = sym_set(qset([2**i for i in range(n)]), alpha)
        dilations = [g for g in sym.maps if g.b.is_zero()]
        translations_model = [
            g for g in sym_set(qset(range(n)), alpha).maps if g.a.is_one()
        ]
        assert len(dilations) >= len(translations_model)


class TestGroupCheck:
    def test_three_point_set(self):
        y = qset([0, 1, 2])
        sym = sym_set(y, Fraction(1))
        expected = {qmap(1, 0), qmap(-1, 2)}
        assert set(sym.maps) == expected
        assert sym_group_check(y)

    def test_two_point_set(self):
        y = qset([0, 1])
        sym = sym_set(y, Fraction(1))
        assert set(sym.maps) == {qmap(1, 0), qmap(-1, 1)}
        assert sym_group_check(y)

    def test_geometric_set(self):
        assert sym_group_check(qset([1, 2, 4]))


class TestCompletenessAgainstOracle:
    def test_small_instances(self):
        rng = random.Random(20260810)
        for _ in range(8):
            p = rng.choice([11, 13, 17, 101])
            field = prime_field(p)
            size = rng.randint(4, min(12, p - 1))
            values = rng.sample(range(p), size)
            y = GroundSet(field, values)
            num = rng.randint(2, size)
            alpha = Fraction(num, size)
            fast = sym_set(y, alpha)
            slow = sym_fp_oracle(y, alpha)
            assert fast.entries == slow.entries
