"""Brute-force oracle behavior and cross-validation."""

import random
from fractions import Fraction

import pytest

from richlines.affine import AffineMap, CosetDescriptor, general_position_check
from richlines.errors import AlphaTooSmall, CapExceeded
from richlines.grid import GroundSet, is_alpha_rich
from richlines.oracle import best_abelian_coset, rlgp_exact, sym_fp_oracle
from richlines.scalar import RationalField, Scalar, prime_field
from richlines.symset import sym_set


def qmap(a, b):
    return AffineMap.of(RationalField, a, b)


def qset(values):
    return GroundSet(RationalField, values)


class TestRlgp:
    def test_two_point_set(self):
        result = rlgp_exact(qset([0, 1]), Fraction(1))
        assert result.value == 2
        assert set(result.witness) == {qmap(1, 0), qmap(-1, 1)}
        assert result.candidate_count == 2

    def test_three_point_exhaustive(self):
        result = rlgp_exact(qset([0, 1, 2]), Fraction(2, 3))
        assert general_position_check(list(result.witness)) == []
        for g in result.witness:
            assert is_alpha_rich(g, qset([0, 1, 2]), Fraction(2, 3))
        assert result.value >= 2

    def test_monotone_in_alpha(self):
        y = qset([0, 1, 2, 3])
        values = [
            rlgp_exact(y, alpha).value
            for alpha in [Fraction(1, 2), Fraction(3, 4), Fraction(1)]
        ]
        assert values == sorted(values, reverse=True)

    def test_witness_revalidated_independently(self):
        y = qset([0, 1, 2, 3])
        alpha = Fraction(1, 2)
        result = rlgp_exact(y, alpha)
        assert general_position_check(list(result.witness)) == []
        assert all(is_alpha_rich(g, y, alpha) for g in result.witness)

    def test_alpha_too_small(self):
        with pytest.raises(AlphaTooSmall):
            rlgp_exact(qset([0, 1, 2]), Fraction(1, 2))

    def test_cap(self):
        with pytest.raises(CapExceeded):
            rlgp_exact(qset(range(20)), Fraction(1, 2))

    def test_fp_grid(self):
        y = GroundSet(prime_field(7), [0, 1, 2])
        result = rlgp_exact(y, Fraction(2, 3))
        assert result.value >= 2
        assert general_position_check(list(result.witness)) == []

    def test_generated_grid_witness_replay(self):
        # replaying a single constructed rich line certifies the optimum
        # is at least 1 on the 81-element grid without an exhaustive run
        from richlines.construct import FolnerParams, folner_grid

        ground, lines = folner_grid(FolnerParams(3, Fraction(2, 5)))
        witness = lines[0]
        alpha = Fraction(50, 81)
        assert is_alpha_rich(witness, ground, alpha)
        assert general_position_check([witness]) == []


def brute_best_abelian(maps):
    """Cubic oracle: try every slope class and every pair's meeting point."""
    unique = sorted(set(maps), key=lambda g: g.sort_key())
    best = 0
    for g in unique:
        size = sum(1 for h in unique if h.a == g.a)
        best = max(best, size)
    for i, g in enumerate(unique):
        for h in unique[i + 1 :]:
            if g.a == h.a:
                continue
            x = h.b.sub(g.b).div(g.a.sub(h.a))
            y = g.apply(x)
            size = sum(1 for m in unique if m.apply(x) == y)
            best = max(best, size)
    return best


class TestBestAbelianCoset:
    def test_point_beats_slopes(self):
        maps = [qmap(2, 0), qmap(3, 0), qmap(1, 1)]
        coset, subset = best_abelian_coset(maps)
        zero = Scalar(RationalField, 0)
        assert coset == CosetDescriptor.through(zero, zero)
        assert set(subset) == {qmap(2, 0), qmap(3, 0)}

    def test_slope_class(self):
        maps = [qmap(1, 1), qmap(1, 2), qmap(1, 3)]
        coset, subset = best_abelian_coset(maps)
        assert coset == CosetDescriptor.translations(Scalar(RationalField, 1))
        assert len(subset) == 3

    def test_general_position_family_small(self):
        maps = [qmap(a, a * a) for a in range(1, 7)]
        assert general_position_check(maps) == []
        _, subset = best_abelian_coset(maps)
        assert len(subset) <= 2

    def test_singleton(self):
        coset, subset = best_abelian_coset([qmap(5, 2)])
        assert coset.kind == "translation_coset"
        assert subset == [qmap(5, 2)]

    def test_subset_lies_in_coset(self):
        rng = random.Random(7)
        field = prime_field(31)
        for _ in range(20):
            maps = [
                AffineMap.of(field, rng.randint(1, 30), rng.randint(0, 30))
                for _ in range(rng.randint(1, 12))
            ]
            coset, subset = best_abelian_coset(maps)
            assert all(coset.contains(g) for g in subset)
            assert len(subset) == brute_best_abelian(maps)

    def test_agrees_with_cubic_oracle_rational(self):
        rng = random.Random(99)
        choices = [Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3), Fraction(-1)]
        for _ in range(25):
            maps = [
                qmap(rng.choice(choices), rng.randint(-3, 3))
                for _ in range(rng.randint(1, 10))
            ]
            _, subset = best_abelian_coset(maps)
            assert len(subset) == brute_best_abelian(maps)

    def test_agrees_with_cubic_oracle_size_30(self):
        rng = random.Random(30)
        field = prime_field(13)
        for _ in range(10):
            maps = [
                AffineMap.of(field, rng.randint(1, 12), rng.randint(0, 12))
                for _ in range(30)
            ]
            _, subset = best_abelian_coset(maps)
            assert len(subset) == brute_best_abelian(maps)


class TestSymFpOracle:
    def test_matches_pair_enumeration(self):
        field = prime_field(7)
        y = GroundSet(field, [1, 2, 4])
        alpha = Fraction(2, 3)
        assert sym_fp_oracle(y, alpha).entries == sym_set(y, alpha).entries

    def test_identity_always_present(self):
        field = prime_field(11)
        y = GroundSet(field, [3, 5])
        sym = sym_fp_oracle(y, Fraction(1))
        assert AffineMap.identity(field) in sym

    def test_small_alpha_allowed(self):
        field = prime_field(5)
        y = GroundSet(field, [0, 1, 2, 3, 4])
        sym = sym_fp_oracle(y, Fraction(1, 5))
        assert len(sym) == 5 * 4  # every map is rich in the full field

    def test_cap(self):
        field = prime_field(263)
        with pytest.raises(CapExceeded):
            sym_fp_oracle(GroundSet(field, [1, 2]), Fraction(1))

    def test_rejects_rational(self):
        with pytest.raises(ValueError):
            sym_fp_oracle(qset([1, 2]), Fraction(1))
