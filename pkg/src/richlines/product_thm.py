"""Slope-quotient dichotomies and the sum-product experiment harness.

The quotient of the map group by its translation subgroup is slope
extraction, so |A/U| is the number of distinct slopes.  A set that is
not concentrated in one abelian piece carries a non-commuting witness
x, and conjugating x across A splits A into a translation part S and a
point-stabilizer part T with |S||T| >= |A| and |T| <= |A/U|; that
decomposition drives the growth dichotomies, which we evaluate here at
constant one and exponent ten, reporting margins rather than asserting
asymptotics.

The harness side builds, from scalar sets B and C, the family of maps
x -> c*(x - b); each such map is |A|-rich in the grid on
(A+B) union (AC) by construction, which is the bridge from sum-product
measurements to rich-line structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import caps as caps_mod
from .affine import AffineMap, CosetDescriptor
from .errors import (
    CapExceeded,
    DescriptorMismatch,
    InvariantViolation,
    NoWitness,
    ZeroSlope,
)
from .grid import GroundSet, richness
from .growth import _dedup, _raw, _raw_invert, _raw_product_set, triple_product
from .scalar import Scalar


def quotient_image(A: list[AffineMap]) -> list[Scalar]:
    """The set of slopes of A: the image under the quotient by translations."""
    return sorted({g.a for g in A}, key=lambda s: s.sort_key())


def _ordered_dedup(A: list[AffineMap]) -> list[AffineMap]:
    seen = set()
    out = []
    for g in A:
        if g not in seen:
            seen.add(g)
            out.append(g)
    return out


def _stabilizer_counts(A: list[AffineMap]) -> dict[Scalar, int]:
    """For each candidate fixed point, how many maps of A fix it."""
    candidates = set()
    for g in A:
        if not g.a.is_one():
            candidates.add(g.fixed_point())
    return {x: sum(1 for g in A if g.apply(x) == x) for x in candidates}


def abelian_concentration(A: list[AffineMap]) -> tuple[Fraction, CosetDescriptor]:
    """Largest fraction of A inside one maximal abelian subgroup.

    Compares the translation subgroup against every point stabilizer
    anchored at a fixed point of some member; ties go to translations.
    """
    A = _dedup(A)
    if not A:
        raise ValueError("need a nonempty map list")
    field = A[0].field
    unit_count = sum(1 for g in A if g.a.is_one())
    best_fraction = Fraction(unit_count, len(A))
    witness = CosetDescriptor.translations(Scalar.one(field))
    counts = _stabilizer_counts(A)
    for x in sorted(counts, key=lambda s: s.sort_key()):
        fraction = Fraction(counts[x], len(A))
        if fraction > best_fraction:
            best_fraction = fraction
            witness = CosetDescriptor.through(x, x)
    return best_fraction, witness


def commutator_witness(A: list[AffineMap]) -> AffineMap | None:
    """First non-translation x in input order with a non-trivial orbit.

    Returns x in A \\ U whose conjugates {a x a^-1 : a in A} take at
    least two values, or None when every such x commutes with all of A.
    """
    ordered = _ordered_dedup(A)
    for x in ordered:
        if x.a.is_one():
            continue
        conjugates = {a.conjugate(x) for a in ordered}
        if len(conjugates) > 1:
            return x
    return None


@dataclass(frozen=True, eq=False)
class OrbitDecomposition:
    witness: AffineMap                 # non-commuting x
    anchor: AffineMap                  # a0 maximizing the stabilizer slice
    commutators: tuple[AffineMap, ...]  # S = {a x a^-1 x^-1}, all translations
    stabilizer_part: tuple[AffineMap, ...]  # T = (a0^-1 A) ∩ C(x)
    offsets: tuple[Scalar, ...]        # nonzero translation amounts of S
    slopes: tuple[Scalar, ...]         # slopes of T
    concentration: Fraction            # abelian_concentration fraction
    low_concentration: bool            # concentration < 1/3, the intended regime
    difference_size: int               # |B - B*C| over the offsets and slopes


def orbit_decomposition(A: list[AffineMap]) -> OrbitDecomposition:
    """Split A along the conjugation orbit of a non-commuting witness.

    The orbit-stabilizer count for sets guarantees |S||T| >= |A| for
    the maximizing anchor, and slopes are distinct within a point
    stabilizer, so |T| <= |A/U|.  Both are asserted, as is S being all
    translations.
    """
    A = _ordered_dedup(A)
    if not A:
        raise ValueError("need a nonempty map list")
    concentration, _ = abelian_concentration(A)
    witness = commutator_witness(A)
    if witness is None:
        raise NoWitness("all non-translation elements commute with the set")
    fixed = witness.fixed_point()

    images = [a.apply(fixed) for a in A]
    tally: dict = {}
    for value in images:
        tally[value] = tally.get(value, 0) + 1
    best_value = None
    anchor = None
    for a, value in zip(A, images):
        if best_value is None or tally[value] > tally[best_value]:
            best_value = value
            anchor = a
    anchor_inv = anchor.inverse()
    stab_part = sorted(
        (anchor_inv.compose(g) for g, v in zip(A, images) if v == best_value),
        key=lambda g: g.sort_key(),
    )
    commutators = sorted(
        {a.commutator(witness) for a in A}, key=lambda g: g.sort_key()
    )

    if any(not s.a.is_one() for s in commutators):
        raise InvariantViolation("conjugate-quotients must be translations")
    if len(commutators) * len(stab_part) < len(A):
        raise InvariantViolation("|S||T| >= |A| failed")
    slope_count = len(quotient_image(A))
    if len(stab_part) > slope_count:
        raise InvariantViolation("|T| <= |A/U| failed")

    offsets = tuple(s.b for s in commutators if not s.b.is_zero())
    slopes = tuple(sorted({t.a for t in stab_part}, key=lambda s: s.sort_key()))
    field = A[0].field
    p = None if field.is_rational else field.modulus
    b_vals = [s.value for s in offsets]
    c_vals = [s.value for s in slopes]
    if p is None:
        diff = {b1 - b2 * c for b1 in b_vals for b2 in b_vals for c in c_vals}
    else:
        diff = {(b1 - b2 * c) % p for b1 in b_vals for b2 in b_vals for c in c_vals}
    return OrbitDecomposition(
        witness=witness,
        anchor=anchor,
        commutators=tuple(commutators),
        stabilizer_part=tuple(stab_part),
        offsets=offsets,
        slopes=slopes,
        concentration=concentration,
        low_concentration=concentration < Fraction(1, 3),
        difference_size=len(diff),
    )


@dataclass(frozen=True)
class NinefoldResult:
    word_size: int          # |A^3 A^-1 A^2 A^-3|
    tripling: Fraction      # K = |A^3|/|A|
    bound: Fraction         # K^10 |A|
    holds: bool

    def to_json(self) -> dict:
        return {
            "word_size": self.word_size,
            "tripling": str(self.tripling),
            "bound": str(self.bound),
            "holds": self.holds,
        }


def ninefold_growth_check(A: list[AffineMap], cap: int | None = None) -> NinefoldResult:
    """Enumerate A^3 A^-1 A^2 A^-3 and compare against K^10 |A| exactly.

    Gated at |A| <= 12; the intermediate sets stay bounded by the group
    order over a prime field but can explode over the rationals.
    """
    A = _dedup(A)
    if len(A) > 12:
        raise CapExceeded("nine-fold product verification gated at |A| <= 12")
    limit = cap if cap is not None else caps_mod.DEFAULT.product_terms
    field = A[0].field
    p = None if field.is_rational else field.modulus
    raw = _raw(A)
    raw_inv = [_raw_invert(x, p) for x in raw]
    _, tripling = triple_product(A, cap)

    word = _raw_product_set(raw, raw, p)
    for factor in (raw, raw_inv, raw, raw, raw_inv, raw_inv, raw_inv):
        if len(word) * len(factor) > limit:
            raise CapExceeded("nine-fold enumeration exceeds the product cap")
        word = _raw_product_set(word, factor, p)
    bound = tripling**10 * len(A)
    return NinefoldResult(
        word_size=len(word),
        tripling=tripling,
        bound=bound,
        holds=Fraction(len(word)) <= bound,
    )


TORUS_THIRD = "torus_third"
SLOPE_GROWTH = "slope_growth"
FIELD_SATURATION = "field_saturation"


@dataclass(frozen=True, eq=False)
class DichotomyReport:
    branch: str | None
    tripling: Fraction            # K = |A^3| / |A|
    set_size: int
    cube_size: int
    slope_count: int              # |A/U|
    torus_overlap: int            # max |A ∩ stab(x)|
    translation_overlap: int      # max |A ∩ gU|, the K^-20 clause quantity
    p: int | None
    margins: dict[str, Fraction]  # branch inequality at constant 1

    @property
    def no_branch(self) -> bool:
        return self.branch is None

    def to_json(self) -> dict:
        return {
            "branch": self.branch,
            "tripling": str(self.tripling),
            "set_size": self.set_size,
            "cube_size": self.cube_size,
            "slope_count": self.slope_count,
            "torus_overlap": self.torus_overlap,
            "translation_overlap": self.translation_overlap,
            "p": self.p,
            "margins": {k: str(v) for k, v in sorted(self.margins.items())},
        }


def dichotomy_check(A: list[AffineMap], cap: int | None = None) -> DichotomyReport:
    """Evaluate the three growth branches at constant 1, exponent 10.

    torus_third: a third of A inside one point stabilizer.
    slope_growth: K^10 >= |A/U|^(1/2), checked as K^20 >= |A/U|.
    field_saturation: K^10 |A| >= |A/U| p (prime fields only).
    The recorded branch is the first that holds; when none does, all
    margins are still reported.  The torus branch requires a strict
    margin: the identity lies in every stabilizer, so a set of size 3n
    with only the identity fixing anything hits exactly n/3 and carries
    no concentration evidence.
    """
    A = _dedup(A)
    if not A:
        raise ValueError("need a nonempty map list")
    field = A[0].field
    p = None if field.is_rational else field.modulus
    cube, tripling = triple_product(A, cap)
    slope_count = len(quotient_image(A))
    stab_counts = _stabilizer_counts(A)
    if stab_counts:
        torus_overlap = max(stab_counts.values())
    else:
        torus_overlap = 1 if any(g.is_identity() for g in A) else 0
    by_slope: dict = {}
    for g in A:
        by_slope[g.a] = by_slope.get(g.a, 0) + 1
    translation_overlap = max(by_slope.values())

    margins = {
        TORUS_THIRD: Fraction(3 * torus_overlap, len(A)),
        SLOPE_GROWTH: tripling**20 / slope_count,
    }
    if p is not None:
        margins[FIELD_SATURATION] = tripling**10 * len(A) / (slope_count * p)
    branch = None
    if margins[TORUS_THIRD] > 1:
        branch = TORUS_THIRD
    else:
        for name in (SLOPE_GROWTH, FIELD_SATURATION):
            if name in margins and margins[name] >= 1:
                branch = name
                break
    return DichotomyReport(
        branch=branch,
        tripling=tripling,
        set_size=len(A),
        cube_size=len(cube),
        slope_count=slope_count,
        torus_overlap=torus_overlap,
        translation_overlap=translation_overlap,
        p=p,
        margins=margins,
    )


# ---------------------------------------------------------------------------
# scalar-set expanders and the sum-product harness
# ---------------------------------------------------------------------------


def _require_same_field(*grounds: GroundSet) -> None:
    field = grounds[0].field
    for g in grounds[1:]:
        if g.field != field:
            raise DescriptorMismatch("scalar sets live in different fields")


def _scalar_sums(xs: GroundSet, ys, p: int | None) -> set:
    if p is None:
        return {x + y for x in xs.values for y in ys}
    return {(x + y) % p for x in xs.values for y in ys}


def _scalar_products(xs: GroundSet, ys: GroundSet, p: int | None) -> set:
    if p is None:
        return {x * y for x in xs.values for y in ys.values}
    return {x * y % p for x in xs.values for y in ys.values}


@dataclass(frozen=True)
class ExpanderReport:
    lhs: int                 # |A + BC|
    rhs_squared: int         # |A||B||C|
    p: int | None
    ratio_squared: Fraction  # lhs^2 over min(|A||B||C|, p^2)
    holds: bool

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs_squared": self.rhs_squared,
            "p": self.p,
            "ratio_squared": str(self.ratio_squared),
            "holds": self.holds,
        }


def expander_check(
    A: GroundSet, B: GroundSet, C: GroundSet, cap: int | None = None
) -> ExpanderReport:
    """Measure |A + BC| against sqrt(|A||B||C|), via squares, exactly.

    Over a prime field the target is min(sqrt(|A||B||C|), p) and
    |A+BC| <= p is asserted unconditionally.
    """
    _require_same_field(A, B, C)
    limit = cap if cap is not None else caps_mod.DEFAULT.product_terms
    p = None if A.field.is_rational else A.field.modulus
    if len(B) * len(C) > limit:
        raise CapExceeded("|B||C| enumeration exceeds cap")
    bc = _scalar_products(B, C, p)
    if len(A) * len(bc) > limit:
        raise CapExceeded("|A||BC| enumeration exceeds cap")
    sums = _scalar_sums(A, bc, p)
    lhs = len(sums)
    rhs_squared = len(A) * len(B) * len(C)
    if p is not None:
        if lhs > p:
            raise InvariantViolation("a subset of F_p exceeded p elements")
        effective = min(rhs_squared, p * p)
    else:
        effective = rhs_squared
    return ExpanderReport(
        lhs=lhs,
        rhs_squared=rhs_squared,
        p=p,
        ratio_squared=Fraction(lhs * lhs, effective),
        holds=lhs * lhs >= effective,
    )


def elekes_family(B: GroundSet, C: GroundSet) -> list[AffineMap]:
    """The maps x -> c*(x - b) for b in B, c in C, deduplicated."""
    _require_same_field(B, C)
    field = B.field
    p = None if field.is_rational else field.modulus
    raw = set()
    for c in C.values:
        if c == 0:
            raise ZeroSlope("0 in C would give a horizontal line")
        for b in B.values:
            if p is None:
                raw.add((c, -c * b))
            else:
                raw.add((c, -c * b % p))
    maps = [AffineMap(Scalar(field, a), Scalar(field, b)) for a, b in raw]
    maps.sort(key=lambda g: g.sort_key())
    return maps


@dataclass(frozen=True, eq=False)
class AsymExperimentReport:
    set_sizes: tuple[int, int, int]     # |A|, |B|, |C|
    sum_size: int                       # |A + B|
    product_size: int                   # |A C|
    ground_size: int                    # |Y|, Y = (A+B) ∪ (AC)
    alpha: Fraction                     # |A| / |Y|
    family_size: int
    min_richness: int                   # over the family, >= |A| asserted
    k_parameter: Fraction
    hypothesis_ok: bool                 # (2K)^(2^J) <= |A|
    fp_side_condition: bool | None      # |A| (2K)^(2^J) <= p
    growth_side: bool                   # |AC| + |A+B| > K |A|
    structure_margin_pow: Fraction      # min(|B|,|C|)^J / (K^(J 2^J) |A|)
    pipeline: object | None             # StructureReport when requested

    def to_json(self) -> dict:
        return {
            "set_sizes": list(self.set_sizes),
            "sum_size": self.sum_size,
            "product_size": self.product_size,
            "ground_size": self.ground_size,
            "alpha": str(self.alpha),
            "family_size": self.family_size,
            "min_richness": self.min_richness,
            "k_parameter": str(self.k_parameter),
            "hypothesis_ok": self.hypothesis_ok,
            "fp_side_condition": self.fp_side_condition,
            "growth_side": self.growth_side,
            "structure_margin_pow": str(self.structure_margin_pow),
            "pipeline": None if self.pipeline is None else self.pipeline.to_json(),
        }


def asym_experiment(
    A: GroundSet,
    B: GroundSet,
    C: GroundSet,
    steps: int,
    k_parameter: Fraction,
    run_pipeline: bool = False,
    cap: int | None = None,
) -> AsymExperimentReport:
    """Measure which side of the sum-product dichotomy the sets land on.

    Builds Y = (A+B) ∪ (AC) and the line family from B and C; every
    family line hits at least |A| grid points of Y x Y (through the
    points (a+b, c*a)), which is asserted.  The margins for both sides
    are reported with constant one; K^(1/J)-style comparisons go
    through integer powers.
    """
    _require_same_field(A, B, C)
    if steps < 1:
        raise ValueError("need steps >= 1")
    k_parameter = Fraction(k_parameter)
    if k_parameter <= 0:
        raise ValueError("need a positive growth parameter")
    limit = cap if cap is not None else caps_mod.DEFAULT.product_terms
    if len(A) * max(len(B), len(C)) > limit:
        raise CapExceeded("pairwise sum/product enumeration exceeds cap")
    field = A.field
    p = None if field.is_rational else field.modulus
    sums = _scalar_sums(A, B.values, p)
    products = _scalar_products(A, C, p)
    ground = GroundSet(field, sums | products)
    family = elekes_family(B, C)
    min_rich = min(richness(g, ground) for g in family)
    if min_rich < len(A):
        raise InvariantViolation("a family line fell below |A| grid incidences")
    alpha = Fraction(len(A), len(ground))
    two_k = 2 * k_parameter
    hypothesis_ok = two_k ** (2**steps) <= len(A)
    side_condition = None
    if p is not None:
        side_condition = len(A) * two_k ** (2**steps) <= p
    growth_side = Fraction(len(products) + len(sums)) > k_parameter * len(A)
    margin = Fraction(min(len(B), len(C))) ** steps / (
        k_parameter ** (steps * 2**steps) * len(A)
    )
    pipeline = None
    if run_pipeline:
        from .growth import bsg_pipeline

        pipeline = bsg_pipeline(family, ground, alpha, steps)
    return AsymExperimentReport(
        set_sizes=(len(A), len(B), len(C)),
        sum_size=len(sums),
        product_size=len(products),
        ground_size=len(ground),
        alpha=alpha,
        family_size=len(family),
        min_richness=min_rich,
        k_parameter=k_parameter,
        hypothesis_ok=hypothesis_ok,
        fp_side_condition=side_condition,
        growth_side=growth_side,
        structure_margin_pow=margin,
        pipeline=pipeline,
    )
