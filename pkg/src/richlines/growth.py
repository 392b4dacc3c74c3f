"""Partial product sets, approximate closure, and the pigeonhole pipeline.

A subset A of a symmetry set is not closed under composition, but it is
approximately so: the relation

    E = {(g^-1, h) : g, h in A, |Y ∩ gY ∩ hY| >= (alpha^2/2)|Y|}

keeps at least (alpha^2/2)|A|^2 pairs, and every restricted product
g^-1 h is itself (alpha^2/2)-rich.  Restricting E to its heaviest
dyadic multiplicity bucket makes the representation counts uniform
within a factor of two.  Iterating the closure J times and applying the
pigeonhole principle to the stage growth ratios yields a stage whose
product set barely grows; the best abelian coset extracted there is
pulled back to the original set one stage at a time by translate
density.  Every guarantee named above is theorem-backed and asserted at
runtime, so a finished run is its own certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import caps as caps_mod
from .affine import AffineMap, CosetDescriptor, classify_coset
from .errors import (
    AlphaTooSmall,
    CapExceeded,
    DescriptorMismatch,
    EmptyRelation,
    IndexOutOfRange,
    InvariantViolation,
    NotSymmetrySubset,
    StageExplosion,
)
from .grid import GroundSet, richness
from .oracle import best_abelian_coset
from .scalar import Scalar

# ---------------------------------------------------------------------------
# raw-value map arithmetic for the large enumerations
# ---------------------------------------------------------------------------


def _raw(maps: list[AffineMap]) -> list[tuple]:
    return [(g.a.value, g.b.value) for g in maps]


def _raw_compose(x: tuple, y: tuple, p: int | None) -> tuple:
    a1, b1 = x
    a2, b2 = y
    if p is None:
        return (a1 * a2, a1 * b2 + b1)
    return (a1 * a2 % p, (a1 * b2 + b1) % p)


def _raw_invert(x: tuple, p: int | None) -> tuple:
    a, b = x
    if p is None:
        inv = Fraction(1) / Fraction(a)
        return (inv, -inv * b)
    inv = pow(a, -1, p)
    return (inv, -inv * b % p)


def _raw_product_set(xs, ys, p: int | None) -> set:
    out = set()
    for x in xs:
        a1, b1 = x
        if p is None:
            for a2, b2 in ys:
                out.add((a1 * a2, a1 * b2 + b1))
        else:
            for a2, b2 in ys:
                out.add((a1 * a2 % p, (a1 * b2 + b1) % p))
    return out


def _maps_from_raw(field, raws) -> list[AffineMap]:
    maps = [AffineMap(Scalar(field, a), Scalar(field, b)) for a, b in raws]
    maps.sort(key=lambda g: g.sort_key())
    return maps


def _dedup(maps: list[AffineMap]) -> list[AffineMap]:
    return sorted(set(maps), key=lambda g: g.sort_key())


# ---------------------------------------------------------------------------
# relations and partial products
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Relation:
    left: tuple[AffineMap, ...]
    right: tuple[AffineMap, ...]
    pairs: frozenset[tuple[int, int]]
    products: dict[AffineMap, int]  # restricted product -> multiplicity

    @property
    def size(self) -> int:
        return len(self.pairs)

    def product_maps(self) -> list[AffineMap]:
        return sorted(self.products, key=lambda g: g.sort_key())

    def max_multiplicity(self) -> int:
        return max(self.products.values()) if self.products else 0


def partial_product(
    A: list[AffineMap], B: list[AffineMap], pairs
) -> Relation:
    """Products a*b over the pairs of a relation, with multiplicities."""
    left = tuple(A)
    right = tuple(B)
    pairs = frozenset(pairs)
    for i, j in pairs:
        if not (0 <= i < len(left) and 0 <= j < len(right)):
            raise IndexOutOfRange(f"pair {(i, j)} outside {len(left)}x{len(right)}")
    if left and right and left[0].field != right[0].field:
        raise DescriptorMismatch("mixed fields in relation")
    field = left[0].field if left else (right[0].field if right else None)
    p = None if field is None or field.is_rational else field.modulus
    raw_left = _raw(list(left))
    raw_right = _raw(list(right))
    counts: dict = {}
    for i, j in pairs:
        prod = _raw_compose(raw_left[i], raw_right[j], p)
        counts[prod] = counts.get(prod, 0) + 1
    products = {
        AffineMap(Scalar(field, a), Scalar(field, b)): count
        for (a, b), count in counts.items()
    }
    if sum(products.values()) != len(pairs):
        raise InvariantViolation("multiplicities must sum to |E|")
    return Relation(left=left, right=right, pairs=pairs, products=products)


# ---------------------------------------------------------------------------
# approximate and uniform closure
# ---------------------------------------------------------------------------


def _verify_symmetry_subset(A, ground, alpha) -> None:
    bad = [g for g in A if Fraction(richness(g, ground)) < alpha * len(ground)]
    if bad:
        raise NotSymmetrySubset(f"{len(bad)} maps below the alpha = {alpha} threshold")


def approx_closure(
    A: list[AffineMap], ground: GroundSet, alpha: Fraction
) -> tuple[Relation, list[AffineMap]]:
    """The explicit heavy-intersection relation over A^-1 x A.

    Self-certifying: |E| >= (alpha^2/2)|A|^2, every restricted product
    is (alpha^2/2)-rich, and the product set is inverse closed; all
    three are checked on the spot.
    """
    alpha = Fraction(alpha)
    A = _dedup(A)
    if not A:
        raise ValueError("need a nonempty map list")
    _verify_symmetry_subset(A, ground, alpha)
    n = len(ground)
    threshold = alpha * alpha / 2 * n
    index = ground._index
    field = ground.field
    p = None if field.is_rational else field.modulus
    overlaps = []
    for g in A:
        a, b = g.a.value, g.b.value
        if p is None:
            overlaps.append(frozenset(a * y + b for y in ground.values if a * y + b in index))
        else:
            overlaps.append(
                frozenset((a * y + b) % p for y in ground.values if (a * y + b) % p in index)
            )
    pairs = set()
    size = len(A)
    for i in range(size):
        for j in range(size):
            if len(overlaps[i] & overlaps[j]) >= threshold:
                pairs.add((i, j))
    if Fraction(len(pairs)) < alpha * alpha / 2 * size * size:
        raise InvariantViolation("relation below the (alpha^2/2)|A|^2 floor")
    rel = partial_product([g.inverse() for g in A], A, pairs)
    half_sq = alpha * alpha / 2
    for prod in rel.products:
        if Fraction(richness(prod, ground)) < half_sq * n:
            raise InvariantViolation(f"product {prod!r} not {half_sq}-rich")
    members = set(rel.products)
    if members != {g.inverse() for g in members}:
        raise InvariantViolation("product set not inverse closed")
    return rel, rel.product_maps()


def dyadic_restrict(rel: Relation) -> Relation:
    """Keep only the heaviest dyadic multiplicity bucket of the products.

    Within the kept bucket every representation count is within a
    factor two of uniform, giving the fiber bound
    r(x) >= |E'| / (2 |products'|) for every retained x; the bucket
    count bounds the loss: |E'| >= |E| / (1 + floor(log2 max r)).
    """
    if not rel.pairs:
        raise EmptyRelation("nothing to restrict")
    mass: dict[int, int] = {}
    for count in rel.products.values():
        bucket = count.bit_length() - 1
        mass[bucket] = mass.get(bucket, 0) + count
    best_bucket = max(sorted(mass), key=lambda m: mass[m])
    kept = {g for g, count in rel.products.items() if count.bit_length() - 1 == best_bucket}
    kept_raw = {(g.a.value, g.b.value) for g in kept}
    field = rel.left[0].field
    p = None if field.is_rational else field.modulus
    raw_left = _raw(list(rel.left))
    raw_right = _raw(list(rel.right))
    new_pairs = {
        (i, j)
        for i, j in rel.pairs
        if _raw_compose(raw_left[i], raw_right[j], p) in kept_raw
    }
    restricted = partial_product(list(rel.left), list(rel.right), new_pairs)
    floor = Fraction(restricted.size, 2 * len(restricted.products))
    for g, count in restricted.products.items():
        if Fraction(count) < floor:
            raise InvariantViolation(f"fiber bound fails at {g!r}")
    buckets = 1 + int(math.floor(math.log2(rel.max_multiplicity())))
    if restricted.size * buckets < rel.size:
        raise InvariantViolation("dyadic restriction lost more than the bucket count")
    return restricted


def uniform_closure(
    A: list[AffineMap], ground: GroundSet, alpha: Fraction
) -> tuple[Relation, list[AffineMap]]:
    rel, _ = approx_closure(A, ground, alpha)
    restricted = dyadic_restrict(rel)
    return restricted, restricted.product_maps()


# ---------------------------------------------------------------------------
# pull-back and the pipeline
# ---------------------------------------------------------------------------


def translate_density(
    A: list[AffineMap], rel: Relation, coset: CosetDescriptor
) -> tuple[AffineMap, int]:
    """Element g of A whose translate g*coset best explains the relation.

    Maximizes the number of pairs (g^-1, h) in the relation whose
    product lands in the coset; returns g and the overlap |A ∩ g*coset|.
    """
    if not rel.pairs:
        raise EmptyRelation("relation carries no pairs")
    left_lookup = {g: i for i, g in enumerate(rel.left)}
    field = rel.left[0].field
    p = None if field.is_rational else field.modulus
    raw_left = _raw(list(rel.left))
    raw_right = _raw(list(rel.right))
    in_coset: dict[tuple[int, int], bool] = {}
    counts: dict[int, int] = {}
    for i, j in rel.pairs:
        prod = _raw_compose(raw_left[i], raw_right[j], p)
        hit = in_coset.get(prod)
        if hit is None:
            a, b = prod
            hit = coset.contains(AffineMap(Scalar(field, a), Scalar(field, b)))
            in_coset[prod] = hit
        if hit:
            counts[i] = counts.get(i, 0) + 1
    best_g = None
    best_count = -1
    for g in sorted(set(A), key=lambda m: m.sort_key()):
        i = left_lookup.get(g.inverse())
        if i is None:
            continue
        count = counts.get(i, 0)
        if count > best_count:
            best_g, best_count = g, count
    if best_g is None:
        raise EmptyRelation("no element of A indexes the relation")
    ginv = best_g.inverse()
    overlap = sum(1 for x in set(A) if coset.contains(ginv.compose(x)))
    return best_g, overlap


@dataclass(frozen=True)
class StageRecord:
    index: int
    alpha: Fraction
    set_size: int
    relation_size: int
    product_size: int
    containment_ok: bool

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "alpha": str(self.alpha),
            "set_size": self.set_size,
            "relation_size": self.relation_size,
            "product_size": self.product_size,
            "containment_ok": self.containment_ok,
        }


@dataclass(frozen=True, eq=False)
class StructureReport:
    alpha: Fraction
    steps: int
    stages: tuple[StageRecord, ...]
    pigeonhole_index: int
    growth_pow_steps: Fraction | None   # K^J = |A_J| / |A_0|
    growth_enclosure: tuple[Fraction, Fraction] | None
    tripling_at_pivot: Fraction | None
    coset: CosetDescriptor
    final_subset: tuple[AffineMap, ...]
    overlap: int
    certificates_ok: bool

    def to_json(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "steps": self.steps,
            "stages": [s.to_json() for s in self.stages],
            "pigeonhole_index": self.pigeonhole_index,
            "growth_pow_steps": None
            if self.growth_pow_steps is None
            else str(self.growth_pow_steps),
            "growth_enclosure": None
            if self.growth_enclosure is None
            else [str(self.growth_enclosure[0]), str(self.growth_enclosure[1])],
            "tripling_at_pivot": None
            if self.tripling_at_pivot is None
            else str(self.tripling_at_pivot),
            "coset": self.coset.to_json(),
            "overlap": self.overlap,
            "final_subset": [g.to_json() for g in self.final_subset],
            "certificates_ok": self.certificates_ok,
        }


def stage_thresholds(alpha: Fraction, steps: int) -> list[Fraction]:
    """alpha_0 = alpha and alpha_{j+1} = alpha_j^2 / 2, up to index steps."""
    out = [Fraction(alpha)]
    for _ in range(steps):
        out.append(out[-1] * out[-1] / 2)
    return out


def _root_enclosure(value: Fraction, degree: int) -> tuple[Fraction, Fraction]:
    from .construct import integer_root

    scale = 10**6
    t = value.numerator * scale**degree // value.denominator
    r, _ = integer_root(t, degree)
    return Fraction(r, scale), Fraction(r + 1, scale)


def bsg_pipeline(
    A: list[AffineMap],
    ground: GroundSet,
    alpha: Fraction,
    steps: int,
    stage_cap: int | None = None,
    tripling_cap: int | None = None,
) -> StructureReport:
    """Iterate uniform closure, pigeonhole the growth, extract, pull back.

    steps = 0 degenerates to direct extraction on A.  The growth number
    K^J is kept as the exact rational |A_J|/|A_0|; the pigeonhole index
    comparison |A_{j+1}| <= K |A_j| is evaluated through J-th powers so
    no irrational root is ever materialized.
    """
    alpha = Fraction(alpha)
    A0 = _dedup(A)
    if not A0:
        raise ValueError("need a nonempty map list")
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    limit = stage_cap if stage_cap is not None else caps_mod.DEFAULT.pipeline_stage
    n = len(ground)
    if (alpha / 2) ** (2**steps) < Fraction(1, n):
        raise AlphaTooSmall(
            f"(alpha/2)^(2^{steps}) below 1/|Y|: stage sets may be infinite"
        )
    _verify_symmetry_subset(A0, ground, alpha)
    alphas = stage_thresholds(alpha, steps)

    if steps == 0:
        coset, subset = best_abelian_coset(A0)
        tripling = _measured_tripling(A0, tripling_cap)
        report = StructureReport(
            alpha=alpha,
            steps=0,
            stages=(),
            pigeonhole_index=0,
            growth_pow_steps=None,
            growth_enclosure=None,
            tripling_at_pivot=tripling,
            coset=coset,
            final_subset=tuple(subset),
            overlap=len(subset),
            certificates_ok=True,
        )
        return report

    sets = [A0]
    rels: list[Relation] = []
    stages: list[StageRecord] = []
    for j in range(steps):
        current = sets[j]
        if len(current) > limit:
            raise StageExplosion(f"stage {j} holds {len(current)} maps, cap {limit}")
        rel, nxt = uniform_closure(current, ground, alphas[j])
        rels.append(rel)
        sets.append(nxt)
        stages.append(
            StageRecord(
                index=j,
                alpha=alphas[j],
                set_size=len(current),
                relation_size=rel.size,
                product_size=len(nxt),
                containment_ok=True,  # asserted inside approx_closure
            )
        )
    if len(sets[steps]) > limit:
        raise StageExplosion(f"final stage holds {len(sets[steps])} maps, cap {limit}")

    size_first = len(sets[0])
    size_last = len(sets[steps])
    growth_pow = Fraction(size_last, size_first)
    pivot = None
    for j in range(steps):
        if len(sets[j + 1]) ** steps * size_first <= size_last * len(sets[j]) ** steps:
            pivot = j
            break
    if pivot is None:
        raise InvariantViolation("pigeonhole index must exist")

    coset, _ = best_abelian_coset(sets[pivot])
    tripling = _measured_tripling(sets[pivot], tripling_cap)
    for j in range(pivot - 1, -1, -1):
        g, _ = translate_density(sets[j], rels[j], coset)
        coset = coset.shift(g)

    final_subset = tuple(g for g in A0 if coset.contains(g))
    certificates_ok = all(s.containment_ok for s in stages)
    if final_subset:
        certificates_ok = certificates_ok and classify_coset(list(final_subset)) is not None
    report = StructureReport(
        alpha=alpha,
        steps=steps,
        stages=tuple(stages),
        pigeonhole_index=pivot,
        growth_pow_steps=growth_pow,
        growth_enclosure=_root_enclosure(growth_pow, steps),
        tripling_at_pivot=tripling,
        coset=coset,
        final_subset=final_subset,
        overlap=len(final_subset),
        certificates_ok=certificates_ok,
    )
    return report


def _measured_tripling(maps, cap) -> Fraction | None:
    try:
        _, ratio = triple_product(list(maps), cap)
        return ratio
    except CapExceeded:
        return None


# ---------------------------------------------------------------------------
# product growth measurements
# ---------------------------------------------------------------------------


def triple_product(
    A: list[AffineMap], cap: int | None = None
) -> tuple[list[AffineMap], Fraction]:
    """The set A*A*A and its tripling ratio |A^3|/|A|."""
    A = _dedup(A)
    if not A:
        raise ValueError("need a nonempty map list")
    limit = cap if cap is not None else caps_mod.DEFAULT.product_terms
    if len(A) ** 3 > limit:
        raise CapExceeded(f"|A|^3 = {len(A) ** 3} exceeds cap {limit}")
    field = A[0].field
    p = None if field.is_rational else field.modulus
    raw = _raw(A)
    doubled = _raw_product_set(raw, raw, p)
    tripled = _raw_product_set(doubled, raw, p)
    maps = _maps_from_raw(field, tripled)
    return maps, Fraction(len(maps), len(A))


@dataclass(frozen=True)
class RuzsaResult:
    lhs: int            # |A C^-1|
    rhs: Fraction       # |A B^-1| |B C^-1| / |B|
    holds: bool

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": str(self.rhs), "holds": self.holds}


def ruzsa_check(
    A: list[AffineMap],
    B: list[AffineMap],
    C: list[AffineMap],
    cap: int | None = None,
) -> RuzsaResult:
    """|A C^-1| <= |A B^-1| |B C^-1| / |B|; a false result is a defect."""
    A, B, C = _dedup(A), _dedup(B), _dedup(C)
    if not (A and B and C):
        raise ValueError("need three nonempty map lists")
    limit = cap if cap is not None else caps_mod.DEFAULT.product_terms
    if max(len(A) * len(C), len(A) * len(B), len(B) * len(C)) > limit:
        raise CapExceeded("pairwise product enumeration exceeds cap")
    field = A[0].field
    p = None if field.is_rational else field.modulus
    raw_a, raw_b, raw_c = _raw(A), _raw(B), _raw(C)
    inv_b = [_raw_invert(x, p) for x in raw_b]
    inv_c = [_raw_invert(x, p) for x in raw_c]
    lhs = len(_raw_product_set(raw_a, inv_c, p))
    rhs = Fraction(
        len(_raw_product_set(raw_a, inv_b, p)) * len(_raw_product_set(raw_b, inv_c, p)),
        len(B),
    )
    return RuzsaResult(lhs=lhs, rhs=rhs, holds=Fraction(lhs) <= rhs)
