"""Independent brute-force oracles.

These deliberately use the dumbest correct algorithms: a full scan of
every map over F_p, a branch-and-bound over every candidate line for
the exact general-position optimum, and quadratic intersection grouping
for the best abelian coset.  Tests compare the fast paths against them,
and the growth pipeline borrows best_abelian_coset as its extraction
step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import caps as caps_mod
from .affine import AffineMap, CosetDescriptor, general_position_check
from .errors import AlphaTooSmall, CapExceeded
from .grid import GroundSet, is_alpha_rich, richness
from .scalar import Scalar, canon_value
from .symset import SymmetrySet


@dataclass(frozen=True)
class RlgpResult:
    value: int
    witness: tuple[AffineMap, ...]
    candidate_count: int


def _rich_candidates(ground: GroundSet, alpha: Fraction) -> list[AffineMap]:
    """Deduplicated alpha-rich lines through two or more grid points."""
    vals = ground.values
    field = ground.field
    points = [(x, y) for x in vals for y in vals]
    seen: dict = {}
    if field.is_rational:
        for i, (x1, y1) in enumerate(points):
            for x2, y2 in points[i + 1 :]:
                if x1 == x2 or y1 == y2:
                    continue
                if isinstance(y2 - y1, int) and isinstance(x2 - x1, int):
                    a = canon_value(Fraction(y2 - y1, x2 - x1))
                else:
                    a = canon_value(Fraction(y2 - y1) / Fraction(x2 - x1))
                b = canon_value(y1 - a * x1)
                seen[(a, b)] = None
    else:
        p = field.modulus
        for i, (x1, y1) in enumerate(points):
            for x2, y2 in points[i + 1 :]:
                if x1 == x2 or y1 == y2:
                    continue
                a = (y2 - y1) * pow(x2 - x1, -1, p) % p
                b = (y1 - a * x1) % p
                seen[(a, b)] = None
    out = []
    for a, b in seen:
        g = AffineMap(Scalar(field, a), Scalar(field, b))
        if is_alpha_rich(g, ground, alpha):
            out.append(g)
    out.sort(key=lambda g: (-richness(g, ground), g.sort_key()))
    return out


def rlgp_exact(ground: GroundSet, alpha: Fraction, cap: int | None = None) -> RlgpResult:
    """Maximum general-position subfamily of the alpha-rich lines.

    Exhaustive branch-and-bound over the candidate pool; the bound at
    each node is one line per distinct unused slope plus the chosen
    count.  alpha*|Y| >= 2 keeps the pool finite (every rich line then
    passes through two grid points).
    """
    alpha = Fraction(alpha)
    n = len(ground)
    if alpha * n < 2:
        raise AlphaTooSmall(f"alpha*|Y| = {alpha * n} < 2")
    limit = cap if cap is not None else caps_mod.DEFAULT.oracle_ground
    if n > limit:
        raise CapExceeded(f"|Y| = {n} exceeds cap {limit}")
    cands = _rich_candidates(ground, alpha)
    total = len(cands)

    # one line per slope class at most, so classes bound the optimum
    grouped: dict = {}
    for line in cands:
        grouped.setdefault(line.a, []).append(line)
    classes = sorted(grouped.values(), key=lambda cls: cls[0].sort_key())
    classes.sort(key=lambda cls: -richness(cls[0], ground))

    def compatible(line: AffineMap, chosen: list[AffineMap]) -> bool:
        pts = set()
        for other in chosen:
            x = other.b.sub(line.b).div(line.a.sub(other.a))
            pts.add(x.value)
        return len(pts) == len(chosen)

    # greedy warm start gives the pruning bound teeth from the root
    best: list[AffineMap] = []
    for cls in classes:
        for line in cls:
            if compatible(line, best):
                best.append(line)
                break

    def search(class_idx: int, chosen: list[AffineMap]) -> None:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if class_idx == len(classes):
            return
        if len(chosen) + len(classes) - class_idx <= len(best):
            return
        for line in classes[class_idx]:
            if compatible(line, chosen):
                chosen.append(line)
                search(class_idx + 1, chosen)
                chosen.pop()
        search(class_idx + 1, chosen)

    search(0, [])
    witness = tuple(sorted(best, key=lambda g: g.sort_key()))
    assert general_position_check(list(witness)) == []
    return RlgpResult(value=len(witness), witness=witness, candidate_count=total)


def best_abelian_coset(maps: list[AffineMap]) -> tuple[CosetDescriptor, list[AffineMap]]:
    """Largest subset inside one coset of a maximal abelian subgroup.

    Candidates are the slope classes and the pairwise intersection
    points; grouping the |A|^2 intersections finds the most popular
    point without a cubic rescan.  Translation wins ties.
    """
    if not maps:
        raise ValueError("need at least one map")
    unique = sorted(set(maps), key=lambda g: g.sort_key())
    field = unique[0].field

    by_slope: dict = {}
    for g in unique:
        by_slope.setdefault(g.a.value, []).append(g)
    slope_key = max(by_slope, key=lambda a: (len(by_slope[a]), _neg_key(a)))
    best_slope = by_slope[slope_key]

    raw = [(g.a.value, g.b.value) for g in unique]
    pair_hits: dict = {}
    rational = field.is_rational
    p = None if rational else field.modulus
    for i in range(len(raw)):
        a1, b1 = raw[i]
        for j in range(i + 1, len(raw)):
            a2, b2 = raw[j]
            if a1 == a2:
                continue
            if rational:
                x = canon_value(Fraction(b2 - b1) / Fraction(a1 - a2))
                y = canon_value(a1 * x + b1)
            else:
                x = (b2 - b1) * pow(a1 - a2, -1, p) % p
                y = (a1 * x + b1) % p
            pair_hits[(x, y)] = pair_hits.get((x, y), 0) + 1

    best_point_subset: list[AffineMap] = []
    best_point = None
    if pair_hits:
        point = max(pair_hits, key=lambda pt: (pair_hits[pt], _neg_pair_key(pt)))
        x, y = point
        if rational:
            members = [g for g in unique if g.a.value * x + g.b.value == y]
        else:
            members = [g for g in unique if (g.a.value * x + g.b.value) % p == y]
        best_point = point
        best_point_subset = members

    if len(best_point_subset) > len(best_slope):
        x, y = best_point
        coset = CosetDescriptor.through(Scalar(field, x), Scalar(field, y))
        return coset, best_point_subset
    coset = CosetDescriptor.translations(Scalar(field, slope_key))
    return coset, best_slope


def _neg_key(value):
    """Order helper: prefer the canonically smallest on count ties."""
    return NegOrder(value)


def _neg_pair_key(pair):
    return (NegOrder(pair[0]), NegOrder(pair[1]))


class NegOrder:
    """Wrapper reversing comparisons so max() picks the smallest value."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __lt__(self, other):
        return other.value < self.value

    def __eq__(self, other):
        return self.value == other.value


def sym_fp_oracle(
    ground: GroundSet, alpha: Fraction, cap: int | None = None
) -> SymmetrySet:
    """Scan all p(p-1) maps over F_p and count richness directly."""
    if ground.field.is_rational:
        raise ValueError("full-scan oracle needs a prime field")
    p = ground.field.modulus
    limit = cap if cap is not None else caps_mod.DEFAULT.oracle_modulus
    if p > limit:
        raise CapExceeded(f"p = {p} exceeds cap {limit}")
    alpha = Fraction(alpha)
    n = len(ground)
    threshold = math.ceil(alpha * n)
    index = ground._index
    vals = ground.values
    field = ground.field
    entries = []
    for a in range(1, p):
        for b in range(p):
            count = sum(1 for y in vals if (a * y + b) % p in index)
            if count >= threshold:
                entries.append((AffineMap(Scalar(field, a), Scalar(field, b)), count))
    entries.sort(key=lambda item: item[0].sort_key())
    return SymmetrySet(ground=ground, alpha=alpha, entries=tuple(entries))
