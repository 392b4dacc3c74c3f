"""Exact enumeration of approximate-symmetry sets.

sym_alpha(Y) collects the maps g with |Y intersect gY| >= alpha*|Y|.
For alpha*|Y| >= 2 every member sends two distinct elements of Y into
Y, so the unique map through each (source pair, target pair) choice
enumerates a complete, finite candidate pool; sources run over
unordered pairs and targets over ordered pairs, which covers each
candidate exactly once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import caps as caps_mod
from .affine import AffineMap
from .errors import AlphaTooSmall, CapExceeded, InvariantViolation
from .grid import GroundSet
from .scalar import Scalar, canon_value


@dataclass(frozen=True, eq=False)
class SymmetrySet:
    ground: GroundSet
    alpha: Fraction
    entries: tuple[tuple[AffineMap, int], ...]  # (map, richness), sorted

    @property
    def maps(self) -> tuple[AffineMap, ...]:
        return tuple(g for g, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, g: AffineMap) -> bool:
        return g in {m for m, _ in self.entries}

    def richness_of(self, g: AffineMap) -> int:
        for m, count in self.entries:
            if m == g:
                return count
        raise KeyError(g)

    def csv_rows(self) -> list[tuple[str, str, int]]:
        return [(g.a.render(), g.b.render(), count) for g, count in self.entries]


def _candidate_pool(ground: GroundSet) -> dict:
    """All maps sending some ordered pair of Y into Y, keyed by raw (a, b)."""
    vals = ground.values
    n = len(vals)
    pool: dict = {}
    if ground.field.is_rational:
        for i in range(n):
            y1 = vals[i]
            for j in range(i + 1, n):
                dy = vals[j] - y1
                for z1 in vals:
                    for z2 in vals:
                        if z1 == z2:
                            continue
                        if isinstance(z2 - z1, int) and isinstance(dy, int):
                            a = canon_value(Fraction(z2 - z1, dy))
                        else:
                            a = canon_value(Fraction(z2 - z1) / Fraction(dy))
                        b = canon_value(z1 - a * y1)
                        pool[(a, b)] = None
    else:
        p = ground.field.modulus
        for i in range(n):
            y1 = vals[i]
            for j in range(i + 1, n):
                inv_dy = pow(vals[j] - y1, -1, p)
                for z1 in vals:
                    for z2 in vals:
                        if z1 == z2:
                            continue
                        a = (z2 - z1) * inv_dy % p
                        b = (z1 - a * y1) % p
                        pool[(a, b)] = None
    return pool


def _count_raw(ground: GroundSet, a, b) -> int:
    index = ground._index
    if ground.field.is_rational:
        return sum(1 for y in ground.values if a * y + b in index)
    p = ground.field.modulus
    return sum(1 for y in ground.values if (a * y + b) % p in index)


def sym_set(ground: GroundSet, alpha: Fraction, cap: int | None = None) -> SymmetrySet:
    """Complete symmetry set for alpha >= 2/|Y| (finite by that bound)."""
    n = len(ground)
    alpha = Fraction(alpha)
    if alpha * n < 2:
        raise AlphaTooSmall(f"alpha = {alpha} < 2/|Y| = 2/{n}")
    limit = cap if cap is not None else caps_mod.DEFAULT.symset_ground
    if n > limit:
        raise CapExceeded(f"|Y| = {n} exceeds cap {limit}")
    threshold = math.ceil(alpha * n)
    field = ground.field
    entries = []
    for a, b in _candidate_pool(ground):
        count = _count_raw(ground, a, b)
        if count >= threshold:
            entries.append((AffineMap(Scalar(field, a), Scalar(field, b)), count))
    entries.sort(key=lambda item: item[0].sort_key())
    return SymmetrySet(ground=ground, alpha=alpha, entries=tuple(entries))


@dataclass(frozen=True)
class SymBoundReport:
    alpha: Fraction
    ground_size: int
    size: int
    cubed_bound: Fraction      # alpha^-3 * |Y|, the complex-side target
    fourth_bound: Fraction     # alpha^-4 * |Y|, the prime-field target
    cauchy_schwarz_bound: Fraction  # alpha^-2 * |Y|^2
    universal_bound: int       # |Y|^4, asserted
    side_condition_ok: bool | None  # |Y| <= (alpha/2) p over F_p, else None

    def to_json(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "ground_size": self.ground_size,
            "size": self.size,
            "cubed_bound": str(self.cubed_bound),
            "fourth_bound": str(self.fourth_bound),
            "cauchy_schwarz_bound": str(self.cauchy_schwarz_bound),
            "universal_bound": self.universal_bound,
            "side_condition_ok": self.side_condition_ok,
        }


def sym_bound_report(
    ground: GroundSet,
    alpha: Fraction,
    cap: int | None = None,
    sym: SymmetrySet | None = None,
) -> SymBoundReport:
    """Measured size against the known bound shapes.

    Only |sym| <= |Y|^4 is asserted; the alpha-power bounds carry
    unknown absolute constants and are reported as plain numbers.
    Pass a precomputed set to skip re-enumeration.
    """
    if sym is None:
        sym = sym_set(ground, alpha, cap)
    n = len(ground)
    size = len(sym)
    universal = n**4
    if size > universal:
        raise InvariantViolation(f"|sym| = {size} above the universal bound {universal}")
    side = None
    if not ground.field.is_rational:
        side = Fraction(n) <= Fraction(alpha, 2) * ground.field.modulus
    return SymBoundReport(
        alpha=Fraction(alpha),
        ground_size=n,
        size=size,
        cubed_bound=alpha**-3 * n,
        fourth_bound=alpha**-4 * n,
        cauchy_schwarz_bound=alpha**-2 * n**2,
        universal_bound=universal,
        side_condition_ok=side,
    )


def sym_group_check(ground: GroundSet, cap: int | None = None) -> bool:
    """True iff the exact-symmetry set is closed under compose and invert."""
    sym = sym_set(ground, Fraction(1), cap)
    members = set(sym.maps)
    for g in members:
        if g.inverse() not in members:
            return False
    for g in members:
        for h in members:
            if g.compose(h) not in members:
                return False
    return True
