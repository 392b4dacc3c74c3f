"""The group of invertible maps x -> a*x + b and its line dictionary.

Each AffineMap is read two ways: as a group element under composition
and as the non-vertical, non-horizontal line y = a*x + b.  Parallel
lines share a slope (a coset of the translation subgroup); concurrent
lines share a point (a coset of a point stabilizer).  Slope zero is
excluded by the type invariant since such maps are not invertible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DescriptorMismatch, ParseError, ZeroSlope
from .scalar import FieldDescriptor, Scalar, parse_scalar


class _AllPoints:
    """Sentinel fixed-point result for the identity map."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "AllPoints"


ALL_POINTS = _AllPoints()


@dataclass(frozen=True)
class AffineMap:
    a: Scalar
    b: Scalar

    def __post_init__(self) -> None:
        if self.a.field != self.b.field:
            raise DescriptorMismatch("slope and offset in different fields")
        if self.a.is_zero():
            raise ZeroSlope("slope must be nonzero")

    @property
    def field(self) -> FieldDescriptor:
        return self.a.field

    @staticmethod
    def identity(field: FieldDescriptor) -> "AffineMap":
        return AffineMap(Scalar.one(field), Scalar.zero(field))

    @staticmethod
    def of(field: FieldDescriptor, a, b) -> "AffineMap":
        """Build from raw ints/Fractions, reducing into the field."""
        return AffineMap(Scalar(field, a), Scalar(field, b))

    def is_identity(self) -> bool:
        return self.a.is_one() and self.b.is_zero()

    # -- group structure --------------------------------------------------

    def apply(self, x: Scalar) -> Scalar:
        if x.field != self.field:
            raise DescriptorMismatch(f"{x.field} vs {self.field}")
        return self.a.mul(x).add(self.b)

    __call__ = apply

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self after other: (self.compose(other))(x) = self(other(x))."""
        if other.field != self.field:
            raise DescriptorMismatch(f"{other.field} vs {self.field}")
        return AffineMap(self.a.mul(other.a), self.a.mul(other.b).add(self.b))

    def inverse(self) -> "AffineMap":
        ainv = self.a.inv()
        return AffineMap(ainv, ainv.mul(self.b).neg())

    def conjugate(self, h: "AffineMap") -> "AffineMap":
        """self h self^-1."""
        return self.compose(h).compose(self.inverse())

    def commutator(self, h: "AffineMap") -> "AffineMap":
        """self h self^-1 h^-1; always a translation."""
        return self.conjugate(h).compose(h.inverse())

    def fixed_point(self):
        """Solution of a*x + b = x: a Scalar, None, or ALL_POINTS."""
        if self.a.is_one():
            return ALL_POINTS if self.b.is_zero() else None
        one = Scalar.one(self.field)
        return self.b.div(one.sub(self.a))

    # -- ordering and serialization ---------------------------------------

    def sort_key(self):
        return (self.a.sort_key(), self.b.sort_key())

    def to_json(self) -> dict:
        return {"a": self.a.render(), "b": self.b.render()}

    @staticmethod
    def from_json(obj: dict, field: FieldDescriptor) -> "AffineMap":
        try:
            return AffineMap(parse_scalar(obj["a"], field), parse_scalar(obj["b"], field))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad line object {obj!r}") from exc

    def __repr__(self) -> str:
        return f"({self.a.render()})x+({self.b.render()})"


TRANSLATION_COSET = "translation_coset"
CONCURRENCY_COSET = "concurrency_coset"


@dataclass(frozen=True)
class CosetDescriptor:
    """A coset of a maximal abelian subgroup, named by its line geometry.

    translation_coset: all maps of one slope (a parallel line class).
    concurrency_coset: all maps sending x to y (lines through (x, y)).
    """

    kind: str
    slope: Scalar | None = None
    point: tuple[Scalar, Scalar] | None = None

    def __post_init__(self) -> None:
        if self.kind == TRANSLATION_COSET:
            if self.slope is None or self.point is not None:
                raise ValueError("translation coset needs exactly a slope")
            if self.slope.is_zero():
                raise ZeroSlope("coset slope must be nonzero")
        elif self.kind == CONCURRENCY_COSET:
            if self.point is None or self.slope is not None:
                raise ValueError("concurrency coset needs exactly a point")
        else:
            raise ValueError(f"unknown coset kind {self.kind!r}")

    @staticmethod
    def translations(slope: Scalar) -> "CosetDescriptor":
        return CosetDescriptor(TRANSLATION_COSET, slope=slope)

    @staticmethod
    def through(x: Scalar, y: Scalar) -> "CosetDescriptor":
        return CosetDescriptor(CONCURRENCY_COSET, point=(x, y))

    def contains(self, g: AffineMap) -> bool:
        if self.kind == TRANSLATION_COSET:
            return g.a == self.slope
        x, y = self.point
        return g.apply(x) == y

    def shift(self, g: AffineMap) -> "CosetDescriptor":
        """The left translate g*S, again a coset of the same flavor."""
        if self.kind == TRANSLATION_COSET:
            return CosetDescriptor.translations(g.a.mul(self.slope))
        x, y = self.point
        return CosetDescriptor.through(x, g.apply(y))

    def to_json(self) -> dict:
        if self.kind == TRANSLATION_COSET:
            return {"kind": self.kind, "slope": self.slope.render()}
        return {"kind": self.kind, "x": self.point[0].render(), "y": self.point[1].render()}

    def __repr__(self) -> str:
        if self.kind == TRANSLATION_COSET:
            return f"slope={self.slope.render()}"
        return f"point=({self.point[0].render()},{self.point[1].render()})"


PARALLEL_PAIR = "parallel_pair"
CONCURRENT_TRIPLE = "concurrent_triple"


@dataclass(frozen=True)
class GPViolation:
    kind: str
    indices: tuple[int, ...]
    witness: object  # common slope (Scalar) or shared point (Scalar pair)

    def __repr__(self) -> str:
        return f"GPViolation({self.kind}, {self.indices}, {self.witness!r})"


def line_intersection(g: AffineMap, h: AffineMap):
    """Intersection point of two lines, or None when slopes agree."""
    if g.a == h.a:
        return None
    x = h.b.sub(g.b).div(g.a.sub(h.a))
    return (x, g.apply(x))


def classify_coset(maps: list[AffineMap]) -> CosetDescriptor | None:
    """Smallest coset shape covering all maps, if one exists.

    A common slope wins over a common point when both hold.  Two lines
    with distinct slopes always share their unique intersection point.
    """
    if not maps:
        raise ValueError("need at least one map")
    first = maps[0]
    if all(g.a == first.a for g in maps):
        return CosetDescriptor.translations(first.a)
    other = next(g for g in maps if g.a != first.a)
    point = line_intersection(first, other)
    x, y = point
    coset = CosetDescriptor.through(x, y)
    if all(coset.contains(g) for g in maps):
        return coset
    return None


def general_position_check(maps: list[AffineMap]) -> list[GPViolation]:
    """All parallel pairs and concurrency points among the given lines.

    Empty result means general position: no two lines share a slope and
    no three pass through one point.  Duplicates count as parallel.
    Concurrency is found by grouping the exact pairwise intersection
    points; any point hit by two or more pairs names at least three
    distinct lines (each reported violation lists three of them and is
    checkable by a vanishing 3x3 determinant).
    """
    violations: list[GPViolation] = []
    by_slope: dict = {}
    for idx, g in enumerate(maps):
        by_slope.setdefault(g.a, []).append(idx)
    for slope in sorted(by_slope, key=lambda s: s.sort_key()):
        group = by_slope[slope]
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                violations.append(
                    GPViolation(PARALLEL_PAIR, (group[i], group[j]), slope)
                )

    by_point: dict = {}
    n = len(maps)
    for i in range(n):
        for j in range(i + 1, n):
            if maps[i].a == maps[j].a:
                continue
            point = line_intersection(maps[i], maps[j])
            by_point.setdefault(point, set()).update((i, j))
    concurrent = [
        (point, tuple(sorted(members)))
        for point, members in by_point.items()
        if len(members) >= 3
    ]
    concurrent.sort(key=lambda item: (item[0][0].sort_key(), item[0][1].sort_key()))
    for point, members in concurrent:
        violations.append(GPViolation(CONCURRENT_TRIPLE, members[:3], point))
    return violations


def triple_determinant(g: AffineMap, h: AffineMap, k: AffineMap) -> Scalar:
    """det [[a_g, b_g, 1], [a_h, b_h, 1], [a_k, b_k, 1]].

    Zero exactly when the three lines are concurrent or two are parallel.
    """
    ag, bg = g.a, g.b
    ah, bh = h.a, h.b
    ak, bk = k.a, k.b
    return (
        ag.mul(bh.sub(bk))
        .sub(bg.mul(ah.sub(ak)))
        .add(ah.mul(bk).sub(ak.mul(bh)))
    )
