"""Finite ground sets Y and exact richness counting on the grid Y x Y.

A map g is read as the line y = a*x + b; its richness in Y x Y is
|{y in Y : g(y) in Y}|, which equals the number of grid points on the
line.  Ground sets store raw values (int or Fraction over Q, residues
over F_p) so that the counting loops stay cheap even for the large
generated sets; Scalars appear only at the API boundary.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator

from .affine import AffineMap
from .errors import DescriptorMismatch, ParseError
from .scalar import FieldDescriptor, Scalar, canon_value, parse_scalar


def _canon_rational(value):
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass ints, Fractions, or text")
    return canon_value(Fraction(value))


def _canon_residue(value, p: int):
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass ints, Fractions, or text")
    return int(value) % p


class GroundSet:
    """A sorted, deduplicated finite subset of the field."""

    __slots__ = ("field", "values", "_index", "duplicates_dropped")

    def __init__(self, field: FieldDescriptor, raw_values: Iterable) -> None:
        self.field = field
        if field.is_rational:
            canon = {_canon_rational(v) for v in raw_values}
        else:
            p = field.modulus
            canon = {_canon_residue(v, p) for v in raw_values}
        values = sorted(canon)
        if not values:
            raise ValueError("ground set must be nonempty")
        self.values = tuple(values)
        self._index = frozenset(values)
        self.duplicates_dropped = 0  # set by from_values for load reports

    @staticmethod
    def from_values(field: FieldDescriptor, raw_values: Iterable) -> "GroundSet":
        raw = list(raw_values)
        gs = GroundSet(field, raw)
        gs.duplicates_dropped = len(raw) - len(gs.values)
        return gs

    @staticmethod
    def from_scalars(scalars: Iterable[Scalar]) -> "GroundSet":
        scalars = list(scalars)
        if not scalars:
            raise ValueError("ground set must be nonempty")
        field = scalars[0].field
        for s in scalars:
            if s.field != field:
                raise DescriptorMismatch("mixed fields in ground set")
        return GroundSet.from_values(field, (s.value for s in scalars))

    def __len__(self) -> int:
        return len(self.values)

    def __contains__(self, value) -> bool:
        return value in self._index

    def contains_scalar(self, s: Scalar) -> bool:
        if s.field != self.field:
            raise DescriptorMismatch(f"{s.field} vs {self.field}")
        return canon_value(s.value) in self._index

    def scalars(self) -> Iterator[Scalar]:
        for v in self.values:
            yield Scalar(self.field, v)

    def min_value(self):
        return self.values[0]

    def max_value(self):
        return self.values[-1]

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "elements": [Scalar(self.field, v).render() for v in self.values],
        }

    @staticmethod
    def from_json(obj: dict) -> "GroundSet":
        try:
            field = FieldDescriptor.from_json(obj["field"])
            elements = obj["elements"]
        except (KeyError, TypeError) as exc:
            raise ParseError("bad ground set object") from exc
        return GroundSet.from_values(
            field, (parse_scalar(t, field).value for t in elements)
        )

    def __repr__(self) -> str:
        return f"GroundSet({self.field!r}, n={len(self)})"


def _check_field(g: AffineMap, ground: GroundSet) -> None:
    if g.field != ground.field:
        raise DescriptorMismatch(f"{g.field} vs {ground.field}")


def richness(g: AffineMap, ground: GroundSet) -> int:
    """|{y in Y : a*y + b in Y}|, one membership probe per element."""
    _check_field(g, ground)
    index = ground._index
    if ground.field.is_rational:
        a = canon_value(g.a.value)
        b = canon_value(g.b.value)
        return sum(1 for y in ground.values if a * y + b in index)
    p = ground.field.modulus
    a = g.a.value
    b = g.b.value
    return sum(1 for y in ground.values if (a * y + b) % p in index)


def image_deficiency(g: AffineMap, ground: GroundSet) -> int:
    """|g(Y) \\ Y|; equals |Y| - richness since affine maps are injective."""
    return len(ground) - richness(g, ground)


def is_alpha_rich(g: AffineMap, ground: GroundSet, alpha: Fraction) -> bool:
    """Exact comparison richness >= alpha * |Y|, no rounding anywhere."""
    return Fraction(richness(g, ground)) >= alpha * len(ground)


def incidence_points(g: AffineMap, ground: GroundSet) -> list:
    """The grid points of Y x Y on the line, as raw (x, y) value pairs."""
    _check_field(g, ground)
    index = ground._index
    out = []
    if ground.field.is_rational:
        a = canon_value(g.a.value)
        b = canon_value(g.b.value)
        for x in ground.values:
            y = a * x + b
            if y in index:
                out.append((x, y))
        return out
    p = ground.field.modulus
    a = g.a.value
    b = g.b.value
    for x in ground.values:
        y = (a * x + b) % p
        if y in index:
            out.append((x, y))
    return out
