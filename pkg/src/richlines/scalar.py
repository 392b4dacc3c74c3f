"""Exact field arithmetic over Q (arbitrary precision) and F_p.

This is the single numeric substrate of the library.  Rational values
stand in for real and complex content as well: every construction we
handle is rational, so no floating point appears anywhere.

A Scalar pairs a value with a FieldDescriptor; two Scalars interoperate
only if their descriptors match.  Rationals are kept in lowest terms by
fractions.Fraction, residues are kept reduced in [0, p).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import DescriptorMismatch, DivisionByZero, ParseError

RATIONAL = "rational"
PRIME_FIELD = "prime_field"

# Deterministic Miller-Rabin witnesses, exact for n < 3.3 * 10^24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SCALAR_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldDescriptor:
    kind: str
    modulus: int | None = None

    def __post_init__(self) -> None:
        if self.kind == RATIONAL:
            if self.modulus is not None:
                raise ValueError("rational field carries no modulus")
        elif self.kind == PRIME_FIELD:
            if self.modulus is None or self.modulus < 2:
                raise ValueError("prime field needs a modulus >= 2")
            if not is_prime(self.modulus):
                raise ValueError(f"modulus {self.modulus} is not prime")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @property
    def is_rational(self) -> bool:
        return self.kind == RATIONAL

    def to_json(self) -> dict:
        if self.is_rational:
            return {"kind": "rational"}
        return {"kind": "fp", "p": self.modulus}

    @staticmethod
    def from_json(obj: dict) -> "FieldDescriptor":
        kind = obj.get("kind")
        if kind == "rational":
            return RationalField
        if kind == "fp":
            try:
                return FieldDescriptor(PRIME_FIELD, int(obj["p"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad field descriptor {obj!r}") from exc
        raise ParseError(f"bad field descriptor {obj!r}")

    def __repr__(self) -> str:
        return "Q" if self.is_rational else f"F_{self.modulus}"


RationalField = FieldDescriptor(RATIONAL)


def prime_field(p: int) -> FieldDescriptor:
    return FieldDescriptor(PRIME_FIELD, p)


class Scalar:
    """An exact field element: a Fraction over Q or a residue in [0, p)."""

    __slots__ = ("field", "value")

    def __init__(self, field: FieldDescriptor, value) -> None:
        if isinstance(value, float):
            raise TypeError("floats are not exact; pass an int, Fraction, or text")
        object.__setattr__(self, "field", field)
        if field.is_rational:
            object.__setattr__(self, "value", Fraction(value))
        else:
            object.__setattr__(self, "value", int(value) % field.modulus)

    def __setattr__(self, name, val):  # immutable
        raise AttributeError("Scalar is immutable")

    # -- construction helpers -------------------------------------------

    @staticmethod
    def zero(field: FieldDescriptor) -> "Scalar":
        return Scalar(field, 0)

    @staticmethod
    def one(field: FieldDescriptor) -> "Scalar":
        return Scalar(field, 1)

    # -- arithmetic ------------------------------------------------------

    def _check(self, other: "Scalar") -> None:
        if self.field != other.field:
            raise DescriptorMismatch(f"{self.field} vs {other.field}")

    def add(self, other: "Scalar") -> "Scalar":
        self._check(other)
        if self.field.is_rational:
            return Scalar(self.field, self.value + other.value)
        return Scalar(self.field, (self.value + other.value) % self.field.modulus)

    def sub(self, other: "Scalar") -> "Scalar":
        self._check(other)
        if self.field.is_rational:
            return Scalar(self.field, self.value - other.value)
        return Scalar(self.field, (self.value - other.value) % self.field.modulus)

    def mul(self, other: "Scalar") -> "Scalar":
        self._check(other)
        if self.field.is_rational:
            return Scalar(self.field, self.value * other.value)
        return Scalar(self.field, (self.value * other.value) % self.field.modulus)

    def div(self, other: "Scalar") -> "Scalar":
        return self.mul(other.inv())

    def neg(self) -> "Scalar":
        return Scalar(self.field, -self.value)

    def inv(self) -> "Scalar":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        if self.field.is_rational:
            return Scalar(self.field, 1 / self.value)
        return Scalar(self.field, pow(self.value, -1, self.field.modulus))

    __add__ = add
    __sub__ = sub
    __mul__ = mul
    __truediv__ = div
    __neg__ = neg

    # -- predicates and ordering ------------------------------------------

    def is_zero(self) -> bool:
        return self.value == 0

    def is_one(self) -> bool:
        return self.value == 1

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Scalar)
            and self.field == other.field
            and self.value == other.value
        )

    def __hash__(self) -> int:
        if self.field.is_rational:
            return hash((self.value.numerator, self.value.denominator))
        return hash((self.field.modulus, self.value))

    def sort_key(self):
        """Canonical order: rationals by value, residues by representative."""
        return self.value

    def __lt__(self, other: "Scalar") -> bool:
        self._check(other)
        return self.value < other.value

    def __le__(self, other: "Scalar") -> bool:
        self._check(other)
        return self.value <= other.value

    # -- text forms --------------------------------------------------------

    def render(self) -> str:
        if self.field.is_rational:
            v = self.value
            if v.denominator == 1:
                return str(v.numerator)
            return f"{v.numerator}/{v.denominator}"
        return str(self.value)

    def __repr__(self) -> str:
        return f"Scalar({self.field!r}, {self.render()})"


def parse_scalar(text: str, field: FieldDescriptor) -> Scalar:
    """Parse an optionally signed integer or "num/den" fraction.

    Over F_p a fraction is evaluated as a field division, so "1/2" in
    F_7 yields 4.  A denominator that reduces to zero mod p raises
    DivisionByZero.
    """
    m = _SCALAR_RE.match(text.strip())
    if not m:
        raise ParseError(f"not a scalar: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ParseError(f"zero denominator: {text!r}")
    if field.is_rational:
        return Scalar(field, Fraction(num, den))
    return Scalar(field, num).div(Scalar(field, den))


def parse_fraction(text: str) -> Fraction:
    """Parse an exact rational parameter such as an alpha threshold."""
    m = _SCALAR_RE.match(text.strip())
    if not m or (m.group(2) and int(m.group(2)) == 0):
        raise ParseError(f"not a rational: {text!r}")
    return Fraction(int(m.group(1)), int(m.group(2)) if m.group(2) else 1)


def canon_value(value):
    """Collapse integral Fractions to int; hash/eq stay compatible."""
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value
