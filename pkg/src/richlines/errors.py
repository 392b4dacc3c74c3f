"""Exception taxonomy shared by all modules.

Errors fall into two families: input/usage problems (subclasses of
RichlinesError) and InvariantViolation, which signals that a
theorem-backed runtime assertion failed and therefore the build itself
is defective.  The CLI maps the former to exit code 1 and the latter to
exit code 2.
"""


class RichlinesError(Exception):
    """Base class for all library errors."""


class DescriptorMismatch(RichlinesError):
    """Operands belong to different fields."""


class DivisionByZero(RichlinesError):
    """Division or inversion of a zero field element."""


class ParseError(RichlinesError):
    """Malformed scalar, line, or set text."""


class CapExceeded(RichlinesError):
    """A configured size cap would be exceeded."""


class EmptyFamily(RichlinesError):
    """Construction parameters yield no lines."""


class BadIndices(RichlinesError):
    """Index triple outside the valid range."""


class BoxEmpty(RichlinesError):
    """Exponent box for slope enumeration is empty."""


class Exhausted(RichlinesError):
    """No feasible intercept remains below the given bound."""


class NotQPower(RichlinesError):
    """Integer does not factor over the given prime set."""


class AlphaTooSmall(RichlinesError):
    """Richness threshold too small for a finite enumeration."""


class NotSymmetrySubset(RichlinesError):
    """Input maps are not all alpha-rich for the given ground set."""


class IndexOutOfRange(RichlinesError):
    """Relation pair indexes a missing entry."""


class EmptyRelation(RichlinesError):
    """Relation carries no pairs."""


class StageExplosion(RichlinesError):
    """A pipeline stage exceeded the configured size cap."""


class ZeroSlope(RichlinesError):
    """A slope of zero is not an invertible map."""


class NoWitness(RichlinesError):
    """Every candidate commutes; the set is effectively abelian."""


class InvariantViolation(RichlinesError):
    """A theorem-backed runtime assertion failed: implementation bug."""
