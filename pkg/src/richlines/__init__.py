"""Exact-arithmetic toolkit for rich lines in grids and affine-group growth."""

from .affine import ALL_POINTS, AffineMap, CosetDescriptor, GPViolation
from .affine import classify_coset, general_position_check
from .grid import GroundSet, image_deficiency, is_alpha_rich, richness
from .scalar import FieldDescriptor, RationalField, Scalar, parse_scalar, prime_field

__version__ = "0.1.0"

__all__ = [
    "ALL_POINTS",
    "AffineMap",
    "CosetDescriptor",
    "FieldDescriptor",
    "GPViolation",
    "GroundSet",
    "RationalField",
    "Scalar",
    "classify_coset",
    "general_position_check",
    "image_deficiency",
    "is_alpha_rich",
    "parse_scalar",
    "prime_field",
    "richness",
]
