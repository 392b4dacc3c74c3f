"""Size caps guarding the exact enumerations.

Defaults are conservative.  The environment variable RICHLINES_CAPS
overrides individual fields with a comma-separated list of
``name=value`` entries, e.g. ``RICHLINES_CAPS=grid_elements=20000000``.
The CLI flag --unsafe-caps lifts every cap.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

UNLIMITED = 2**62


@dataclass(frozen=True)
class Caps:
    grid_elements: int = 10**7      # generated ground-set size
    symset_ground: int = 64         # |Y| for symmetry-set enumeration
    pipeline_stage: int = 10**3     # |A_j| per pipeline stage
    oracle_ground: int = 12         # |Y| for exhaustive rich-line search
    oracle_modulus: int = 257       # p for the full-scan map oracle
    product_terms: int = 2 * 10**6  # pairwise/triple product enumerations

    def unlimited(self) -> "Caps":
        return Caps(**{f.name: UNLIMITED for f in fields(self)})


def from_env(base: Caps | None = None, env: str | None = None) -> Caps:
    """Apply RICHLINES_CAPS overrides to *base* (ignores unknown names)."""
    caps = base or Caps()
    text = os.environ.get("RICHLINES_CAPS", "") if env is None else env
    known = {f.name for f in fields(Caps)}
    overrides = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, _, value = item.partition("=")
        name = name.strip()
        if name in known and value.strip().isdigit():
            overrides[name] = int(value.strip())
    return replace(caps, **overrides) if overrides else caps


DEFAULT = from_env()
