"""Deterministic report serialization and atomic file writes.

Same inputs must yield byte-identical outputs: JSON is emitted with
sorted keys and fixed separators, CSV with a fixed line terminator, and
scalars in their canonical text form.  Files land via a temp-file
rename so a crash never leaves a half-written report.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from typing import Iterable

from .affine import AffineMap
from .errors import ParseError
from .grid import GroundSet
from .scalar import FieldDescriptor


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True) + "\n"


def csv_text(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow(list(row))
    return buffer.getvalue()


def write_text_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".richlines-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def read_ground_set(path: str) -> GroundSet:
    return GroundSet.from_json(load_json(path))


def write_ground_set(path: str, ground: GroundSet) -> None:
    """Stream the element list so multi-million entry sets stay cheap.

    The byte format matches canonical_json of to_json() exactly.
    """
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".richlines-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write('{"elements":[')
            from .scalar import Scalar

            first = True
            for value in ground.values:
                if not first:
                    handle.write(",")
                first = False
                handle.write(json.dumps(Scalar(ground.field, value).render()))
            handle.write('],"field":')
            handle.write(json.dumps(ground.field.to_json(), sort_keys=True, separators=(",", ":")))
            handle.write("}\n")
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_lines(path: str, field: FieldDescriptor) -> list[AffineMap]:
    payload = load_json(path)
    if not isinstance(payload, list):
        raise ParseError(f"{path}: a line file is a JSON array")
    return [AffineMap.from_json(entry, field) for entry in payload]


def write_lines(path: str, maps: list[AffineMap]) -> None:
    write_text_atomic(path, canonical_json([g.to_json() for g in maps]))
