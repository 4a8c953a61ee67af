"""Binary attribute databases: construction, validation, projection, CSV I/O.

A database is an ordered schema of attribute names plus one bit vector per
record.  Bits are stored as a read-only ``(n_records, n_attributes)`` uint8
array so that perturbation and counting stay vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, TextIO

import numpy as np


class ParseError(ValueError):
    """Malformed annotation or CSV input.  ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AlignmentError(ValueError):
    """Two databases that should describe the same records do not."""


def normalize_name(name: str) -> str:
    """Map a human attribute name ("Blond Hair") to its identifier form."""
    return "_".join(name.strip().split())


@dataclass(frozen=True)
class AttributeSchema:
    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not names:
            raise ValueError("schema must contain at least one attribute")
        for name in names:
            if not isinstance(name, str) or not name:
                raise ValueError(f"invalid attribute name {name!r}")
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate attribute names: {dupes}")

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown attribute {name!r}") from None


@dataclass(frozen=True)
class AttributeRecord:
    record_id: str
    values: tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        if any(v not in (0, 1) for v in values):
            raise ValueError(f"record {self.record_id!r}: values must be 0 or 1")
        object.__setattr__(self, "values", values)


class AttributeDatabase:
    """Immutable table of binary attributes keyed by record id."""

    __slots__ = ("schema", "record_ids", "bits")

    def __init__(self, schema: AttributeSchema | Sequence[str], record_ids: Sequence[str], bits):
        if not isinstance(schema, AttributeSchema):
            schema = AttributeSchema(tuple(schema))
        record_ids = tuple(record_ids)
        arr = np.asarray(bits)
        if arr.size == 0:
            arr = np.zeros((len(record_ids), len(schema)), dtype=np.uint8)
        if arr.ndim != 2 or arr.shape != (len(record_ids), len(schema)):
            raise ValueError(
                f"bits shape {arr.shape} does not match "
                f"({len(record_ids)} records, {len(schema)} attributes)"
            )
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("attribute values must be 0 or 1")
        if len(set(record_ids)) != len(record_ids):
            seen: set[str] = set()
            dup = next(r for r in record_ids if r in seen or seen.add(r))
            raise ValueError(f"duplicate record_id {dup!r}")
        arr = np.array(arr, dtype=np.uint8, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "record_ids", record_ids)
        object.__setattr__(self, "bits", arr)

    def __setattr__(self, key, value):
        raise AttributeError("AttributeDatabase is immutable")

    @classmethod
    def from_records(cls, names: Sequence[str], records: Iterable[AttributeRecord]) -> "AttributeDatabase":
        records = list(records)
        schema = AttributeSchema(tuple(names))
        for rec in records:
            if len(rec.values) != len(schema):
                raise ValueError(
                    f"record {rec.record_id!r} has {len(rec.values)} values, schema has {len(schema)}"
                )
        bits = np.array([rec.values for rec in records], dtype=np.uint8).reshape(len(records), len(schema))
        return cls(schema, [rec.record_id for rec in records], bits)

    @property
    def names(self) -> tuple[str, ...]:
        return self.schema.names

    def __len__(self) -> int:
        return len(self.record_ids)

    def __iter__(self) -> Iterator[AttributeRecord]:
        for rid, row in zip(self.record_ids, self.bits):
            yield AttributeRecord(rid, tuple(int(v) for v in row))

    @property
    def records(self) -> list[AttributeRecord]:
        return list(self)

    def column(self, name: str) -> np.ndarray:
        return self.bits[:, self.schema.index(name)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, AttributeDatabase):
            return NotImplemented
        return (
            self.schema == other.schema
            and self.record_ids == other.record_ids
            and np.array_equal(self.bits, other.bits)
        )

    def __repr__(self) -> str:
        return f"AttributeDatabase({len(self)} records, attributes={list(self.names)})"


def _read_text(source: TextIO | str) -> str:
    return source if isinstance(source, str) else source.read()


def parse_celeba_attributes(source: TextIO | str) -> AttributeDatabase:
    """Parse a CelebA-style ``list_attr_celeba.txt`` annotation file.

    Layout: record count, then whitespace-separated attribute names, then one
    row per record with the id followed by a ``-1``/``1`` token per attribute.
    ``-1`` becomes bit 0 and ``1`` becomes bit 1.
    """
    lines = _read_text(source).splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError("empty input: missing record count", line=1)
    try:
        declared = int(lines[0].strip())
    except ValueError:
        raise ParseError(f"record count {lines[0].strip()!r} is not an integer", line=1) from None
    if declared < 0:
        raise ParseError("record count must be non-negative", line=1)
    if len(lines) < 2 or not lines[1].split():
        raise ParseError("empty attribute name line", line=2)
    names = lines[1].split()
    try:
        schema = AttributeSchema(tuple(names))
    except ValueError as exc:
        raise ParseError(str(exc), line=2) from None

    rows = lines[2:]
    if len(rows) != declared:
        raise ParseError(f"declared {declared} records but found {len(rows)} data rows")

    k = len(schema)
    ids: list[str] = []
    seen: set[str] = set()
    bits = np.empty((declared, k), dtype=np.uint8)
    for i, line in enumerate(rows):
        lineno = i + 3
        tokens = line.split()
        if not tokens:
            raise ParseError("blank data row", line=lineno)
        rid, labels = tokens[0], tokens[1:]
        if len(labels) != k:
            raise ParseError(f"record {rid!r} has {len(labels)} labels, expected {k}", line=lineno)
        for j, tok in enumerate(labels):
            if tok == "1":
                bits[i, j] = 1
            elif tok == "-1":
                bits[i, j] = 0
            else:
                raise ParseError(
                    f"record {rid!r}, attribute {names[j]!r}: token {tok!r} not in {{-1, 1}}",
                    line=lineno,
                )
        if rid in seen:
            raise ParseError(f"duplicate record_id {rid!r}", line=lineno)
        seen.add(rid)
        ids.append(rid)
    return AttributeDatabase(schema, ids, bits)


def parse_csv(source: TextIO | str) -> AttributeDatabase:
    """Parse the normalized CSV dialect written by :func:`write_csv`."""
    lines = _read_text(source).splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError("empty input: missing header row", line=1)
    header = lines[0].split(",")
    if header[0] != "record_id":
        raise ParseError(f"first header cell must be 'record_id', got {header[0]!r}", line=1)
    try:
        schema = AttributeSchema(tuple(header[1:]))
    except ValueError as exc:
        raise ParseError(str(exc), line=1) from None

    k = len(schema)
    n = len(lines) - 1
    ids: list[str] = []
    seen: set[str] = set()
    bits = np.empty((n, k), dtype=np.uint8)
    for i, line in enumerate(lines[1:]):
        lineno = i + 2
        cells = line.split(",")
        if len(cells) != k + 1:
            raise ParseError(f"row has {len(cells)} cells, expected {k + 1}", line=lineno)
        rid = cells[0]
        if not rid:
            raise ParseError("empty record_id", line=lineno)
        for j, cell in enumerate(cells[1:]):
            if cell == "1":
                bits[i, j] = 1
            elif cell == "0":
                bits[i, j] = 0
            else:
                raise ParseError(
                    f"record {rid!r}, attribute {schema.names[j]!r}: non-binary cell {cell!r}",
                    line=lineno,
                )
        if rid in seen:
            raise ParseError(f"duplicate record_id {rid!r}", line=lineno)
        seen.add(rid)
        ids.append(rid)
    return AttributeDatabase(schema, ids, bits)


def write_csv(db: AttributeDatabase) -> str:
    for name in db.names:
        if "," in name or "\n" in name:
            raise ValueError(f"attribute name {name!r} cannot be written as CSV")
    for rid in db.record_ids:
        if "," in rid or "\n" in rid or "\r" in rid:
            raise ValueError(f"record_id {rid!r} contains a comma or newline")
    out = ["record_id," + ",".join(db.names)]
    digits = np.where(db.bits == 1, "1", "0")
    for rid, row in zip(db.record_ids, digits):
        out.append(rid + "," + ",".join(row))
    return "\n".join(out) + "\n"


def select_attributes(db: AttributeDatabase, names: Sequence[str]) -> AttributeDatabase:
    """Project ``db`` onto ``names`` (in that order).  Spaces in names are
    treated as underscores."""
    names = [normalize_name(n) for n in names]
    idx = [db.schema.index(n) for n in names]
    return AttributeDatabase(AttributeSchema(tuple(names)), db.record_ids, db.bits[:, idx])


def frequency(db: AttributeDatabase, name: str) -> float:
    col = db.column(normalize_name(name))
    if len(db) == 0:
        raise ValueError("frequency of an empty database is undefined")
    return float(np.count_nonzero(col)) / len(db)


def check_aligned(a: AttributeDatabase, b: AttributeDatabase) -> None:
    if a.schema != b.schema:
        raise AlignmentError(f"schemas differ: {list(a.names)} vs {list(b.names)}")
    if a.record_ids != b.record_ids:
        if len(a) != len(b):
            raise AlignmentError(f"record counts differ: {len(a)} vs {len(b)}")
        pos = next(i for i, (x, y) in enumerate(zip(a.record_ids, b.record_ids)) if x != y)
        raise AlignmentError(
            f"record ids differ at position {pos}: {a.record_ids[pos]!r} vs {b.record_ids[pos]!r}"
        )
