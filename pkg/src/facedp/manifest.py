"""Conditioning manifest handed to an attribute-conditioned image generator.

File format (JSON lines): a header object ``{schema, ledger, seed,
created_at}`` followed by one ``{record_id, bits, signed}`` object per
record.  ``signed`` is the -1/1 image of ``bits`` for generators that use the
CelebA label convention.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from typing import Sequence

from .accounting import BudgetLedger
from .attribute_db import AttributeDatabase


class ManifestError(ValueError):
    pass


def to_signed(bits: Sequence[int]) -> list[int]:
    return [1 if b == 1 else -1 for b in bits]


def from_signed(signed: Sequence[int]) -> list[int]:
    return [1 if s == 1 else 0 for s in signed]


def rfc3339(when: dt.datetime) -> str:
    if when.tzinfo is None:
        when = when.replace(tzinfo=dt.timezone.utc)
    return when.astimezone(dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class ManifestRow:
    record_id: str
    bits: tuple
    signed: tuple

    def to_dict(self) -> dict:
        return {"record_id": self.record_id, "bits": list(self.bits), "signed": list(self.signed)}


@dataclass(frozen=True)
class SynthesisManifest:
    schema: tuple[str, ...]
    ledger: dict
    seed: int
    created_at: str
    rows: tuple[ManifestRow, ...] = field(default_factory=tuple)

    def header(self) -> dict:
        return {"schema": list(self.schema), "ledger": self.ledger, "seed": self.seed, "created_at": self.created_at}

    def dumps(self) -> str:
        lines = [json.dumps(self.header(), separators=(",", ":"))]
        lines.extend(json.dumps(r.to_dict(), separators=(",", ":")) for r in self.rows)
        return "\n".join(lines) + "\n"


def emit_manifest(
    perturbed: AttributeDatabase, ledger: BudgetLedger, created_at: dt.datetime | str | None = None
) -> SynthesisManifest:
    missing = [name for name in ledger.entries if name not in perturbed.names]
    if missing:
        raise ValueError(f"ledger attributes not in schema: {missing}")
    if created_at is None:
        created_at = dt.datetime.now(dt.timezone.utc)
    if isinstance(created_at, dt.datetime):
        created_at = rfc3339(created_at)
    rows = tuple(
        ManifestRow(rid, tuple(int(b) for b in row), tuple(to_signed(row)))
        for rid, row in zip(perturbed.record_ids, perturbed.bits.tolist())
    )
    return SynthesisManifest(perturbed.names, ledger.to_dict(), ledger.seed, created_at, rows)


def load_manifest(text: str) -> SynthesisManifest:
    """Parse a manifest file.  Row contents are not validated here; see
    :func:`mock_synthesize`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ManifestError("empty manifest: missing header line")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ManifestError(f"line 1: header is not JSON: {exc}") from None
    missing = {"schema", "ledger", "seed", "created_at"} - set(header)
    if missing:
        raise ManifestError(f"line 1: header missing keys {sorted(missing)}")
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"line {i}: row is not JSON: {exc}") from None
        if not isinstance(obj, dict) or not {"record_id", "bits", "signed"} <= set(obj):
            raise ManifestError(f"line {i}: row must have record_id, bits, signed")
        rows.append(ManifestRow(obj["record_id"], tuple(obj["bits"]), tuple(obj["signed"])))
    return SynthesisManifest(tuple(header["schema"]), header["ledger"], header["seed"], header["created_at"], tuple(rows))


@dataclass
class SynthesisAck:
    rows_ok: int = 0
    rows_failed: int = 0
    acknowledged: list[tuple[str, tuple]] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


def _row_problem(row: ManifestRow, arity: int) -> str | None:
    if not isinstance(row.record_id, str) or not row.record_id:
        return "record_id must be a non-empty string"
    if len(row.bits) != arity:
        return f"{len(row.bits)} bits for a {arity}-attribute schema"
    for j, b in enumerate(row.bits):
        if isinstance(b, bool) or b not in (0, 1):
            return f"bit {j} is {b!r}, not 0/1"
    if list(row.signed) != to_signed(row.bits):
        return "signed encoding does not match bits"
    return None


def mock_synthesize(manifest: SynthesisManifest) -> SynthesisAck:
    """Stand-in generator: accepts each row whose conditioning vector is a
    well-formed bit vector of the schema's arity."""
    ack = SynthesisAck()
    arity = len(manifest.schema)
    for i, row in enumerate(manifest.rows):
        problem = _row_problem(row, arity)
        if problem is None:
            ack.rows_ok += 1
            ack.acknowledged.append((row.record_id, tuple(row.bits)))
        else:
            ack.rows_failed += 1
            ack.diagnostics.append(f"row {i} ({row.record_id!r}): {problem}")
    return ack
