"""Barcodes and their on-disk CSV/JSON schema.

CSV layout (one row per bar)::

    # ridgeline-barcodes v1
    print_id,source,dim,birth,death

JSON layout::

    {"schema": "ridgeline-barcodes", "version": 1, "print_id": "...",
     "barcodes": [{"source": "d2", "dim": 0, "scale_cap": 1.3,
                   "bars": [[0.0, 0.2], ...]}, ...]}

Floats are written with 17 significant digits so a write/read cycle is exact.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

BARCODE_SCHEMA = "ridgeline-barcodes"
BARCODE_VERSION = 1
CSV_HEADER = ["print_id", "source", "dim", "birth", "death"]


class SchemaError(DataError, ValueError):
    """A barcode or feature artifact does not match its published schema."""


@dataclass
class Barcode:
    """Multiset of ``(birth, death)`` bars in one homological dimension.

    ``scale_cap`` is the filtration value at which essential classes were
    truncated.
    """

    dim: int
    bars: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    scale_cap: float = 0.0

    def __post_init__(self):
        bars = np.asarray(self.bars, dtype=float).reshape(-1, 2)
        if self.dim not in (0, 1):
            raise ValueError(f"only dimensions 0 and 1 are supported, got {self.dim}")
        if not np.all(np.isfinite(bars)):
            raise ValueError("bars must have finite endpoints")
        if (bars[:, 0] > bars[:, 1]).any():
            raise ValueError("every bar needs birth <= death")
        self.bars = bars

    def __len__(self) -> int:
        return len(self.bars)

    @property
    def births(self) -> np.ndarray:
        return self.bars[:, 0]

    @property
    def deaths(self) -> np.ndarray:
        return self.bars[:, 1]

    def sorted_bars(self) -> list[tuple[float, float]]:
        return sorted(map(tuple, self.bars.tolist()))

    def same_bars(self, other: "Barcode") -> bool:
        return self.dim == other.dim and self.sorted_bars() == other.sorted_bars()


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def barcode_label(source: str, dim: int) -> str:
    return f"{source}.H{dim}"


def split_label(label: str) -> tuple[str, int]:
    source, _, dim = label.rpartition(".H")
    if not source or dim not in ("0", "1"):
        raise ValueError(f"malformed barcode label {label!r}")
    return source, int(dim)


def barcodes_to_csv(print_id: str, labeled: dict[str, Barcode]) -> str:
    """Serialize ``{label: Barcode}`` for one print, labels like ``d2.H0``."""
    buf = io.StringIO()
    buf.write(f"# {BARCODE_SCHEMA} v{BARCODE_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for label, bc in labeled.items():
        source, _ = split_label(label)
        for b, d in bc.bars:
            w.writerow([print_id, source, bc.dim, _fmt(b), _fmt(d)])
    return buf.getvalue()


def barcodes_from_csv(text: str) -> dict[tuple[str, str], list[tuple[float, float]]]:
    """Parse the CSV layout into ``{(print_id, label): [(birth, death), ...]}``.

    Raises :class:`SchemaError` on any malformed content.
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != f"# {BARCODE_SCHEMA} v{BARCODE_VERSION}":
        raise SchemaError("missing or unsupported barcode schema header")
    reader = csv.reader(lines[1:])
    header = next(reader, None)
    if header != CSV_HEADER:
        raise SchemaError(f"unexpected barcode CSV header {header!r}")
    out: dict[tuple[str, str], list[tuple[float, float]]] = {}
    for lineno, row in enumerate(reader, start=3):
        if len(row) != 5:
            raise SchemaError(f"line {lineno}: expected 5 fields, got {len(row)}")
        pid, source, dim, birth, death = row
        try:
            b, d = float(birth), float(death)
        except ValueError as exc:
            raise SchemaError(f"line {lineno}: non-numeric endpoint") from exc
        if dim not in ("0", "1") or not (math.isfinite(b) and math.isfinite(d)) or b > d:
            raise SchemaError(f"line {lineno}: invalid bar record")
        key = (pid, barcode_label(source, int(dim)))
        out.setdefault(key, []).append((b, d))
    return out


def barcodes_to_json(print_id: str, labeled: dict[str, Barcode]) -> str:
    payload = {
        "schema": BARCODE_SCHEMA,
        "version": BARCODE_VERSION,
        "print_id": print_id,
        "barcodes": [
            {
                "source": split_label(label)[0],
                "dim": bc.dim,
                "scale_cap": float(bc.scale_cap),
                "bars": bc.bars.tolist(),
            }
            for label, bc in labeled.items()
        ],
    }
    return json.dumps(payload, indent=1)


def barcodes_from_json(text: str) -> tuple[str, dict[str, Barcode]]:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("schema") != BARCODE_SCHEMA:
        raise SchemaError("not a barcode document")
    if payload.get("version") != BARCODE_VERSION:
        raise SchemaError(f"unsupported barcode schema version {payload.get('version')!r}")
    try:
        labeled = {
            barcode_label(entry["source"], int(entry["dim"])): Barcode(
                int(entry["dim"]), entry["bars"], float(entry["scale_cap"])
            )
            for entry in payload["barcodes"]
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed barcode entry: {exc}") from exc
    return str(payload["print_id"]), labeled
