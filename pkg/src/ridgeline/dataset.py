"""Manifest, minutiae and image files.

Manifest CSV (paths relative to the manifest's directory)::

    # ridgeline-manifest v1
    print_id,class,minutiae_path,image_path
    p0001,L,minutiae/p0001.csv,images/p0001.pgm

Class tokens are ``A`` (plain and tented arches merged), ``L`` and ``W``.

Minutiae CSV: one ``x,y,theta`` row per minutia, theta in degrees; comment
lines and an ``x,y,theta`` header row are optional on input.
"""
from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DataError
from .learning.matrix import ClassLabel
from .minutiae import MinutiaCloud

MANIFEST_HEADER = ["print_id", "class", "minutiae_path", "image_path"]
MANIFEST_COMMENT = "# ridgeline-manifest v1"
MINUTIAE_COMMENT = "# ridgeline-minutiae v1"


@dataclass
class PrintRecord:
    print_id: str
    label: ClassLabel
    minutiae_path: Path | None = None
    image_path: Path | None = None

    def __post_init__(self):
        if self.minutiae_path is None and self.image_path is None:
            raise DataError(f"print {self.print_id!r} has neither minutiae nor an image")


@dataclass
class Manifest:
    records: list[PrintRecord]
    name: str = ""
    provenance: str = ""
    root: Path = field(default_factory=Path)

    def __post_init__(self):
        ids = [r.print_id for r in self.records]
        if len(set(ids)) != len(ids):
            raise DataError("manifest print ids must be unique")

    def __len__(self) -> int:
        return len(self.records)

    def resolve(self, path: Path | None) -> Path | None:
        if path is None:
            return None
        return path if path.is_absolute() else self.root / path


def atomic_write(path: Path, data: str | bytes) -> None:
    """Write via a temporary sibling and rename, so readers never see partial files."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"newline": "", "encoding": "utf-8"})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _data_lines(text: str):
    """Yield ``(line_number, line)`` for non-blank, non-comment lines."""
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip() and not line.lstrip().startswith("#"):
            yield lineno, line


def load_manifest(path) -> Manifest:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read manifest {path}: {exc}") from exc
    lines = list(_data_lines(text))
    if not lines:
        raise DataError(f"{path}: manifest is empty")
    lineno, header = lines[0]
    if next(csv.reader([header])) != MANIFEST_HEADER:
        raise DataError(f"{path}, line {lineno}: expected header {','.join(MANIFEST_HEADER)}")
    records, seen = [], set()
    for lineno, line in lines[1:]:
        row = next(csv.reader([line]))
        if len(row) != 4:
            raise DataError(f"{path}, line {lineno}: expected 4 fields, got {len(row)}")
        pid, token, mpath, ipath = (f.strip() for f in row)
        if not pid:
            raise DataError(f"{path}, line {lineno}: empty print_id")
        if pid in seen:
            raise DataError(f"{path}, line {lineno}: duplicate print_id {pid!r}")
        try:
            label = ClassLabel.from_token(token)
        except ValueError:
            raise DataError(f"{path}, line {lineno}: unknown class token {token!r} (expected A, L or W)") from None
        if not mpath and not ipath:
            raise DataError(f"{path}, line {lineno}: print {pid!r} lists neither minutiae nor image")
        seen.add(pid)
        records.append(PrintRecord(pid, label, Path(mpath) if mpath else None, Path(ipath) if ipath else None))
    return Manifest(records, name=path.stem, provenance=str(path), root=path.parent)


def manifest_to_csv(manifest: Manifest) -> str:
    rows = [MANIFEST_COMMENT, ",".join(MANIFEST_HEADER)]
    for r in manifest.records:
        rows.append(",".join([r.print_id, r.label.token,
                              r.minutiae_path.as_posix() if r.minutiae_path else "",
                              r.image_path.as_posix() if r.image_path else ""]))
    return "\n".join(rows) + "\n"


def parse_minutiae_csv(text: str, source: str = "<minutiae>") -> np.ndarray:
    rows = []
    for i, (lineno, line) in enumerate(_data_lines(text)):
        fields = [f.strip() for f in line.split(",")]
        if i == 0 and [f.lower() for f in fields] == ["x", "y", "theta"]:
            continue
        if len(fields) != 3:
            raise DataError(f"{source}, line {lineno}: expected x,y,theta")
        try:
            x, y, theta = (float(f) for f in fields)
        except ValueError:
            raise DataError(f"{source}, line {lineno}: non-numeric field in {line!r}") from None
        if not all(np.isfinite((x, y, theta))):
            raise DataError(f"{source}, line {lineno}: non-finite value")
        rows.append((x, y, theta % 360.0))
    if not rows:
        raise DataError(f"{source}: no minutiae")
    return np.array(rows)


def load_minutiae_csv(path, print_id: str = "") -> MinutiaCloud:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read minutiae file {path}: {exc}") from exc
    return MinutiaCloud(parse_minutiae_csv(text, str(path)), print_id=print_id or path.stem)


def minutiae_to_csv(points) -> str:
    lines = [MINUTIAE_COMMENT, "x,y,theta"]
    lines += [",".join(format(float(v), ".17g") for v in row) for row in np.asarray(points)]
    return "\n".join(lines) + "\n"


def load_image(path) -> np.ndarray:
    """Grayscale image (PGM or PNG) as a float matrix of raw intensities."""
    try:
        with Image.open(path) as im:
            if im.mode not in ("L", "I", "I;16", "F"):
                im = im.convert("L")
            return np.asarray(im, dtype=float)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read image {path}: {exc}") from exc


def image_to_pgm(values) -> bytes:
    arr = np.asarray(values)
    if arr.dtype != np.uint8:
        raise ValueError("PGM output expects 8-bit values")
    rows, cols = arr.shape
    return f"P5\n{cols} {rows}\n255\n".encode("ascii") + arr.tobytes()
