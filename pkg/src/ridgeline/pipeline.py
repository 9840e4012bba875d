"""Per-print barcode computation and the on-disk artifact cache.

Layout under the output directory::

    barcodes/<print_id>.json   all barcodes of one print (JSON schema)
    barcodes/<print_id>.csv    the same bars in the CSV schema
    features.csv               one row per print: print_id, class, 552 features
    features.json              the same matrix in JSON
"""
from __future__ import annotations

import csv
import io
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .barcode import Barcode, SchemaError, barcode_label, barcodes_from_json, barcodes_to_csv, barcodes_to_json
from .cubical import image_barcode_suite
from .dataset import Manifest, PrintRecord, atomic_write, load_image, load_minutiae_csv
from .errors import DataError
from .features import COLUMN_NAMES, IMAGE_LABELS, featurize_print
from .learning.matrix import ClassLabel, FeatureMatrix
from .minutiae import METRIC_KINDS, MetricKind, MinutiaCloud, distance_matrix, normalize_cloud
from .rips import rips_persistence

log = logging.getLogger(__name__)

FEATURE_SCHEMA = "ridgeline-features"
FEATURE_VERSION = 1


def minutiae_barcode_suite(cloud: MinutiaCloud, metrics=METRIC_KINDS, max_scale=None) -> dict[str, Barcode]:
    """Rips barcodes of the normalized cloud under each metric, keyed ``<metric>.H<dim>``."""
    normalized = normalize_cloud(cloud)
    out = {}
    for kind in metrics:
        kind = MetricKind(kind)
        h0, h1 = rips_persistence(distance_matrix(normalized, kind), max_scale)
        out[barcode_label(kind.value, 0)] = h0
        out[barcode_label(kind.value, 1)] = h1
    return out


def expected_labels(record: PrintRecord, metrics=METRIC_KINDS) -> list[str]:
    labels = []
    if record.minutiae_path is not None:
        labels += [barcode_label(MetricKind(k).value, d) for k in metrics for d in (0, 1)]
    if record.image_path is not None:
        labels += list(IMAGE_LABELS)
    return labels


def compute_print_barcodes(record: PrintRecord, root: Path, metrics=METRIC_KINDS, max_scale=None) -> dict[str, Barcode]:
    out: dict[str, Barcode] = {}
    if record.minutiae_path is not None:
        path = record.minutiae_path if record.minutiae_path.is_absolute() else root / record.minutiae_path
        out.update(minutiae_barcode_suite(load_minutiae_csv(path, record.print_id), metrics, max_scale))
    if record.image_path is not None:
        path = record.image_path if record.image_path.is_absolute() else root / record.image_path
        out.update(image_barcode_suite(load_image(path)))
    return out


def barcode_path(out_dir: Path, print_id: str) -> Path:
    return Path(out_dir) / "barcodes" / f"{print_id}.json"


def read_cached_barcodes(path: Path, record: PrintRecord, metrics=METRIC_KINDS) -> dict[str, Barcode]:
    """Load and validate one print's barcode JSON; raises :class:`SchemaError`."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    print_id, labeled = barcodes_from_json(text)
    if print_id != record.print_id:
        raise SchemaError(f"{path}: belongs to print {print_id!r}")
    want = expected_labels(record, metrics)
    if sorted(labeled) != sorted(want):
        raise SchemaError(f"{path}: barcode labels do not match the print's sources")
    return labeled


def _compute_task(args):
    record, root, metrics, max_scale = args
    try:
        return record.print_id, compute_print_barcodes(record, root, metrics, max_scale), None
    except (DataError, ValueError) as exc:
        return record.print_id, None, str(exc)


@dataclass
class CacheStats:
    computed: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)
    failed: dict[str, str] = field(default_factory=dict)


def cache_barcodes(manifest: Manifest, out_dir, *, force: bool = False, workers: int = 1,
                   metrics=METRIC_KINDS, max_scale=None) -> CacheStats:
    """Compute and store barcodes for every print not already cached.

    Existing files that fail schema validation are recomputed.  Failures are
    logged per print and do not stop the run.
    """
    out_dir = Path(out_dir)
    try:
        (out_dir / "barcodes").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataError(f"cannot create output directory {out_dir}: {exc}") from exc
    stats = CacheStats()
    todo = []
    for record in manifest.records:
        if record.image_path is None:
            log.warning("print %s has no image; only minutiae barcodes will be computed", record.print_id)
        if record.minutiae_path is None:
            log.warning("print %s has no minutiae; only image barcodes will be computed", record.print_id)
        path = barcode_path(out_dir, record.print_id)
        if not force and path.exists():
            try:
                read_cached_barcodes(path, record, metrics)
                stats.skipped.append(record.print_id)
                continue
            except SchemaError as exc:
                log.warning("recomputing %s: %s", record.print_id, exc)
        todo.append((record, manifest.root, tuple(metrics), max_scale))

    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_compute_task, todo))
    else:
        results = [_compute_task(t) for t in todo]

    for (record, *_), (pid, labeled, error) in zip(todo, results):
        if error is not None:
            log.error("print %s failed: %s", pid, error)
            stats.failed[pid] = error
            continue
        ordered = {label: labeled[label] for label in expected_labels(record, metrics)}
        path = barcode_path(out_dir, pid)
        atomic_write(path, barcodes_to_json(pid, ordered))
        atomic_write(path.with_suffix(".csv"), barcodes_to_csv(pid, ordered))
        stats.computed.append(pid)
        log.info("barcodes computed for %s", pid)
    return stats


def feature_rows(manifest: Manifest, out_dir, metrics=METRIC_KINDS) -> tuple[list[str], list[ClassLabel], np.ndarray]:
    ids, labels, rows = [], [], []
    for record in manifest.records:
        path = barcode_path(out_dir, record.print_id)
        if not path.exists():
            continue
        labeled = read_cached_barcodes(path, record, metrics)
        ids.append(record.print_id)
        labels.append(record.label)
        rows.append(featurize_print(labeled))
    return ids, labels, np.array(rows).reshape(len(rows), len(COLUMN_NAMES))


def features_to_csv(ids, labels, values) -> str:
    buf = io.StringIO()
    buf.write(f"# {FEATURE_SCHEMA} v{FEATURE_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["print_id", "class", *COLUMN_NAMES])
    for pid, label, row in zip(ids, labels, values):
        w.writerow([pid, ClassLabel(label).token, *(format(float(v), ".17g") for v in row)])
    return buf.getvalue()


def features_to_json(ids, labels, values) -> str:
    return json.dumps({
        "schema": FEATURE_SCHEMA,
        "version": FEATURE_VERSION,
        "columns": list(COLUMN_NAMES),
        "rows": [
            {"print_id": pid, "class": ClassLabel(label).token, "values": [float(v) for v in row]}
            for pid, label, row in zip(ids, labels, values)
        ],
    })


def parse_features_csv(text: str) -> tuple[FeatureMatrix, list[ClassLabel]]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != f"# {FEATURE_SCHEMA} v{FEATURE_VERSION}":
        raise SchemaError("missing or unsupported feature schema header")
    reader = csv.reader(lines[1:])
    header = next(reader, None)
    if header != ["print_id", "class", *COLUMN_NAMES]:
        raise SchemaError("feature CSV header does not match the canonical column names")
    ids, labels, rows = [], [], []
    for lineno, row in enumerate(reader, start=3):
        if len(row) != len(header):
            raise SchemaError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            labels.append(ClassLabel.from_token(row[1]))
            values = [float(v) for v in row[2:]]
        except ValueError as exc:
            raise SchemaError(f"line {lineno}: {exc}") from exc
        if not all(np.isfinite(values)):
            raise SchemaError(f"line {lineno}: non-finite feature value")
        ids.append(row[0])
        rows.append(values)
    values = np.array(rows, dtype=float).reshape(len(rows), len(COLUMN_NAMES))
    return FeatureMatrix(values, list(COLUMN_NAMES), row_ids=ids), labels


def load_features(path) -> tuple[FeatureMatrix, list[ClassLabel]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read feature file {path}: {exc}") from exc
    return parse_features_csv(text)


def cache_features(manifest: Manifest, out_dir, *, force: bool = False, metrics=METRIC_KINDS) -> Path:
    """Write ``features.csv``/``features.json`` from cached barcodes.

    An existing, valid file covering exactly the cached prints is kept
    unless ``force`` is set.
    """
    out_dir = Path(out_dir)
    target = out_dir / "features.csv"
    ids, labels, values = feature_rows(manifest, out_dir, metrics)
    if not ids:
        raise DataError(f"no cached barcodes under {out_dir}; run the 'barcodes' command first")
    if not force and target.exists():
        try:
            fm, _ = load_features(target)
            newest = max(os.path.getmtime(barcode_path(out_dir, pid)) for pid in ids)
            if fm.row_ids == ids and os.path.getmtime(target) >= newest:
                return target
        except SchemaError as exc:
            log.warning("rebuilding %s: %s", target, exc)
    atomic_write(target, features_to_csv(ids, labels, values))
    atomic_write(out_dir / "features.json", features_to_json(ids, labels, values))
    return target


def synthetic_features(params, metrics=METRIC_KINDS, max_scale=None) -> tuple[FeatureMatrix, list[ClassLabel]]:
    """Featurize a synthetic corpus in memory, without touching the disk."""
    from .synthetic import iter_synthetic

    ids, labels, rows = [], [], []
    for sp in iter_synthetic(params):
        labeled = minutiae_barcode_suite(MinutiaCloud(sp.minutiae, sp.print_id), metrics, max_scale)
        labeled.update(image_barcode_suite(sp.image.astype(float)))
        ids.append(sp.print_id)
        labels.append(sp.label)
        rows.append(featurize_print(labeled))
    return FeatureMatrix(np.array(rows), list(COLUMN_NAMES), row_ids=ids), labels
