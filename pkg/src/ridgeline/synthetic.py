"""Seeded synthetic arch/loop/whorl prints: ridge images plus oriented minutiae.

Each print draws a class-specific ridge phase field ``phi(x, y)`` on the
unit square (``x`` along columns, ``y`` down the rows).  The image is
``(1 + cos(2 pi freq phi)) / 2`` plus noise; minutiae sit at uniform random
positions and point along the ridge, i.e. perpendicular to ``grad phi``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .dataset import Manifest, PrintRecord, atomic_write, image_to_pgm, manifest_to_csv, minutiae_to_csv
from .errors import ConfigError
from .learning.matrix import ClassLabel

NIST_FRACTIONS = {ClassLabel.ARCH: 0.053, ClassLabel.LOOP: 0.584, ClassLabel.WHORL: 0.363}


@dataclass(frozen=True)
class SynthParams:
    n_arch: int = 20
    n_loop: int = 20
    n_whorl: int = 20
    n_minutiae: tuple[int, int] = (30, 50)
    image_size: tuple[int, int] = (64, 64)
    ridge_frequency: float = 8.0
    orientation_jitter: float = 10.0
    position_jitter: float = 1.0
    image_noise: float = 0.15
    seed: int = 42

    def __post_init__(self):
        if min(self.n_arch, self.n_loop, self.n_whorl) < 0:
            raise ConfigError("class counts must be non-negative")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        lo, hi = self.n_minutiae
        if not 1 <= lo <= hi:
            raise ConfigError("minutiae count range must satisfy 1 <= min <= max")
        if min(self.image_size) < 1:
            raise ConfigError("image size must be positive")
        if min(self.orientation_jitter, self.position_jitter, self.image_noise) < 0:
            raise ConfigError("noise levels must be non-negative")

    @property
    def total(self) -> int:
        return self.n_arch + self.n_loop + self.n_whorl

    def with_noise(self, factor: float) -> "SynthParams":
        """Scale all three noise amplitudes by ``factor``."""
        return replace(self, orientation_jitter=self.orientation_jitter * factor,
                       position_jitter=self.position_jitter * factor, image_noise=self.image_noise * factor)

    @classmethod
    def nist_like(cls, total: int = 60, **kwargs) -> "SynthParams":
        """Class counts in the 5.3% / 58.4% / 36.3% arch/loop/whorl mix."""
        n_arch = max(1, round(total * NIST_FRACTIONS[ClassLabel.ARCH]))
        n_whorl = round(total * NIST_FRACTIONS[ClassLabel.WHORL])
        return cls(n_arch=n_arch, n_loop=total - n_arch - n_whorl, n_whorl=n_whorl, **kwargs)

    def to_dict(self) -> dict:
        return asdict(self)


class RidgeField:
    """Phase function of one print; ``phase`` accepts broadcastable arrays."""

    def __init__(self, label: ClassLabel, rng: np.random.Generator, frequency: float):
        self.label = label
        self.frequency = frequency
        self.arch_height = rng.uniform(0.08, 0.2)
        self.arch_width = rng.uniform(0.12, 0.2)
        self.arch_center = rng.uniform(0.4, 0.6)
        self.core = (rng.uniform(0.35, 0.65), rng.uniform(0.35, 0.5))
        # one extra ridge per turn keeps the spiral seamless across the branch cut
        self.spiral = rng.choice((-1.0, 1.0)) / frequency
        # loop legs lean left or right below the core
        self.loop_shear = rng.choice((-1.0, 1.0)) * rng.uniform(0.3, 0.8)

    def arch_phase(self, x, y):
        bump = np.exp(-((x - self.arch_center) ** 2) / (2 * self.arch_width**2))
        return y - self.arch_height * bump

    def phase(self, x, y):
        cx, cy = self.core
        r = np.hypot(x - cx, y - cy)
        if self.label is ClassLabel.ARCH:
            return self.arch_phase(x, y)
        if self.label is ClassLabel.WHORL:
            return r + self.spiral * np.arctan2(y - cy, x - cx) / (2 * np.pi)
        # loop: circles around the core above it, parallel sheared legs below;
        # both pieces and their gradients agree on the row through the core
        below = np.maximum(y - cy, 0.0)
        xs = x - cx - self.loop_shear * below**2
        return np.sqrt(xs**2 + np.minimum(y - cy, 0.0) ** 2)

    def gradient(self, x, y, h: float = 1e-6):
        gx = (self.phase(x + h, y) - self.phase(x - h, y)) / (2 * h)
        gy = (self.phase(x, y + h) - self.phase(x, y - h)) / (2 * h)
        return gx, gy

    def tangent_degrees(self, x, y):
        """Ridge direction (perpendicular to the gradient) in degrees, [0, 360)."""
        gx, gy = self.gradient(x, y)
        return np.degrees(np.arctan2(gx, -gy)) % 360.0

    def render(self, rows: int, cols: int) -> np.ndarray:
        y = (np.arange(rows) / max(rows - 1, 1))[:, None]
        x = (np.arange(cols) / max(cols - 1, 1))[None, :]
        return 0.5 * (1.0 + np.cos(2 * np.pi * self.frequency * self.phase(x, y)))


@dataclass
class SyntheticPrint:
    print_id: str
    label: ClassLabel
    minutiae: np.ndarray
    image: np.ndarray
    field: RidgeField
    unit_positions: np.ndarray


def _labels(params: SynthParams) -> list[ClassLabel]:
    return ([ClassLabel.ARCH] * params.n_arch + [ClassLabel.LOOP] * params.n_loop
            + [ClassLabel.WHORL] * params.n_whorl)


def synthesize_print(print_id: str, label: ClassLabel, params: SynthParams, rng: np.random.Generator) -> SyntheticPrint:
    rows, cols = params.image_size
    ridge = RidgeField(label, rng, params.ridge_frequency)

    lo, hi = params.n_minutiae
    n = int(rng.integers(lo, hi + 1))
    unit = rng.uniform(0.05, 0.95, size=(n, 2))
    theta = ridge.tangent_degrees(unit[:, 0], unit[:, 1])
    theta = (theta + rng.uniform(-1.0, 1.0, n) * params.orientation_jitter) % 360.0
    px = unit[:, 0] * (cols - 1) + rng.normal(0.0, 1.0, n) * params.position_jitter
    py = unit[:, 1] * (rows - 1) + rng.normal(0.0, 1.0, n) * params.position_jitter
    minutiae = np.column_stack([px, py, theta])

    clean = ridge.render(rows, cols)
    noisy = clean + rng.normal(0.0, 1.0, clean.shape) * params.image_noise
    image = np.round(np.clip(noisy, 0.0, 1.0) * 255).astype(np.uint8)
    return SyntheticPrint(print_id, label, minutiae, image, ridge, unit)


def iter_synthetic(params: SynthParams):
    labels = _labels(params)
    seeds = np.random.SeedSequence(params.seed).spawn(len(labels))
    for i, (label, seq) in enumerate(zip(labels, seeds), start=1):
        yield synthesize_print(f"p{i:04d}", label, params, np.random.default_rng(seq))


def generate_synthetic(params: SynthParams, out_dir) -> Manifest:
    """Write ``manifest.csv``, ``minutiae/*.csv`` and ``images/*.pgm`` under ``out_dir``."""
    if params.total == 0:
        raise ConfigError("synthetic dataset needs at least one print")
    out_dir = Path(out_dir)
    records = []
    for sp in iter_synthetic(params):
        mpath = Path("minutiae") / f"{sp.print_id}.csv"
        ipath = Path("images") / f"{sp.print_id}.pgm"
        atomic_write(out_dir / mpath, minutiae_to_csv(sp.minutiae))
        atomic_write(out_dir / ipath, image_to_pgm(sp.image))
        records.append(PrintRecord(sp.print_id, sp.label, mpath, ipath))
    manifest = Manifest(records, name="synthetic", provenance=f"synthetic seed={params.seed}", root=out_dir)
    atomic_write(out_dir / "manifest.csv", manifest_to_csv(manifest))
    return manifest
