"""Pipeline configuration: a flat ``key = value`` text file.

Blank lines and lines starting with ``#`` are ignored; a ``#`` after a value
starts a comment.  Unknown keys are rejected.  Keys and defaults::

    dataset             manifest path (default: <out>/data/manifest.csv)
    out                 output directory (ridgeline-out)
    seed                synthesis seed (42)
    preset              balanced | nist (balanced)
    total               print count for the nist preset (60)
    n_arch, n_loop, n_whorl   per-class counts for the balanced preset (20 each)
    minutiae_min, minutiae_max  minutiae per print (30, 50)
    image_rows, image_cols      synthetic image size (64, 64)
    ridge_frequency     ridges per unit length (8)
    orientation_jitter  degrees (10)
    position_jitter     pixels (1)
    image_noise         additive noise amplitude (0.15)
    metrics             comma list of minutiae metrics (all six)
    max_scale           auto | positive number (auto: largest pairwise distance)
    window_lo, window_hi  pruning target range (70, 90)
    ridge               relative LDA ridge (1e-6)
    groups              comma list of feature groups (all)
    normalization       fold | global (fold)
    workers             process count (env RIDGELINE_WORKERS, else 1)
"""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError
from .learning.experiment import GROUPS
from .minutiae import METRIC_KINDS, MetricKind
from .synthetic import SynthParams

WORKERS_ENV = "RIDGELINE_WORKERS"


@dataclass(frozen=True)
class PipelineConfig:
    dataset: Path | None = None
    out: Path = Path("ridgeline-out")
    seed: int = 42
    preset: str = "balanced"
    total: int = 60
    n_arch: int = 20
    n_loop: int = 20
    n_whorl: int = 20
    minutiae_min: int = 30
    minutiae_max: int = 50
    image_rows: int = 64
    image_cols: int = 64
    ridge_frequency: float = 8.0
    orientation_jitter: float = 10.0
    position_jitter: float = 1.0
    image_noise: float = 0.15
    metrics: tuple[str, ...] = tuple(k.value for k in METRIC_KINDS)
    max_scale: float | None = None
    window_lo: int = 70
    window_hi: int = 90
    ridge: float = 1e-6
    groups: tuple[str, ...] = ("all",)
    normalization: str = "fold"
    workers: int | None = None

    def __post_init__(self):
        if self.preset not in ("balanced", "nist"):
            raise ConfigError(f"preset must be 'balanced' or 'nist', got {self.preset!r}")
        if self.total < 1:
            raise ConfigError("total must be positive")
        if not 1 <= self.window_lo <= self.window_hi:
            raise ConfigError("window must satisfy 1 <= window_lo <= window_hi")
        if self.ridge < 0:
            raise ConfigError("ridge must be non-negative")
        if self.max_scale is not None and not self.max_scale > 0:
            raise ConfigError("max_scale must be positive")
        if self.normalization not in ("fold", "global"):
            raise ConfigError(f"normalization must be 'fold' or 'global', got {self.normalization!r}")
        if not self.metrics:
            raise ConfigError("at least one metric is required")
        for m in self.metrics:
            if m not in {k.value for k in MetricKind}:
                raise ConfigError(f"unknown metric {m!r}; choose from {', '.join(k.value for k in MetricKind)}")
        if not self.groups:
            raise ConfigError("at least one feature group is required")
        for g in self.groups:
            if g not in GROUPS:
                raise ConfigError(f"unknown feature group {g!r}; choose from {', '.join(GROUPS)}")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be at least 1")
        self.synth_params()

    @property
    def manifest_path(self) -> Path:
        return self.dataset if self.dataset is not None else self.out / "data" / "manifest.csv"

    @property
    def window(self) -> tuple[int, int]:
        return self.window_lo, self.window_hi

    def resolved_workers(self) -> int:
        if self.workers is not None:
            return self.workers
        raw = os.environ.get(WORKERS_ENV, "").strip()
        if not raw:
            return 1
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
        if value < 1:
            raise ConfigError(f"{WORKERS_ENV} must be at least 1")
        return value

    def synth_params(self) -> SynthParams:
        common = dict(
            n_minutiae=(self.minutiae_min, self.minutiae_max),
            image_size=(self.image_rows, self.image_cols),
            ridge_frequency=self.ridge_frequency,
            orientation_jitter=self.orientation_jitter,
            position_jitter=self.position_jitter,
            image_noise=self.image_noise,
            seed=self.seed,
        )
        if self.preset == "nist":
            return SynthParams.nist_like(self.total, **common)
        return SynthParams(n_arch=self.n_arch, n_loop=self.n_loop, n_whorl=self.n_whorl, **common)

    def override(self, **changes) -> "PipelineConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _split_list(value: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in value.split(",") if part.strip())


def _coerce(name: str, raw: str):
    try:
        if name in ("dataset", "out"):
            return Path(raw)
        if name in ("metrics", "groups"):
            return _split_list(raw)
        if name in ("preset", "normalization"):
            return raw
        if name == "max_scale":
            return None if raw.lower() == "auto" else float(raw)
        if name in ("ridge_frequency", "orientation_jitter", "position_jitter", "image_noise", "ridge"):
            return float(raw)
        return int(raw)
    except ValueError:
        raise ConfigError(f"invalid value {raw!r} for {name}") from None


def parse_config(text: str, source: str = "<config>", base: Path | None = None) -> PipelineConfig:
    """Parse the key-value format; relative paths resolve against ``base``."""
    known = {f.name for f in fields(PipelineConfig)}
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        if key not in known:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        value = _coerce(key, raw)
        if base is not None and isinstance(value, Path) and not value.is_absolute():
            value = base / value
        values[key] = value
    return PipelineConfig(**values)


def load_config(path) -> PipelineConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path), base=path.parent)


def config_to_text(cfg: PipelineConfig) -> str:
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if value is None:
            if f.name == "max_scale":
                lines.append("max_scale = auto")
            continue
        if isinstance(value, tuple):
            value = ",".join(value)
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"
