"""Oriented minutiae point clouds, their normalization and pairwise metrics.

A minutia is ``(x, y, theta)`` with pixel coordinates and an orientation in
degrees.  After normalization every coordinate lies in ``[0, 1]`` and the
orientation is a point of the unit circle parametrized by ``[0, 1)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class MetricKind(str, enum.Enum):
    UNORIENTED = "unoriented"
    D1 = "d1"
    D1_ONE_THIRD = "d1_13"
    D1_TWO_THIRDS = "d1_23"
    D2 = "d2"
    D3 = "d3"


METRIC_KINDS: tuple[MetricKind, ...] = tuple(MetricKind)


@dataclass
class MinutiaCloud:
    """Minutiae of one print, stored as an ``(N, 3)`` array of ``x, y, theta``.

    ``normalized`` is False for raw pixel/degree data and True once
    :func:`normalize_cloud` has mapped every column into ``[0, 1]``.
    """

    points: np.ndarray
    print_id: str = ""
    normalized: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"minutiae must be an (N, 3) array, got shape {pts.shape}")
        if len(pts) == 0:
            raise ValueError("a minutiae cloud needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("minutiae coordinates must be finite")
        if self.normalized:
            if pts.min() < 0 or pts.max() > 1:
                raise ValueError("normalized minutiae must lie in [0, 1]")
        elif pts[:, 2].min() < 0 or pts[:, 2].max() >= 360:
            raise ValueError("raw minutia angles must be degrees in [0, 360)")
        self.points = pts

    def __len__(self) -> int:
        return len(self.points)

    @property
    def xs(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def ys(self) -> np.ndarray:
        return self.points[:, 1]

    @property
    def thetas(self) -> np.ndarray:
        return self.points[:, 2]


def _rescale(col: np.ndarray) -> np.ndarray:
    lo, hi = col.min(), col.max()
    if hi == lo:
        return np.zeros_like(col)
    return (col - lo) / (hi - lo)


def normalize_cloud(cloud: MinutiaCloud) -> MinutiaCloud:
    """Min-max scale x and y, and divide angles by the largest observed angle.

    Constant columns map to zero, as does the angle column when every angle
    is zero.
    """
    if cloud.normalized:
        return cloud
    theta = cloud.thetas
    tmax = theta.max()
    theta_n = theta / tmax if tmax > 0 else np.zeros_like(theta)
    pts = np.column_stack([_rescale(cloud.xs), _rescale(cloud.ys), theta_n])
    return MinutiaCloud(pts, print_id=cloud.print_id, normalized=True)


def angular_distance(theta_i, theta_j):
    """Circular distance between normalized angles, in ``[0, 0.5]``."""
    diff = np.abs(np.asarray(theta_i, dtype=float) - np.asarray(theta_j, dtype=float))
    out = np.where(diff <= 0.5, diff, 1.0 - diff)
    return out if out.ndim else float(out)


def _component_gaps(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    dx = np.abs(p[..., 0] - q[..., 0])
    dy = np.abs(p[..., 1] - q[..., 1])
    dt = angular_distance(p[..., 2], q[..., 2])
    return dx, dy, dt


def _combine(kind: MetricKind, dx, dy, dt):
    kind = MetricKind(kind)
    if kind is MetricKind.UNORIENTED:
        return np.sqrt(dx**2 + dy**2)
    if kind is MetricKind.D1:
        return dx + dy + dt
    if kind is MetricKind.D1_ONE_THIRD:
        return (dx + dy) / 3.0 + 2.0 * dt / 3.0
    if kind is MetricKind.D1_TWO_THIRDS:
        return 2.0 * (dx + dy) / 3.0 + dt / 3.0
    if kind is MetricKind.D2:
        return np.sqrt(dx**2 + dy**2 + dt**2)
    if kind is MetricKind.D3:
        # absolute differences keep the l3 formula symmetric
        return np.cbrt(dx**3 + dy**3 + dt**3)
    raise ValueError(f"unknown metric {kind!r}")


def distance(kind: MetricKind, p, q) -> float:
    """Distance between two normalized minutiae ``(x, y, theta)``."""
    dx, dy, dt = _component_gaps(p, q)
    return float(_combine(kind, dx, dy, dt))


def distance_matrix(cloud: MinutiaCloud, kind: MetricKind) -> np.ndarray:
    """Symmetric matrix of pairwise distances with an exact zero diagonal."""
    if not cloud.normalized:
        raise ValueError("distance_matrix expects a normalized cloud")
    pts = cloud.points
    dx, dy, dt = _component_gaps(pts[:, None, :], pts[None, :, :])
    dm = _combine(kind, dx, dy, dt)
    # enforce exact symmetry regardless of evaluation order
    dm = np.triu(dm, 1)
    dm = dm + dm.T
    return dm


def validate_distance_matrix(dm) -> np.ndarray:
    dm = np.asarray(dm, dtype=float)
    if dm.ndim != 2 or dm.shape[0] != dm.shape[1]:
        raise ValueError("distance matrix must be square")
    if not np.all(np.isfinite(dm)) or (dm < 0).any():
        raise ValueError("distance matrix entries must be finite and non-negative")
    if not np.array_equal(dm, dm.T):
        raise ValueError("distance matrix must be symmetric")
    if np.any(np.diag(dm) != 0):
        raise ValueError("distance matrix must have a zero diagonal")
    return dm
