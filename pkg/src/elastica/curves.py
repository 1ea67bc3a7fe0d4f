"""Curves, unit-tangent functions and their scalar representations.

A curve is reduced to its unit tangent sampled at the cell midpoints
``s_i = (i + 1/2) / n`` of a uniform partition of [0, 1] in normalized arc
length.  Integrals over the parameter domain are then plain averages.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import BadGrid, DimensionMismatch, LiftJump, ZeroLength, ZeroVariation

DEFAULT_GRID = 256
UNIT_TOL = 1e-12


def midpoints(n: int) -> np.ndarray:
    """Cell midpoints of the uniform partition of [0, 1] into ``n`` cells."""
    return (np.arange(n) + 0.5) / n


@dataclass(frozen=True)
class Curve:
    """Ordered points in R^d (d >= 2).  ``closed`` adds the segment last -> first."""

    points: np.ndarray
    closed: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise DimensionMismatch(f"points must be a 2-d array, got shape {pts.shape}")
        if pts.shape[1] < 2:
            raise DimensionMismatch("curves need d >= 2; use SampledFunction for 1-d data")
        if pts.shape[0] < 2:
            raise BadGrid("a curve needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("curve points must be finite")
        object.__setattr__(self, "points", pts)
        if self.length == 0.0:
            raise ZeroLength("all curve points coincide")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def polygon(self) -> np.ndarray:
        pts = self.points
        if self.closed and np.any(pts[-1] != pts[0]):
            pts = np.vstack([pts, pts[:1]])
        return pts

    @property
    def length(self) -> float:
        return float(np.linalg.norm(np.diff(self.polygon(), axis=0), axis=1).sum())


@dataclass(frozen=True)
class TangentFunction:
    """Unit vectors sampled on the midpoint grid of [0, 1]."""

    samples: np.ndarray
    closed: bool = False

    def __post_init__(self):
        a = np.asarray(self.samples, dtype=float)
        if a.ndim != 2 or a.shape[1] < 2:
            raise DimensionMismatch(f"samples must have shape (n, d>=2), got {a.shape}")
        if a.shape[0] < 2:
            raise BadGrid("a tangent function needs n >= 2 samples")
        dev = np.abs(np.linalg.norm(a, axis=1) - 1.0)
        if np.any(~np.isfinite(dev)) or dev.max() > UNIT_TOL:
            raise ValueError(f"tangent samples must be unit vectors (max deviation {dev.max():.3g})")
        object.__setattr__(self, "samples", a)

    @classmethod
    def from_vectors(cls, vectors, closed: bool = False) -> "TangentFunction":
        v = np.asarray(vectors, dtype=float)
        return cls(v / np.linalg.norm(v, axis=1, keepdims=True), closed=closed)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def grid(self) -> np.ndarray:
        return midpoints(self.n)

    def to_points(self, origin=None) -> np.ndarray:
        """Integrate the tangent into a length-1 polyline with ``n + 1`` vertices."""
        pts = np.vstack([np.zeros((1, self.dim)), np.cumsum(self.samples, axis=0) / self.n])
        if origin is not None:
            pts = pts + np.asarray(origin, dtype=float)
        return pts

    def shifted(self, k: int) -> "TangentFunction":
        """Start the parametrization ``k`` cells later (closed curves)."""
        return TangentFunction(np.roll(self.samples, -k, axis=0), closed=self.closed)

    def rotated(self, rotation) -> "TangentFunction":
        rot = np.asarray(rotation, dtype=float)
        out = self.samples @ rot.T
        # rotation matrices from trig functions are orthogonal only to ~1e-16
        out /= np.linalg.norm(out, axis=1, keepdims=True)
        return TangentFunction(out, closed=self.closed)


@dataclass(frozen=True)
class AngleFunction:
    values: np.ndarray

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SampledFunction:
    """Scalar samples of f on a uniform parameter grid of [0, 1]."""

    values: np.ndarray = field()

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size < 2:
            raise BadGrid("a sampled function needs at least two values")
        object.__setattr__(self, "values", v)


def _check_grid(n: int) -> int:
    if int(n) != n or n < 2:
        raise BadGrid(f"grid size must be an integer >= 2, got {n!r}")
    return int(n)


def _piecewise_lookup(cum_lengths: np.ndarray, n: int) -> np.ndarray:
    """Index of the piece containing each midpoint, pieces ending at ``cum_lengths``."""
    idx = np.searchsorted(cum_lengths, midpoints(n), side="left")
    return np.minimum(idx, len(cum_lengths) - 1)


def resample_arclength(curve: Curve, n: int = DEFAULT_GRID) -> TangentFunction:
    """Unit tangent of the length-normalized polygon, sampled at ``n`` midpoints."""
    n = _check_grid(n)
    seg = np.diff(curve.polygon(), axis=0)
    lengths = np.linalg.norm(seg, axis=1)
    keep = lengths > 0
    if not keep.any():
        raise ZeroLength("all curve points coincide")
    seg, lengths = seg[keep], lengths[keep]
    cum = np.cumsum(lengths) / lengths.sum()
    dirs = seg / lengths[:, None]
    return TangentFunction(dirs[_piecewise_lookup(cum, n)], closed=curve.closed)


def angle_lift(a: TangentFunction) -> AngleFunction:
    """Continuous angle representative of a planar tangent, first value in (-pi, pi]."""
    if a.dim != 2:
        raise DimensionMismatch(f"angle lift needs d = 2, got d = {a.dim}")
    x, y = a.samples[:, 0], a.samples[:, 1]
    cross = x[:-1] * y[1:] - y[:-1] * x[1:]
    dot = x[:-1] * x[1:] + y[:-1] * y[1:]
    gaps = np.abs(np.arctan2(cross, dot))
    if np.any(gaps >= np.pi - 1e-9):
        i = int(np.argmax(gaps))
        raise LiftJump(f"ambiguous unwrap between samples {i} and {i + 1} (gap {gaps[i]:.6g})")
    raw = np.arctan2(y, x)
    if raw[0] == -np.pi:
        raw[0] = np.pi
    return AngleFunction(np.unwrap(raw))


def sign_representation(f: SampledFunction, n: int = DEFAULT_GRID) -> TangentFunction:
    """Embed ``sign(df)`` re-sampled in normalized total-variation parameter as (+-1, 0).

    Flat stretches (zero increments) carry no variation and are dropped.
    """
    n = _check_grid(n)
    df = np.diff(f.values)
    keep = df != 0
    if not keep.any():
        raise ZeroVariation("function has zero total variation")
    df = df[keep]
    cum = np.cumsum(np.abs(df))
    cum /= cum[-1]
    signs = np.sign(df)[_piecewise_lookup(cum, n)]
    samples = np.zeros((n, 2))
    samples[:, 0] = signs
    return TangentFunction(samples)


def from_angles(theta, closed: bool = False) -> TangentFunction:
    theta = np.asarray(theta, dtype=float)
    return TangentFunction(np.column_stack([np.cos(theta), np.sin(theta)]), closed=closed)
