"""Cost fields, the reparametrization dynamic program and curve distances.

The distance between unit-tangent functions a0, a1 is

    d = 2 * arccos( sup_phi  int sqrt(phi'(s)) * f(s, phi(s)) ds ),
    f(s, s~) = cos(omega(s, s~) / (2 sigma)),

with omega the angle between a0(s) and a1(s~).  ``f`` is replaced by
``max(f, 0)``: a path forced through a rectangle where f < 0 can cross it
almost horizontally or vertically at vanishing cost.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import _dp
from .curves import DEFAULT_GRID, Curve, SampledFunction, TangentFunction, resample_arclength, sign_representation
from .exceptions import BadGrid, BadSigma, DegeneratePath, DimensionMismatch, GridMismatch

DEFAULT_KMAX = 4
ROTATION_GRID = 64
GOLDEN_TOL = 1e-10
PROCRUSTES_MAX_ITER = 50
PROCRUSTES_TOL = 1e-8


def check_sigma(sigma: float) -> float:
    sigma = float(sigma)
    if not np.isfinite(sigma) or 2.0 * sigma < 1.0:
        raise BadSigma(f"sigma must satisfy 2*sigma >= 1, got {sigma!r}")
    return sigma


# --------------------------------------------------------------------------- fields


def pairwise_angles(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Angles between unit vectors ``x[i]`` and ``y[j]``, in [0, pi].

    ``2 atan2(|x - y|, |x + y|)`` keeps full relative accuracy near 0 and pi,
    where ``arccos`` of the dot product loses half the digits.
    """
    diff = np.linalg.norm(x[:, None, :] - y[None, :, :], axis=-1)
    summ = np.linalg.norm(x[:, None, :] + y[None, :, :], axis=-1)
    return 2.0 * np.arctan2(diff, summ)


def angles(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row-wise angles between unit vectors ``x[k]`` and ``y[k]``."""
    return 2.0 * np.arctan2(np.linalg.norm(x - y, axis=-1), np.linalg.norm(x + y, axis=-1))


def kernel(omega, sigma: float):
    return np.cos(np.asarray(omega) / (2.0 * sigma))


@dataclass(frozen=True)
class CostField:
    """``values[i, j] = max(f(s_i, s~_j), 0)`` on the midpoint grid."""

    values: np.ndarray
    sigma: float
    clamped: bool = True

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def to_csv(self, path) -> None:
        np.savetxt(path, self.values, delimiter=",", fmt="%.17g")


def _check_pair(a0: TangentFunction, a1: TangentFunction) -> None:
    if a0.dim != a1.dim:
        raise DimensionMismatch(f"dimensions differ: {a0.dim} vs {a1.dim}")
    if a0.n != a1.n:
        raise GridMismatch(f"grid sizes differ: {a0.n} vs {a1.n}")


def cost_field(a0: TangentFunction, a1: TangentFunction, sigma: float) -> CostField:
    sigma = check_sigma(sigma)
    _check_pair(a0, a1)
    values = np.maximum(kernel(pairwise_angles(a0.samples, a1.samples), sigma), 0.0)
    return CostField(values, sigma)


# --------------------------------------------------------------------------- diffeos


@dataclass(frozen=True)
class Pieces:
    """Partition of [0, 1] on which a matched pair is piecewise constant.

    Piece ``k`` spans ``[edges[k], edges[k+1]]`` in s; a0 is read in cell
    ``cell0[k]``, a1 o phi in cell ``cell1[k]`` and phi has slope ``slope[k]``.
    """

    edges: np.ndarray
    cell0: np.ndarray
    cell1: np.ndarray
    slope: np.ndarray

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def __len__(self) -> int:
        return len(self.cell0)


@dataclass(frozen=True)
class Diffeo:
    """Piecewise-linear increasing map of [0, 1] through ``knots`` (s, s~)."""

    knots: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.knots, dtype=float)
        if k.ndim != 2 or k.shape[1] != 2 or len(k) < 2:
            raise ValueError("knots must have shape (m >= 2, 2)")
        if np.any(k[0] != 0.0) or np.any(k[-1] != 1.0):
            raise ValueError("knots must start at (0, 0) and end at (1, 1)")
        if np.any(np.diff(k, axis=0) <= 0):
            raise ValueError("knots must be strictly increasing in both coordinates")
        object.__setattr__(self, "knots", k)

    @classmethod
    def identity(cls) -> "Diffeo":
        return cls(np.array([[0.0, 0.0], [1.0, 1.0]]))

    @classmethod
    def from_lattice(cls, nodes: np.ndarray, n: int) -> "Diffeo":
        return cls(np.asarray(nodes, dtype=float) / n)

    def __call__(self, s):
        return np.interp(s, self.knots[:, 0], self.knots[:, 1])

    def derivative(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        slopes = np.diff(self.knots[:, 1]) / np.diff(self.knots[:, 0])
        idx = np.clip(np.searchsorted(self.knots[:, 0], s, side="right") - 1, 0, len(slopes) - 1)
        return slopes[idx]

    def inverse(self) -> "Diffeo":
        return Diffeo(self.knots[:, ::-1])

    def pieces(self, n: int) -> Pieces:
        """Split the graph of phi where it crosses the lines s = i/n or s~ = j/n."""
        s0, t0 = self.knots[:-1, 0], self.knots[:-1, 1]
        s1, t1 = self.knots[1:, 0], self.knots[1:, 1]
        slope = (t1 - t0) / (s1 - s0)
        cuts = [self.knots[:, 0], np.arange(1, n) / n]
        lines = np.arange(1, n) / n
        for a, b, c, d, m in zip(s0, s1, t0, t1, slope):
            inner = lines[(lines > c) & (lines < d)]
            cuts.append(a + (inner - c) / m)
        edges = np.unique(np.clip(np.concatenate(cuts), 0.0, 1.0))
        widths = np.diff(edges)
        keep = widths > 1e-15
        mids = 0.5 * (edges[:-1] + edges[1:])[keep]
        lo = edges[:-1][keep]
        edges = np.append(lo, 1.0)
        piece = np.clip(np.searchsorted(self.knots[:, 0], mids, side="right") - 1, 0, len(slope) - 1)
        cell0 = np.minimum((mids * n).astype(np.int64), n - 1)
        cell1 = np.minimum((self(mids) * n).astype(np.int64), n - 1)
        return Pieces(edges, cell0, cell1, slope[piece])


def path_value(values: np.ndarray, phi: Diffeo) -> float:
    """``int sqrt(phi') * g(s, phi(s)) ds`` for piecewise-constant ``g``."""
    pc = phi.pieces(values.shape[0])
    return float(np.sum(pc.widths * np.sqrt(pc.slope) * values[pc.cell0, pc.cell1]))


# --------------------------------------------------------------------------- DP


@lru_cache(maxsize=None)
def coprime_steps(k_max: int = DEFAULT_KMAX) -> tuple:
    """Coprime steps (p, q), 1 <= p, q <= k_max, in tie-break preference order.

    Closest to slope 1 first, then the larger s~ increment (i.e. the
    predecessor with the smaller s~).
    """
    if k_max < 1:
        raise BadGrid(f"k_max must be >= 1, got {k_max}")
    steps = [(p, q) for p in range(1, k_max + 1) for q in range(1, k_max + 1) if math.gcd(p, q) == 1]
    return tuple(sorted(steps, key=lambda st: (abs(st[1] / st[0] - 1.0), -st[1], st[0])))


def _order_steps(steps) -> tuple:
    steps = tuple((int(p), int(q)) for p, q in steps)
    if not steps or any(p < 1 or q < 1 for p, q in steps):
        raise BadGrid("steps must be pairs of positive integers")
    if (1, 1) not in steps:
        raise BadGrid("the step set must contain the diagonal step (1, 1)")
    return tuple(sorted(set(steps), key=lambda st: (abs(st[1] / st[0] - 1.0), -st[1], st[0])))


@lru_cache(maxsize=64)
def _geometry(steps: tuple, n: int):
    di, dj, coef, ncell = _dp.step_geometry(steps, n)
    return np.array(steps, dtype=np.int64), di, dj, coef, ncell


def _resolve_steps(steps, k_max) -> tuple:
    return coprime_steps(k_max) if steps is None else _order_steps(steps)


def dp_match(field, k_max: int = DEFAULT_KMAX, steps=None) -> tuple[Diffeo, float]:
    """Maximize the discretized ``int sqrt(phi') f(s, phi(s)) ds`` over lattice paths.

    ``field`` is a CostField or an (n, n) array of non-negative values.
    Returns the optimal diffeomorphism and the attained value.
    """
    values = field.values if isinstance(field, CostField) else np.asarray(field, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] < 2:
        raise GridMismatch(f"cost field must be n x n with n >= 2, got {values.shape}")
    n = values.shape[0]
    geo = _geometry(_resolve_steps(steps, k_max), n)
    table, back = _dp.dp_table(values, *geo)
    nodes = _dp.backtrack(back, geo[0])
    return Diffeo.from_lattice(nodes, n), float(table[n, n])


def dp_scores(fields: np.ndarray, k_max: int = DEFAULT_KMAX, steps=None) -> np.ndarray:
    """Optimal values only, for a stack of fields of shape (b, n, n)."""
    fields = np.asarray(fields, dtype=float)
    geo = _geometry(_resolve_steps(steps, k_max), fields.shape[1])
    return _dp.batch_scores(fields, *geo)


# --------------------------------------------------------------------------- distances


def score_to_distance(score: float) -> float:
    return 2.0 * math.acos(min(max(score, 0.0), 1.0))


@dataclass
class MatchResult:
    distance: float
    phi: Diffeo
    score: float
    sigma: float
    rotation: Optional[np.ndarray] = None
    angle: Optional[float] = None
    offset: Optional[float] = None
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "distance": self.distance,
            "score": self.score,
            "sigma": self.sigma,
            "phi": self.phi.knots.tolist(),
            "rotation": None if self.rotation is None else np.asarray(self.rotation).tolist(),
            "offset": self.offset,
        }
        if self.angle is not None:
            out["angle"] = self.angle
        return out


def _as_tangent(m, n: int) -> TangentFunction:
    if isinstance(m, TangentFunction):
        if m.n != n:
            raise GridMismatch(f"tangent function has n = {m.n}, expected {n}")
        return m
    if not isinstance(m, Curve):
        m = Curve(np.asarray(m, dtype=float))
    return resample_arclength(m, n)


def match_tangents(a0: TangentFunction, a1: TangentFunction, sigma: float = 1.0,
                   k_max: int = DEFAULT_KMAX, steps=None) -> MatchResult:
    fld = cost_field(a0, a1, sigma)
    phi, score = dp_match(fld, k_max=k_max, steps=steps)
    return MatchResult(score_to_distance(score), phi, score, fld.sigma)


def distance_open(m0, m1, sigma: float = 1.0, n: int = DEFAULT_GRID, k_max: int = DEFAULT_KMAX) -> MatchResult:
    """Elastic distance between open curves (Curve, point array or TangentFunction)."""
    sigma = check_sigma(sigma)
    return match_tangents(_as_tangent(m0, n), _as_tangent(m1, n), sigma, k_max)


def rotation_2d(c: float) -> np.ndarray:
    return np.array([[math.cos(c), -math.sin(c)], [math.sin(c), math.cos(c)]])


def _rotated_fields(a0: np.ndarray, a1: np.ndarray, sigma: float, cs) -> np.ndarray:
    out = np.empty((len(cs), len(a0), len(a1)))
    for k, c in enumerate(cs):
        ra0 = a0 @ rotation_2d(c).T
        ra0 /= np.linalg.norm(ra0, axis=1, keepdims=True)
        out[k] = np.maximum(kernel(pairwise_angles(ra0, a1), sigma), 0.0)
    return out


def golden_section_max(fun, lo: float, hi: float, tol: float = GOLDEN_TOL):
    """Maximize a scalar function on [lo, hi]; returns (argmax, max) of all evaluations."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = fun(x1), fun(x2)
    best = (x1, f1) if f1 >= f2 else (x2, f2)
    while hi - lo > tol:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = fun(x1)
            if f1 > best[1]:
                best = (x1, f1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = fun(x2)
            if f2 > best[1]:
                best = (x2, f2)
    return best


def rotation_search_2d(a0: TangentFunction, a1: TangentFunction, sigma: float,
                       k_max: int = DEFAULT_KMAX, grid: int = ROTATION_GRID):
    """Best rotation angle of a0: coarse grid on [0, 2 pi), then golden section."""
    cs = 2.0 * np.pi * np.arange(grid) / grid
    scores = dp_scores(_rotated_fields(a0.samples, a1.samples, sigma, cs), k_max=k_max)
    k = int(np.argmax(scores))
    h = 2.0 * np.pi / grid

    def score_at(c):
        return float(dp_scores(_rotated_fields(a0.samples, a1.samples, sigma, [c]), k_max=k_max)[0])

    c, s = golden_section_max(score_at, cs[k] - h, cs[k] + h)
    if scores[k] >= s:
        c, s = float(cs[k]), float(scores[k])
    return float(np.mod(c, 2.0 * np.pi)), s


def kabsch(source: np.ndarray, target: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Proper rotation R maximizing sum_k w_k <R source_k, target_k>."""
    h = (target * weights[:, None]).T @ source
    u, _, vt = np.linalg.svd(h)
    fix = np.ones(len(h))
    fix[-1] = np.sign(np.linalg.det(u @ vt)) or 1.0
    return (u * fix) @ vt


def _rotation_invariant(a0: TangentFunction, a1: TangentFunction, sigma: float, k_max: int) -> MatchResult:
    base = match_tangents(a0, a1, sigma, k_max)
    if a0.dim == 2:
        c, _ = rotation_search_2d(a0, a1, sigma, k_max)
        rot = rotation_2d(c)
        res = match_tangents(a0.rotated(rot), a1, sigma, k_max)
        if res.score < base.score:
            res, rot, c = base, np.eye(2), 0.0
        res.rotation, res.angle = rot, c
        return res
    best, best_rot = base, np.eye(a0.dim)
    current = base
    for _ in range(PROCRUSTES_MAX_ITER):
        pc = current.phi.pieces(a0.n)
        w = pc.widths * np.sqrt(pc.slope)
        rot = kabsch(a0.samples[pc.cell0], a1.samples[pc.cell1], w)
        current = match_tangents(a0.rotated(rot), a1, sigma, k_max)
        improved = best.distance - current.distance
        if improved > 0:
            best, best_rot = current, rot
        if improved < PROCRUSTES_TOL:
            break
    best.rotation = best_rot
    return best


def distance_rotation_invariant(m0, m1, sigma: float = 1.0, n: int = DEFAULT_GRID,
                                k_max: int = DEFAULT_KMAX) -> MatchResult:
    """Distance minimized over rotations R applied to the first curve."""
    sigma = check_sigma(sigma)
    a0, a1 = _as_tangent(m0, n), _as_tangent(m1, n)
    _check_pair(a0, a1)
    return _rotation_invariant(a0, a1, sigma, k_max)


def distance_1d(f0, f1, sigma: float = 1.0, n: int = DEFAULT_GRID, k_max: int = DEFAULT_KMAX) -> MatchResult:
    """Distance between scalar functions modulo increasing reparametrization."""
    sigma = check_sigma(sigma)
    f0 = f0 if isinstance(f0, SampledFunction) else SampledFunction(f0)
    f1 = f1 if isinstance(f1, SampledFunction) else SampledFunction(f1)
    return match_tangents(sign_representation(f0, n), sign_representation(f1, n), sigma, k_max)


# --------------------------------------------------------------------------- energy


def energy(path, sigma: float) -> float:
    """Discretized metamorphosis energy of a path of (dpsi, alpha) snapshots.

    ``path`` needs ``times`` (T+1,), ``dpsi`` (T+1, m), ``alpha`` (T+1, m, d)
    and ``widths`` (m,).  Each time step contributes the squared chord
    ``4 |q_k+1 - q_k|^2 / dt`` with ``q = sqrt(dpsi) * exp(i * tau / (2 sigma))``
    and ``tau`` the great-circle turn of alpha, which splits into
    ``4 (d sqrt(dpsi))^2 + 16 sqrt(dpsi_k dpsi_k+1) sin^2(tau / (4 sigma))``.
    """
    sigma = check_sigma(sigma)
    times = np.asarray(path.times, dtype=float)
    dpsi = np.asarray(path.dpsi, dtype=float)
    alpha = np.asarray(path.alpha, dtype=float)
    widths = np.asarray(path.widths, dtype=float)
    if len(times) < 2:
        raise DegeneratePath("a path needs at least two time points")
    if np.any(~np.isfinite(dpsi)) or np.any(dpsi[1:-1] <= 0.0) or np.any(dpsi < 0.0):
        raise DegeneratePath("dpsi must be positive at interior times")
    dt = np.diff(times)[:, None]
    root = np.sqrt(dpsi)
    first = 4.0 * np.diff(root, axis=0) ** 2
    turn = angles(alpha[1:], alpha[:-1])
    second = 16.0 * root[1:] * root[:-1] * np.sin(turn / (4.0 * sigma)) ** 2
    return float(np.sum((first + second) / dt * widths[None, :]))
