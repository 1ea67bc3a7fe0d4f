"""Explicit optimal metamorphoses for a fixed end reparametrization.

For a matched pair the endpoint functions

    q0(s) = (1, 0),   q1(s) = sqrt(phi'(s)) (cos(omega/2 sigma), sin(omega/2 sigma))

lie on the unit sphere of L^2([0, 1], R^2).  The great circle between them is
lifted back to a reparametrization rate ``dpsi = |gamma|^2`` and a rotation of
the tangent inside the plane spanned by a0 and a1 o phi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curves import TangentFunction
from .exceptions import AntipodalPair, DegenerateEndpoints, InvalidLift, LiftJump
from .kernel import Diffeo, Pieces, _check_pair, angles, check_sigma

MEASURABLE = "measurable"
SMOOTH = "smooth"
LIFT_MODES = (MEASURABLE, SMOOTH)
VANISH_TOL = 1e-6


@dataclass(frozen=True)
class SphereFunction:
    """Piecewise-constant map [0, 1] -> R^2; piece k spans edges[k]..edges[k+1]."""

    edges: np.ndarray
    values: np.ndarray

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def inner(self, other: "SphereFunction") -> float:
        if len(self.edges) != len(other.edges) or np.any(self.edges != other.edges):
            raise ValueError("sphere functions live on different partitions")
        return float(np.sum(self.widths * np.sum(self.values * other.values, axis=1)))

    def norm(self) -> float:
        return math.sqrt(self.inner(self))


def default_perpendicular(a: np.ndarray) -> np.ndarray:
    """Deterministic unit vector orthogonal to the unit vector ``a``."""
    d = len(a)
    if d == 2:
        return np.array([-a[1], a[0]])
    for k in range(d):
        e = np.zeros(d)
        e[k] = 1.0
        r = e - a[k] * a
        nr = np.linalg.norm(r)
        if nr > 1.0 / (2.0 * math.sqrt(d)):
            return r / nr
    raise AssertionError("unreachable for a unit vector")


@dataclass(frozen=True)
class EndpointGeometry:
    pieces: Pieces
    start: np.ndarray       # a0 on each piece
    target: np.ndarray      # a1 o phi on each piece
    perp: np.ndarray        # unit vector with target = cos(omega) start + sin(omega) perp
    omega: np.ndarray
    slope: np.ndarray


def _perpendiculars(start, target, omega):
    resid = target - np.cos(omega)[:, None] * start
    norms = np.linalg.norm(resid, axis=1)
    perp = np.empty_like(start)
    ok = norms > 1e-12
    perp[ok] = resid[ok] / norms[ok, None]
    for k in np.flatnonzero(~ok):
        perp[k] = default_perpendicular(start[k])
    # re-orthogonalize against rounding
    perp -= np.sum(perp * start, axis=1)[:, None] * start
    return perp / np.linalg.norm(perp, axis=1, keepdims=True)


def endpoint_geometry(a0: TangentFunction, a1: TangentFunction, phi1: Diffeo,
                      lift_mode: str = MEASURABLE) -> EndpointGeometry:
    _check_pair(a0, a1)
    if lift_mode not in LIFT_MODES:
        raise ValueError(f"lift_mode must be one of {LIFT_MODES}, got {lift_mode!r}")
    pc = phi1.pieces(a0.n)
    start = a0.samples[pc.cell0]
    target = a1.samples[pc.cell1]
    omega = angles(start, target)
    if lift_mode == MEASURABLE:
        perp = _perpendiculars(start, target, omega)
        return EndpointGeometry(pc, start, target, perp, omega, pc.slope)

    # smooth: keep the perpendicular continuous along s and let omega carry a sign
    if a0.dim == 2:
        perp = np.column_stack([-start[:, 1], start[:, 0]])
    else:
        perp = _perpendiculars(start, target, omega)
        for k in range(1, len(perp)):
            ref = perp[k - 1] - np.dot(perp[k - 1], start[k]) * start[k]
            if np.dot(perp[k], ref) < 0:
                perp[k] = -perp[k]
    signed = np.arctan2(np.sum(target * perp, axis=1), np.sum(target * start, axis=1))
    if signed[0] < 0:
        perp, signed = -perp, -signed
    jumps = np.abs(np.diff(signed))
    jumps = np.minimum(jumps, 2.0 * np.pi - jumps)
    if np.any(jumps >= np.pi - 1e-9):
        k = int(np.argmax(jumps))
        raise LiftJump(f"ambiguous continuous lift of omega between pieces {k} and {k + 1}")
    return EndpointGeometry(pc, start, target, perp, np.unwrap(signed), pc.slope)


def _sphere_pair(geo: EndpointGeometry, sigma: float):
    eta1 = geo.omega / (2.0 * sigma)
    root = np.sqrt(geo.slope)
    edges = geo.pieces.edges
    q0 = SphereFunction(edges, np.column_stack([np.ones(len(root)), np.zeros(len(root))]))
    q1 = SphereFunction(edges, root[:, None] * np.column_stack([np.cos(eta1), np.sin(eta1)]))
    return q0, q1


def sphere_angle(q0: SphereFunction, q1: SphereFunction) -> float:
    """Great-circle distance between two unit-norm sphere functions."""
    w = q0.widths
    diff = math.sqrt(float(np.sum(w * np.sum((q1.values - q0.values) ** 2, axis=1))))
    summ = math.sqrt(float(np.sum(w * np.sum((q1.values + q0.values) ** 2, axis=1))))
    return 2.0 * math.atan2(diff, summ)


def sphere_endpoints(a0: TangentFunction, a1: TangentFunction, phi1: Diffeo, sigma: float,
                     lift_mode: str = MEASURABLE):
    """Endpoint sphere functions ``(q0, q1)`` and the angle ``rho`` between them."""
    sigma = check_sigma(sigma)
    q0, q1 = _sphere_pair(endpoint_geometry(a0, a1, phi1, lift_mode), sigma)
    return q0, q1, sphere_angle(q0, q1)


def _great_circle_values(v0, v1, rho, t):
    if rho < 1e-12:
        return v0.copy()
    return (math.sin((1.0 - t) * rho) * v0 + math.sin(t * rho) * v1) / math.sin(rho)


def _check_rho(q0: SphereFunction, q1: SphereFunction, rho: float) -> None:
    if rho >= math.pi - 1e-9:
        raise DegenerateEndpoints(
            "endpoints are antipodal on the sphere: omega / (2 sigma) = pi on the whole domain")
    if rho < 1e-12 and not np.allclose(q0.values, q1.values, atol=1e-9):
        raise DegenerateEndpoints("rho vanishes but the endpoints differ")


def great_circle(q0: SphereFunction, q1: SphereFunction, rho: float, t: float) -> SphereFunction:
    _check_rho(q0, q1, rho)
    if t == 0.0:
        return q0
    if t == 1.0:
        return q1
    return SphereFunction(q0.edges, _great_circle_values(q0.values, q1.values, rho, t))


def pointwise_interpolant(a0s, a1s, t: float) -> np.ndarray:
    """Point at fraction ``t`` of the shortest arc from ``a0s`` to ``a1s`` on S^{d-1}."""
    a0s = np.asarray(a0s, dtype=float)
    a1s = np.asarray(a1s, dtype=float)
    omega = float(angles(a0s[None], a1s[None])[0])
    if omega > math.pi - 1e-8:
        raise AntipodalPair("antipodal unit vectors do not determine a great circle")
    if omega < 1e-8:
        return a0s.copy()
    if t == 1.0:
        return a1s.copy()
    out = (math.sin((1.0 - t) * omega) * a0s + math.sin(t * omega) * a1s) / math.sin(omega)
    return out / np.linalg.norm(out)


@dataclass
class GeodesicPath:
    """Snapshots of the optimal metamorphosis at ``times``.

    Per time: ``gamma`` (m, 2) on the sphere, ``dpsi`` (m,), cumulative ``psi``
    at the piece edges, ``alpha`` (m, d) unit tangents, and ``curves`` the
    integrated length-1 polylines resampled on a uniform output grid.
    """

    times: np.ndarray
    edges: np.ndarray
    gamma: np.ndarray
    dpsi: np.ndarray
    psi: np.ndarray
    alpha: np.ndarray
    curves: np.ndarray
    rho: float
    sigma: float
    validity: list = field(default_factory=list)
    lift_error: float = 0.0

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def to_dict(self) -> dict:
        return {
            "times": self.times.tolist(),
            "rho": self.rho,
            "sigma": self.sigma,
            "curves": self.curves.tolist(),
            "validity": [list(v) for v in self.validity],
        }


def _vanishing_cells(geo, eta1, rho, times, gamma_norms):
    """(time index, cell index) pairs where gamma(t, s) vanishes (dpsi = 0)."""
    bad = set()
    steps = len(times) - 1
    for t_idx, piece in zip(*np.nonzero(gamma_norms < VANISH_TOL)):
        bad.add((int(t_idx), int(geo.pieces.cell0[piece])))
    if 1e-12 <= rho:
        root = np.sqrt(geo.slope)
        tstar = np.arctan2(math.sin(rho), root + math.cos(rho)) / rho
        a = np.sin((1.0 - tstar) * rho)
        b = np.sin(tstar * rho)
        gx = (a + b * root * np.cos(eta1)) / math.sin(rho)
        gy = b * root * np.sin(eta1) / math.sin(rho)
        hit = np.hypot(gx, gy) < VANISH_TOL
        for piece in np.flatnonzero(hit):
            bad.add((int(round(tstar[piece] * steps)), int(geo.pieces.cell0[piece])))
    return sorted(bad)


def reconstruct_path(a0: TangentFunction, a1: TangentFunction, phi1: Diffeo, sigma: float,
                     time_steps: int = 16, lift_mode: str = MEASURABLE, n_out=None,
                     origin=None) -> GeodesicPath:
    """Optimal metamorphosis from a0 to a1 o phi1 sampled at ``time_steps + 1`` times."""
    sigma = check_sigma(sigma)
    if time_steps < 2:
        raise ValueError("time_steps must be >= 2")
    geo = endpoint_geometry(a0, a1, phi1, lift_mode)
    q0, q1 = _sphere_pair(geo, sigma)
    rho = sphere_angle(q0, q1)
    _check_rho(q0, q1, rho)
    eta1 = geo.omega / (2.0 * sigma)
    w = q0.widths
    times = np.linspace(0.0, 1.0, time_steps + 1)

    gamma = np.stack([_great_circle_values(q0.values, q1.values, rho, t) for t in times])
    gamma[0], gamma[-1] = q0.values, q1.values
    dpsi = np.sum(gamma ** 2, axis=2)
    dpsi /= (dpsi @ w)[:, None]
    eta = np.unwrap(np.arctan2(gamma[..., 1], gamma[..., 0]), axis=0)
    eta -= eta[0]

    lift_error = float(np.max(np.abs(eta[-1] - eta1)))
    if lift_error > 1e-3:
        raise InvalidLift(f"final angle misses omega / (2 sigma) by {lift_error:.3g}")

    tau = 2.0 * sigma * eta
    alpha = np.cos(tau)[..., None] * geo.start[None] + np.sin(tau)[..., None] * geo.perp[None]
    alpha /= np.linalg.norm(alpha, axis=2, keepdims=True)
    psi = np.concatenate([np.zeros((len(times), 1)), np.cumsum(dpsi * w, axis=1)], axis=1)
    psi /= psi[:, -1:]

    n_out = a0.n if n_out is None else int(n_out)
    grid = (np.arange(n_out) + 0.5) / n_out
    start = np.zeros(a0.dim) if origin is None else np.asarray(origin, dtype=float)
    curves = np.empty((len(times), n_out + 1, a0.dim))
    for k in range(len(times)):
        idx = np.clip(np.searchsorted(psi[k], grid, side="right") - 1, 0, len(w) - 1)
        curves[k, 0] = start
        curves[k, 1:] = start + np.cumsum(alpha[k, idx], axis=0) / n_out

    validity = _vanishing_cells(geo, eta1, rho, times, np.sqrt(np.sum(gamma ** 2, axis=2)))
    return GeodesicPath(times, geo.pieces.edges, gamma, dpsi, psi, alpha, curves, rho, sigma,
                        validity, lift_error)
