"""Closed curves: offset and rotation invariance, Grassmann frames, closing."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import DEFAULT_GRID, midpoints, AngleFunction, Curve, TangentFunction, angle_lift, resample_arclength
from .exceptions import BadFrame, GridMismatch, NoConvergence, NotClosed
from .kernel import (
    DEFAULT_KMAX,
    ROTATION_GRID,
    Diffeo,
    MatchResult,
    _check_pair,
    _rotated_fields,
    _rotation_invariant,
    check_sigma,
    dp_scores,
    golden_section_max,
    match_tangents,
    pairwise_angles,
    rotation_2d,
)

REFINE_CANDIDATES = 4
# coarse-to-fine offset search: grid size, coarse offsets kept, angle window half-width
COARSE_GRID = 64
COARSE_KEEP = 6
ANGLE_REACH = 3


def _closed_tangent(m, n: int) -> TangentFunction:
    if isinstance(m, TangentFunction):
        if not m.closed:
            raise NotClosed("tangent function is not flagged closed")
        if m.n != n:
            raise GridMismatch(f"tangent function has n = {m.n}, expected {n}")
        return m
    if not isinstance(m, Curve):
        m = Curve(np.asarray(m, dtype=float), closed=True)
    if not m.closed:
        raise NotClosed("curve is not flagged closed")
    return resample_arclength(m, n)


def distance_closed(m0, m1, sigma: float = 1.0, n: int = DEFAULT_GRID, k_max: int = DEFAULT_KMAX,
                    rotation: bool = True, coarse=COARSE_GRID) -> MatchResult:
    """Distance between closed curves, minimized over the starting point of ``m0``
    (all ``n`` grid shifts) and, if ``rotation``, over rotations of ``m0``.

    With rotation and ``n > coarse``, every offset and rotation is first scored
    on a ``coarse`` subsampled grid; only the neighbourhoods of the best
    ``COARSE_KEEP`` coarse offsets are searched at full resolution.  Pass
    ``coarse=None`` for the exhaustive full-grid search.
    """
    sigma = check_sigma(sigma)
    a0, a1 = _closed_tangent(m0, n), _closed_tangent(m1, n)
    _check_pair(a0, a1)

    if not rotation:
        fields = np.stack([np.maximum(np.cos(_angles(a0.shifted(k), a1) / (2 * sigma)), 0.0)
                           for k in range(n)])
        k = int(np.argmax(dp_scores(fields, k_max=k_max)))
        res = match_tangents(a0.shifted(k), a1, sigma, k_max)
        res.offset = k / n
        return res

    if a0.dim != 2:
        best = None
        for k in _candidate_offsets(a0, a1, sigma, k_max, coarse):
            res = _rotation_invariant(a0.shifted(k), a1, sigma, k_max)
            if best is None or res.distance < best.distance:
                best, best.offset = res, k / n
        return best

    cs = 2.0 * np.pi * np.arange(ROTATION_GRID) / ROTATION_GRID
    h = 2.0 * np.pi / ROTATION_GRID
    if coarse and coarse < n:
        ratio = n / coarse
        table = _offset_angle_table(_subsample(a0, coarse), _subsample(a1, coarse), sigma, k_max,
                                    range(coarse), cs)
        keep = np.argsort(-table.max(axis=1), kind="stable")[:COARSE_KEEP]
        reach = int(math.ceil(ratio))
        rows = []
        for kc in keep:
            j = int(np.argmax(table[kc]))
            window = cs[(j + np.arange(-ANGLE_REACH, ANGLE_REACH + 1)) % ROTATION_GRID]
            for k in {(int(round(kc * ratio)) + dk) % n for dk in range(-reach, reach + 1)}:
                scores = dp_scores(_rotated_fields(a0.shifted(k).samples, a1.samples, sigma, window),
                                   k_max=k_max)
                rows.append((k, window, scores))
    else:
        table = _offset_angle_table(a0, a1, sigma, k_max, range(n), cs)
        rows = [(k, cs, table[k]) for k in range(n)]
    rows.sort(key=lambda r: (-_peak_estimate(r[2]), r[0]))

    winner = None
    seen = set()
    for k, angles_k, scores in rows:
        if len(seen) == REFINE_CANDIDATES:
            break
        if k in seen:
            continue
        seen.add(k)
        shifted = a0.shifted(int(k))

        def score_at(c, samples=shifted.samples):
            return float(dp_scores(_rotated_fields(samples, a1.samples, sigma, [c]), k_max=k_max)[0])

        j = int(np.argmax(scores))
        c0, s0 = float(angles_k[j]), float(scores[j])
        c, s = golden_section_max(score_at, c0 - h, c0 + h)
        if s0 >= s:
            c, s = c0, s0
        if winner is None or s > winner[2]:
            winner = (int(k), float(np.mod(c, 2 * np.pi)), s)

    k, c, _ = winner
    rot = rotation_2d(c)
    res = match_tangents(a0.shifted(k).rotated(rot), a1, sigma, k_max)
    res.rotation, res.angle, res.offset = rot, c, k / n
    return res


def _peak_estimate(scores: np.ndarray) -> float:
    """Vertex height of the parabola through the best grid score and its neighbours."""
    j, m = int(np.argmax(scores)), len(scores)
    if m == ROTATION_GRID:  # the full circle of angles wraps around
        left, right = scores[j - 1], scores[(j + 1) % m]
    elif 0 < j < m - 1:
        left, right = scores[j - 1], scores[j + 1]
    else:
        return float(scores[j])
    mid = scores[j]
    curv = left - 2.0 * mid + right
    if curv >= 0.0:
        return float(mid)
    return float(mid - 0.125 * (right - left) ** 2 / curv)


def _subsample(a: TangentFunction, m: int) -> TangentFunction:
    """Tangent read at the ``m`` midpoints of a coarser grid."""
    idx = np.floor(midpoints(m) * a.n).astype(int)
    return TangentFunction(a.samples[idx], closed=a.closed)


def _offset_angle_table(a0, a1, sigma, k_max, offsets, cs) -> np.ndarray:
    return np.stack([dp_scores(_rotated_fields(a0.shifted(k).samples, a1.samples, sigma, cs), k_max=k_max)
                     for k in offsets])


def _candidate_offsets(a0, a1, sigma, k_max, coarse) -> list:
    """Full-grid offsets worth a rotation search in d >= 3."""
    n = a0.n
    if not coarse or coarse >= n:
        return list(range(n))
    c0, c1 = _subsample(a0, coarse), _subsample(a1, coarse)
    scores = [_rotation_invariant(c0.shifted(k), c1, sigma, k_max).score for k in range(coarse)]
    ratio = n / coarse
    reach = int(math.ceil(ratio))
    out = set()
    for kc in np.argsort(-np.asarray(scores), kind="stable")[:COARSE_KEEP]:
        out.update((int(round(kc * ratio)) + dk) % n for dk in range(-reach, reach + 1))
    return sorted(out)


def _angles(a0: TangentFunction, a1: TangentFunction) -> np.ndarray:
    return pairwise_angles(a0.samples, a1.samples)


# --------------------------------------------------------------------------- frames


def _merged(edges_a, edges_b):
    edges = np.union1d(edges_a, edges_b)
    mids = 0.5 * (edges[:-1] + edges[1:])
    ia = np.clip(np.searchsorted(edges_a, mids, side="right") - 1, 0, len(edges_a) - 2)
    ib = np.clip(np.searchsorted(edges_b, mids, side="right") - 1, 0, len(edges_b) - 2)
    return np.diff(edges), ia, ib


@dataclass(frozen=True)
class Frame2:
    """Two piecewise-constant functions on the partition ``edges`` of [0, 1]."""

    edges: np.ndarray
    f: np.ndarray
    g: np.ndarray

    def inner(self, u: np.ndarray, other_edges: np.ndarray, v: np.ndarray) -> float:
        w, iu, iv = _merged(self.edges, other_edges)
        return float(np.sum(w * u[iu] * v[iv]))

    def gram(self) -> np.ndarray:
        w = np.diff(self.edges)
        fg = np.vstack([self.f, self.g])
        return (fg * w) @ fg.T

    def validate(self, tol: float = 1e-6) -> None:
        err = np.abs(self.gram() - np.eye(2)).max()
        if err > tol:
            raise BadFrame(f"(f, g) is not an orthonormal 2-frame (deviation {err:.3g})")

    def rotated(self, a: float) -> "Frame2":
        c, s = math.cos(a), math.sin(a)
        return Frame2(self.edges, c * self.f + s * self.g, -s * self.f + c * self.g)


def frame_from(phi: Diffeo, theta: AngleFunction) -> Frame2:
    """``(sqrt(2 phi') cos(theta o phi / 2), sqrt(2 phi') sin(theta o phi / 2))``."""
    values = np.asarray(theta.values, dtype=float)
    pc = phi.pieces(len(values))
    half = values[pc.cell1] / 2.0
    root = np.sqrt(2.0 * pc.slope)
    return Frame2(pc.edges, root * np.cos(half), root * np.sin(half))


def frame_gram(F0: Frame2, F1: Frame2) -> np.ndarray:
    return np.array([
        [F0.inner(F0.f, F1.edges, F1.f), F0.inner(F0.f, F1.edges, F1.g)],
        [F0.inner(F0.g, F1.edges, F1.f), F0.inner(F0.g, F1.edges, F1.g)],
    ])


def principal_angles(F0: Frame2, F1: Frame2):
    """Principal angles between span(F0) and span(F1), and the 2x2 Gram matrix.

    Cosines come from the singular values of the Gram matrix, sines from the
    residual of F1 after projection on span(F0); pairing them through atan2
    keeps small angles accurate.
    """
    F0.validate()
    F1.validate()
    m = frame_gram(F0, F1)
    cos = np.clip(np.linalg.svd(m, compute_uv=False), 0.0, 1.0)
    w, i0, i1 = _merged(F0.edges, F1.edges)
    basis0 = np.vstack([F0.f[i0], F0.g[i0]])
    basis1 = np.vstack([F1.f[i1], F1.g[i1]])
    resid = basis1 - m.T @ basis0
    rgram = (resid * w) @ resid.T
    sin = np.sqrt(np.clip(np.sort(np.linalg.eigvalsh(rgram)), 0.0, 1.0))
    return np.arctan2(sin, cos), m


def grassmann_distance(F0: Frame2, F1: Frame2) -> float:
    ang, _ = principal_angles(F0, F1)
    return float(math.sqrt(np.sum(ang ** 2)))


def closed_grassmann(a0: TangentFunction, a1: TangentFunction, phi1: Diffeo = None) -> dict:
    """Grassmann distance between the frames of two closed planar curves.

    The second frame is read through ``phi1`` and both constant signs
    (+1, -1) of the frame are evaluated; the smaller distance is kept.
    Resampled polygons rarely close exactly, so both inputs are first passed
    through :func:`closing_projection`.
    """
    phi1 = Diffeo.identity() if phi1 is None else phi1
    a0, a1 = closing_projection(a0), closing_projection(a1)
    F0 = frame_from(Diffeo.identity(), angle_lift(a0))
    F1 = frame_from(phi1, angle_lift(a1))
    best = None
    for eps in (1.0, -1.0):
        Fe = Frame2(F1.edges, eps * F1.f, eps * F1.g)
        ang, gram = principal_angles(F0, Fe)
        dist = float(math.sqrt(np.sum(ang ** 2)))
        if best is None or dist < best["distance"]:
            best = {"distance": dist, "gram": gram, "singular_values": np.cos(ang), "sign": eps}
    return best


# --------------------------------------------------------------------------- closing


def _check_median_off_samples(x: np.ndarray) -> None:
    # lam is the geometric median of the samples; when a repeated direction
    # outweighs the pull of all others the median sits on it and no root exists
    values, counts = np.unique(np.round(x, 12), axis=0, return_counts=True)
    for k in np.flatnonzero(counts > 1):
        diff = values[k] - x
        r = np.linalg.norm(diff, axis=1)
        far = r > 1e-9
        pull = np.linalg.norm(np.sum(diff[far] / r[far, None], axis=0))
        if counts[k] > pull + 1e-9 * len(x):
            raise NoConvergence(
                f"{counts[k]} of {len(x)} samples share one direction; the shift would have to sit on it")


def closing_projection(a: TangentFunction, max_iter: int = 200, return_shift: bool = False):
    """Replace ``a`` by ``(a - lam) / |a - lam|`` with ``lam`` chosen so the mean vanishes.

    ``lam`` solves ``mean((a - lam) / |a - lam|) = 0`` by damped Newton from
    ``lam = mean(a)``.
    """
    x = a.samples
    d = x.shape[1]
    _check_median_off_samples(x)

    def residual(lam):
        diff = x - lam
        r = np.linalg.norm(diff, axis=1)
        if np.any(r < 1e-14):
            raise NoConvergence("shift hit a tangent sample; the projection is undefined")
        u = diff / r[:, None]
        return u.mean(axis=0), u, r

    lam = x.mean(axis=0)
    g, u, r = residual(lam)
    for _ in range(max_iter):
        gn = np.linalg.norm(g)
        if gn < 1e-14:
            break
        jac = -np.mean((np.eye(d)[None] - u[:, :, None] * u[:, None, :]) / r[:, None, None], axis=0)
        try:
            step = -np.linalg.solve(jac, g)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence("singular Jacobian in closing projection") from exc
        t = 1.0
        while True:
            try:
                g_new, u_new, r_new = residual(lam + t * step)
            except NoConvergence:
                g_new = None
            if g_new is not None and np.linalg.norm(g_new) < gn:
                break
            t *= 0.5
            if t < 1e-12:
                break
        if g_new is None or np.linalg.norm(g_new) >= gn:
            break
        lam, g, u, r = lam + t * step, g_new, u_new, r_new
    if np.linalg.norm(g) >= 1e-8:
        raise NoConvergence(f"closing projection stalled at |mean| = {np.linalg.norm(g):.3g}")
    out = TangentFunction(u / np.linalg.norm(u, axis=1, keepdims=True), closed=True)
    return (out, lam) if return_shift else out
