"""Acceptance criteria, one test per criterion, each reporting a PASS/FAIL line.

Tolerances are pinned constants below; expected values are closed forms or
come from the independent oracles in ``oracles.py``.
"""
import itertools
import math
import time

import numpy as np
import pytest

from elastica import fixtures
from elastica.closed import Frame2, closing_projection, distance_closed, principal_angles
from elastica.exceptions import NoConvergence
from elastica.curves import Curve, SampledFunction, TangentFunction, angle_lift, resample_arclength
from elastica.geodesic import reconstruct_path
from elastica.kernel import (
    cost_field,
    distance_1d,
    distance_open,
    distance_rotation_invariant,
    dp_match,
    energy,
    match_tangents,
    pairwise_angles,
    rotation_2d,
)
from oracles import brute_force_score, coprime_pairs, subspace_angles_svd

N = 256
TOL_IDENTITY = 1e-6
RUNTIME_LIMIT = 1.0
TOL_ANTIPODAL = 1e-6
TOL_DP = 1e-9
TOL_SPHERE = 1e-9
TOL_ENERGY = 1e-3
TOL_CONSISTENCY = 1e-9
TOL_KERNEL = 1e-12
TOL_REPARAM = 1e-2
TOL_ROTATION = 1e-4
TOL_CLOSED = 1e-4
TRIANGLE_SLACK = 3e-2
TOL_GRASSMANN = 1e-9
TOL_CLOSING_MEAN = 1e-8
TOL_FIXED_POINT = 1e-10
TOL_1D = 1e-6
SIGMAS = (0.5, 1.0, 2.0)

GEODESIC_PAIRS = [
    ("arc", "s_curve"), ("zigzag", "spiral"), ("hook", "arc"), ("plus_x", "plus_y"),
    ("circle", "square"), ("ellipse", "circle"), ("hand1", "hand2"), ("horse1", "horse2"),
]


def tangent(name, n=N):
    return resample_arclength(fixtures.load(name), n)


def segment(direction):
    return np.array([[0.0, 0.0], direction])


def test_identity(verdict):
    worst = max(distance_open(fixtures.load(name), fixtures.load(name), 1.0, N).distance
                for name in fixtures.OPEN + fixtures.CLOSED)
    m = fixtures.load("hand1")
    distance_open(m, m, 1.0, N)
    start = time.perf_counter()
    distance_open(m, m, 1.0, N)
    elapsed = time.perf_counter() - start
    ok = verdict(1, "identity", worst < TOL_IDENTITY and elapsed < RUNTIME_LIMIT,
                 f"max d(m,m) = {worst:.2e}, runtime {elapsed:.3f} s at n={N}")
    assert ok


def test_antipodal_segments(verdict):
    errors = []
    for sigma in SIGMAS:
        expected = 2 * math.acos(max(math.cos(math.pi / (2 * sigma)), 0.0))
        got = distance_open(segment([1, 0]), segment([-1, 0]), sigma, N).distance
        errors.append(abs(got - expected))
    ok = verdict(2, "antipodal segments", max(errors) < TOL_ANTIPODAL,
                 f"max error {max(errors):.2e} over sigma in {SIGMAS}")
    assert ok


def test_dp_matches_enumeration(verdict):
    rng = np.random.default_rng(20240601)
    steps = coprime_pairs(4)
    worst = 0.0
    for trial in range(200):
        n = int(rng.integers(3, 7))
        field = rng.random((n, n))
        if trial % 3 == 0:
            field[rng.random((n, n)) < 0.4] = 0.0
        _, score = dp_match(field)
        worst = max(worst, abs(score - brute_force_score(field, steps)))
    ok = verdict(3, "DP equals exhaustive enumeration", worst < TOL_DP,
                 f"200 fields, max |diff| = {worst:.2e}")
    assert ok


def _geodesics():
    for sigma in SIGMAS:
        for a, b in GEODESIC_PAIRS:
            a0, a1 = tangent(a), tangent(b)
            res = match_tangents(a0, a1, sigma)
            yield sigma, (a, b), a0, a1, res, reconstruct_path(a0, a1, res.phi, sigma, time_steps=64)


@pytest.fixture(scope="module")
def geodesics():
    return list(_geodesics())


def test_sphere_conservation(verdict, geodesics):
    worst = 0.0
    for *_, path in geodesics:
        norms = np.sqrt(np.sum(path.gamma ** 2, axis=2) @ path.widths)
        worst = max(worst, float(np.max(np.abs(norms - 1.0))))
    ok = verdict(4, "sphere conservation", worst < TOL_SPHERE,
                 f"{len(geodesics)} geodesics, max | ||gamma|| - 1 | = {worst:.2e}")
    assert ok


def test_energy_identity(verdict, geodesics):
    worst = 0.0
    for sigma, _, _, _, _, path in geodesics:
        worst = max(worst, abs(energy(path, sigma) - 4 * path.rho ** 2))
    ok = verdict(5, "energy identity U = 4 rho^2", worst < TOL_ENERGY,
                 f"T=64, n={N}, max error {worst:.2e}")
    assert ok


def _crosses_negative_cells(a0, a1, res):
    pieces = res.phi.pieces(a0.n)
    omega = pairwise_angles(a0.samples, a1.samples)[pieces.cell0, pieces.cell1]
    return bool(np.any(np.cos(omega / (2 * res.sigma)) < 0.0))


def test_distance_equals_two_rho(verdict, geodesics):
    worst, checked, bound_only = 0.0, 0, []
    for sigma, names, a0, a1, res, path in geodesics:
        gap = res.distance - 2 * path.rho
        if _crosses_negative_cells(a0, a1, res):
            # only the one-sided bound holds on the lattice here; see the decisions ledger
            bound_only.append((sigma, names))
            assert gap <= TOL_CONSISTENCY
            continue
        worst = max(worst, abs(gap))
        checked += 1
    assert all(s < 1.0 for s, _ in bound_only)
    ok = verdict(6, "distance = 2 rho", worst < TOL_CONSISTENCY,
                 f"{checked} geodesics, max error {worst:.2e}; {len(bound_only)} sigma=1/2 paths "
                 "through clamped cells satisfy d <= 2 rho")
    assert ok


def test_sigma_special_kernels(verdict):
    rng = np.random.default_rng(7)
    th0, th1 = rng.uniform(-np.pi, np.pi, 64), rng.uniform(-np.pi, np.pi, 64)
    a0 = TangentFunction(np.column_stack([np.cos(th0), np.sin(th0)]))
    a1 = TangentFunction(np.column_stack([np.cos(th1), np.sin(th1)]))
    # arbitrary lifts: add random multiples of 2 pi
    delta = (th1 + 2 * np.pi * rng.integers(-3, 4, 64))[None, :] - (th0 + 2 * np.pi * rng.integers(-3, 4, 64))[:, None]
    forms = {
        0.5: np.maximum(a0.samples @ a1.samples.T, 0.0),
        1.0: np.abs(np.cos(delta / 2)),
        2.0: np.maximum(np.abs(np.cos(delta / 4)), np.abs(np.sin(delta / 4))),
    }
    worst = max(float(np.max(np.abs(cost_field(a0, a1, s).values - f))) for s, f in forms.items())
    ok = verdict(7, "sigma-special kernel identities", worst < TOL_KERNEL, f"max entry error {worst:.2e}")
    assert ok


def _warp_points(curve, warp, count=4000):
    """Resample the polygon at arc-length positions ``warp(u)`` for uniform ``u``."""
    pts = curve.polygon()
    cum = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    # corners are not kept, so the resampled polygon differs slightly from the input
    s = warp(np.linspace(0.0, 1.0, count)) * cum[-1]
    return Curve(np.column_stack([np.interp(s, cum, pts[:, k]) for k in range(pts.shape[1])]))


def test_invariances(verdict):
    warps = [lambda u: u ** 2, lambda u: np.sin(np.pi * u / 2), lambda u: u + 0.08 * np.sin(2 * np.pi * u)]
    reparam = 0.0
    for a, b in [("arc", "s_curve"), ("hand1", "spiral"), ("hook", "zigzag"), ("horse1", "arc")]:
        m0, m1 = fixtures.load(a), fixtures.load(b)
        base = distance_open(m0, m1, 1.0, N).distance
        for warp in warps:
            reparam = max(reparam, abs(distance_open(_warp_points(m0, warp), m1, 1.0, N).distance - base))

    rot = 0.0
    for name, c in [("hand1", 1.234), ("s_curve", -2.5), ("horse2", 3.0)]:
        m = fixtures.load(name)
        turned = Curve(m.points @ rotation_2d(c).T, m.closed)
        rot = max(rot, distance_rotation_invariant(m, turned, 1.0, N).distance)

    closed = 0.0
    for name, k, c in [("hand2", 37, 0.7), ("horse1", 200, -1.9), ("ellipse", 5, 2.2)]:
        a = tangent(name)
        closed = max(closed, distance_closed(a, a.shifted(k).rotated(rotation_2d(c)), 1.0, N).distance)

    ok = verdict(8, "invariances", reparam <= TOL_REPARAM and rot < TOL_ROTATION and closed < TOL_CLOSED,
                 f"reparam shift {reparam:.2e}, rotation {rot:.2e}, closed shift+rotate {closed:.2e}")
    assert ok


def test_triangle_inequality(verdict):
    names = fixtures.OPEN + fixtures.CLOSED
    rng = np.random.default_rng(11)
    triples = [tuple(rng.choice(len(names), 3, replace=False)) for _ in range(20)]
    tangents = {i: tangent(names[i]) for t in triples for i in t}
    worst = -math.inf
    for sigma in SIGMAS:
        cache = {}

        def d(i, j):
            if (i, j) not in cache:
                cache[i, j] = match_tangents(tangents[i], tangents[j], sigma).distance
            return cache[i, j]

        for i, j, k in triples:
            worst = max(worst, d(i, k) - d(i, j) - d(j, k))
    ok = verdict(9, "triangle inequality", worst <= TRIANGLE_SLACK,
                 f"20 triples x 3 sigmas, max violation {max(worst, 0.0):.2e}")
    assert ok


def _random_frame(rng, pieces):
    edges = np.concatenate([[0.0], np.sort(rng.uniform(0, 1, pieces - 1)), [1.0]])
    w = np.diff(edges)
    basis = rng.normal(size=(pieces, 2)) * np.sqrt(1.0 / w)[:, None]
    q, _ = np.linalg.qr(basis * np.sqrt(w)[:, None])
    fg = q / np.sqrt(w)[:, None]
    return Frame2(edges, fg[:, 0], fg[:, 1])


def test_grassmann(verdict):
    rng = np.random.default_rng(3)
    same = 0.0
    for _ in range(20):
        F = _random_frame(rng, int(rng.integers(4, 40)))
        ang, _ = principal_angles(F, F.rotated(rng.uniform(0, 2 * np.pi)))
        same = max(same, float(np.sqrt(np.sum(ang ** 2))))
    oracle = 0.0
    for _ in range(100):
        F0, F1 = _random_frame(rng, int(rng.integers(3, 30))), _random_frame(rng, int(rng.integers(3, 30)))
        ang, _ = principal_angles(F0, F1)
        oracle = max(oracle, float(np.max(np.abs(ang - subspace_angles_svd(F0, F1)))))
    ok = verdict(10, "Grassmann distance", same < TOL_GRASSMANN and oracle < TOL_GRASSMANN,
                 f"same subspace {same:.2e}, SVD oracle error {oracle:.2e}")
    assert ok


# a single direction outweighs the rest: the root would sit on a sample
UNCLOSABLE = ("plus_x", "minus_x", "plus_y", "hook")


def test_closing_projection(verdict):
    means = []
    for name in fixtures.OPEN + fixtures.CLOSED:
        if name in UNCLOSABLE:
            with pytest.raises(NoConvergence):
                closing_projection(tangent(name))
            continue
        out = closing_projection(tangent(name))
        means.append(float(np.linalg.norm(out.samples.mean(axis=0))))
    t = 2 * np.pi * (np.arange(N) + 0.5) / N
    circle = TangentFunction(np.column_stack([-np.sin(t), np.cos(t)]), closed=True)
    closed_inputs = [circle] + [closing_projection(tangent(name)) for name in ("hand1", "arc", "square")]
    fixed = max(float(np.max(np.abs(closing_projection(a).samples - a.samples))) for a in closed_inputs)
    ok = verdict(11, "closing projection", max(means) < TOL_CLOSING_MEAN and fixed < TOL_FIXED_POINT,
                 f"max |mean| {max(means):.2e}, fixed-point error {fixed:.2e}")
    assert ok


def _piecewise_linear(rng, knots=7):
    x = np.concatenate([[0.0], np.sort(rng.uniform(0, 1, knots - 2)), [1.0]])
    y = np.cumsum(rng.choice([-1.0, 1.0], knots) * rng.uniform(0.2, 1.0, knots))
    return x, y


def test_one_dimensional(verdict):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(20):
        x, y = _piecewise_linear(rng)
        u = np.linspace(0, 1, 300)
        f0 = np.interp(np.union1d(u, x), x, y)
        # psi(u) = u^p blended with a sine bump, strictly increasing
        p, b = rng.uniform(0.4, 2.5), rng.uniform(-0.1, 0.1)
        psi = np.clip(u ** p + b * np.sin(np.pi * u) * u * (1 - u), 0, 1)
        psi = np.maximum.accumulate(psi)
        f1 = np.interp(np.union1d(psi, x), x, y)
        worst = max(worst, distance_1d(f0, f1, 1.0, N).distance)
    up = np.linspace(0, 1, 50)
    reversed_err = abs(distance_1d(up, up[::-1], 1.0, N).distance - math.pi)
    ok = verdict(12, "one-dimensional case", worst < TOL_1D and reversed_err < TOL_1D,
                 f"max d(f, f o psi) {worst:.2e}, |d(up, down) - pi| {reversed_err:.2e}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
