import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elastica import fixtures
from elastica.curves import TangentFunction, from_angles, resample_arclength
from elastica.exceptions import AntipodalPair, DegenerateEndpoints, LiftJump
from elastica.geodesic import (
    MEASURABLE,
    SMOOTH,
    SphereFunction,
    default_perpendicular,
    endpoint_geometry,
    great_circle,
    pointwise_interpolant,
    reconstruct_path,
    sphere_endpoints,
)
from elastica.kernel import Diffeo, match_tangents


def constant(vec, n=16):
    return TangentFunction(np.tile(np.asarray(vec, dtype=float), (n, 1)))


def matched(a, b, sigma=1.0, n=128):
    a0, a1 = resample_arclength(fixtures.load(a), n), resample_arclength(fixtures.load(b), n)
    return a0, a1, match_tangents(a0, a1, sigma)


class TestSphereEndpoints:
    def test_equal_tangents(self):
        a = from_angles(np.linspace(0, 2, 16))
        q0, q1, rho = sphere_endpoints(a, a, Diffeo.identity(), 1.0)
        assert np.array_equal(q0.values, q1.values)
        assert rho == 0.0

    def test_orthogonal_tangents(self):
        q0, q1, rho = sphere_endpoints(constant([1, 0]), constant([0, 1]), Diffeo.identity(), 1.0)
        assert np.allclose(q1.values, [math.cos(math.pi / 4), math.sin(math.pi / 4)], atol=1e-15)
        assert rho == pytest.approx(math.pi / 4, abs=1e-15)

    def test_antipodal_at_half_sigma(self):
        _, _, rho = sphere_endpoints(constant([1, 0]), constant([-1, 0]), Diffeo.identity(), 0.5)
        assert rho == pytest.approx(math.pi, abs=1e-12)

    def test_unit_norm_under_warping(self):
        a0, a1, res = matched("zigzag", "spiral")
        q0, q1, _ = sphere_endpoints(a0, a1, res.phi, 1.0)
        assert q0.norm() == pytest.approx(1.0, abs=1e-12)
        assert q1.norm() == pytest.approx(1.0, abs=1e-12)

    def test_smooth_lift_gives_same_rho(self):
        a0, a1, res = matched("arc", "s_curve")
        rho_m = sphere_endpoints(a0, a1, res.phi, 1.0, MEASURABLE)[2]
        rho_s = sphere_endpoints(a0, a1, res.phi, 1.0, SMOOTH)[2]
        assert rho_s == pytest.approx(rho_m, abs=1e-12)

    def test_smooth_lift_rejects_half_turn_jump(self):
        a1 = TangentFunction(np.array([[1.0, 0], [1, 0], [-1, 0], [-1, 0]]))
        sphere_endpoints(constant([1, 0], 4), a1, Diffeo.identity(), 1.0, MEASURABLE)
        with pytest.raises(LiftJump):
            sphere_endpoints(constant([1, 0], 4), a1, Diffeo.identity(), 1.0, SMOOTH)

    def test_rejects_unknown_lift_mode(self):
        with pytest.raises(ValueError):
            sphere_endpoints(constant([1, 0]), constant([1, 0]), Diffeo.identity(), 1.0, "other")


class TestGreatCircle:
    def setup_method(self):
        edges = np.array([0.0, 0.5, 1.0])
        self.q0 = SphereFunction(edges, np.array([[1.0, 0.0], [1.0, 0.0]]))
        c, s = math.cos(math.pi / 4), math.sin(math.pi / 4)
        self.q1 = SphereFunction(edges, np.array([[c, s], [c, s]]))

    def test_endpoints_exact(self):
        assert great_circle(self.q0, self.q1, math.pi / 4, 0.0) is self.q0
        assert great_circle(self.q0, self.q1, math.pi / 4, 1.0) is self.q1

    def test_midpoint_bisects(self):
        mid = great_circle(self.q0, self.q1, math.pi / 4, 0.5)
        assert np.allclose(mid.values, [math.cos(math.pi / 8), math.sin(math.pi / 8)], atol=1e-15)
        assert mid.norm() == pytest.approx(1.0, abs=1e-15)

    def test_antipodal(self):
        minus = SphereFunction(self.q0.edges, -self.q0.values)
        with pytest.raises(DegenerateEndpoints):
            great_circle(self.q0, minus, math.pi, 0.5)

    def test_zero_rho_with_distinct_endpoints(self):
        with pytest.raises(DegenerateEndpoints):
            great_circle(self.q0, self.q1, 0.0, 0.5)

    def test_discrete_energy(self):
        a0, a1, res = matched("hook", "zigzag")
        q0, q1, rho = sphere_endpoints(a0, a1, res.phi, 1.0)
        t = np.linspace(0, 1, 129)
        gam = np.stack([great_circle(q0, q1, rho, s).values for s in t])
        dt = t[1] - t[0]
        u = 4 * np.sum(np.sum(np.diff(gam, axis=0) ** 2, axis=2) @ q0.widths) / dt
        assert u == pytest.approx(4 * rho ** 2, abs=1e-4)


class TestReconstruct:
    def test_identical_curves(self):
        a = resample_arclength(fixtures.load("spiral"), 64)
        path = reconstruct_path(a, a, Diffeo.identity(), 1.0, 4)
        for pts in path.curves:
            assert np.allclose(pts, a.to_points(), atol=1e-6)

    def test_segment_rotation(self):
        path = reconstruct_path(constant([1, 0]), constant([0, 1]), Diffeo.identity(), 1.0, 8)
        assert len(path.curves) == 9
        for t, alpha, dpsi in zip(path.times, path.alpha, path.dpsi):
            assert np.allclose(alpha, [math.cos(t * math.pi / 2), math.sin(t * math.pi / 2)], atol=1e-12)
            assert np.allclose(dpsi, 1.0, atol=1e-12)
        assert np.allclose(path.curves[-1][-1], [0.0, 1.0], atol=1e-12)

    @pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
    def test_endpoint_recovery(self, sigma):
        a0, a1, res = matched("arc", "hand1", sigma, 64)
        path = reconstruct_path(a0, a1, res.phi, sigma, 16)
        geo = endpoint_geometry(a0, a1, res.phi)
        assert np.allclose(path.psi[0], path.edges, atol=1e-9)
        assert np.allclose(path.dpsi[-1], geo.slope, atol=1e-6)
        assert np.allclose(path.alpha[0], geo.start, atol=1e-6)
        assert np.allclose(path.alpha[-1], geo.target, atol=1e-6)
        assert np.allclose(np.linalg.norm(path.alpha, axis=2), 1.0, atol=1e-9)
        assert np.allclose(path.psi[:, -1], 1.0) and np.all(path.psi[:, 0] == 0.0)
        assert path.lift_error < 1e-6

    def test_curves_have_unit_length(self):
        a0, a1, res = matched("hand1", "hand2")
        path = reconstruct_path(a0, a1, res.phi, 1.0, 6, n_out=200, origin=[2.0, 3.0])
        for pts in path.curves:
            assert np.allclose(pts[0], [2.0, 3.0])
            assert np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)) == pytest.approx(1.0, abs=1e-9)

    def test_validity_reports_vanishing_cells(self):
        # second half heads +y against -y: antipodal there, so at sigma = 1/2
        # gamma passes through zero halfway along the path
        n = 16
        a0 = TangentFunction(np.array([[1.0, 0.0]] * (n // 2) + [[0.0, 1.0]] * (n // 2)))
        a1 = TangentFunction(np.array([[1.0, 0.0]] * (n // 2) + [[0.0, -1.0]] * (n // 2)))
        path = reconstruct_path(a0, a1, Diffeo.identity(), 0.5, 16)
        assert path.validity
        assert {cell for _, cell in path.validity} == set(range(n // 2, n))
        assert all(t == 8 for t, _ in path.validity)
        assert not reconstruct_path(a0, a1, Diffeo.identity(), 2.0, 16).validity

    def test_hands_validity_by_sigma(self):
        a0, a1, res = matched("hand1", "hand2", 2.0)
        assert reconstruct_path(a0, a1, res.phi, 2.0, 16).validity == []

    def test_fully_antipodal_is_degenerate(self):
        with pytest.raises(DegenerateEndpoints):
            reconstruct_path(constant([1, 0]), constant([-1, 0]), Diffeo.identity(), 0.5)

    def test_three_dimensional(self):
        t = np.linspace(0, 3 * np.pi, 200)
        a0 = resample_arclength(_curve3(np.column_stack([np.cos(t), np.sin(t), 0.4 * t])), 64)
        a1 = resample_arclength(_curve3(np.column_stack([t, np.sin(t), np.cos(t)])), 64)
        res = match_tangents(a0, a1, 1.0)
        path = reconstruct_path(a0, a1, res.phi, 1.0, 8)
        norms = np.sqrt(np.sum(path.gamma ** 2, axis=2) @ path.widths)
        assert np.allclose(norms, 1.0, atol=1e-9)
        assert path.curves.shape == (9, 65, 3)
        assert 2 * path.rho == pytest.approx(res.distance, abs=1e-9)

    def test_serialization(self):
        path = reconstruct_path(constant([1, 0]), constant([0, 1]), Diffeo.identity(), 1.0, 2)
        d = path.to_dict()
        assert set(d) == {"times", "rho", "sigma", "curves", "validity"}
        assert len(d["curves"]) == 3

    def test_time_steps(self):
        with pytest.raises(ValueError):
            reconstruct_path(constant([1, 0]), constant([0, 1]), Diffeo.identity(), 1.0, 1)


def _curve3(pts):
    from elastica.curves import Curve
    return Curve(pts)


class TestPointwise:
    def test_endpoints(self):
        a, b = np.array([1.0, 0.0]), np.array([0.6, 0.8])
        assert np.array_equal(pointwise_interpolant(a, b, 0.0), a)
        assert np.allclose(pointwise_interpolant(a, b, 1.0), b)

    def test_bisector(self):
        out = pointwise_interpolant([1.0, 0.0], [0.0, 1.0], 0.5)
        assert np.allclose(out, [math.sqrt(0.5), math.sqrt(0.5)], atol=1e-15)

    def test_third_of_quarter_turn_in_3d(self):
        out = pointwise_interpolant([1.0, 0, 0], [0, 0, 1.0], 1 / 3)
        assert np.allclose(out, [math.sqrt(3) / 2, 0, 0.5], atol=1e-15)

    def test_antipodal(self):
        with pytest.raises(AntipodalPair):
            pointwise_interpolant([1.0, 0.0], [-1.0, 0.0], 0.5)

    def test_tiny_angle_returns_start(self):
        a = np.array([1.0, 0.0])
        assert np.array_equal(pointwise_interpolant(a, [1.0, 1e-10], 0.5), a)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-1, 1), min_size=3, max_size=3), st.lists(st.floats(-1, 1), min_size=3, max_size=3),
           st.floats(0, 1))
    def test_unit_norm_in_span(self, x, y, t):
        a, b = np.array(x), np.array(y)
        if np.linalg.norm(a) < 0.1 or np.linalg.norm(b) < 0.1:
            return
        a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
        if np.dot(a, b) < -1 + 1e-6:
            return
        out = pointwise_interpolant(a, b, t)
        assert abs(np.linalg.norm(out) - 1) < 1e-12
        basis, _ = np.linalg.qr(np.column_stack([a, b]))
        assert np.linalg.norm(out - basis @ (basis.T @ out)) < 1e-9


@pytest.mark.parametrize("d", [2, 3, 5])
def test_default_perpendicular(d):
    rng = np.random.default_rng(d)
    for _ in range(20):
        a = rng.normal(size=d)
        a /= np.linalg.norm(a)
        p = default_perpendicular(a)
        assert abs(np.dot(a, p)) < 1e-12 and abs(np.linalg.norm(p) - 1) < 1e-12
