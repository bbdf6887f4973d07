import numpy as np
import pytest
from conftest import PENTAGON, UNIT_SQUARE, convex_polygons, regular_polygon
from hypothesis import given, settings
from hypothesis import strategies as st

from polysfem.errors import OutOfDomainError, UnsupportedFaceError
from polysfem.interp import (
    face_shape_integral,
    face_shape_integrals,
    face_vector_integrals,
    hex8_shape,
    polygon_center_shape,
    q4_shape,
    quadrature_rule,
    wachspress_shape,
)

Q4_NODES = np.array([(-1, -1), (1, -1), (1, 1), (-1, 1)], dtype=float)
HEX_NODES = np.array([(x, y, z) for z in (-1, 1) for (x, y) in Q4_NODES])


def _interior_point(poly, rng):
    w = rng.dirichlet(np.ones(len(poly)))
    return w @ poly


class TestLagrange:
    def test_q4_centre(self):
        np.testing.assert_allclose(q4_shape(0, 0).values, 0.25)

    def test_q4_kronecker(self):
        for i, (a, b) in enumerate(Q4_NODES):
            np.testing.assert_allclose(q4_shape(a, b).values, np.eye(4)[i])

    def test_hex8_kronecker(self):
        for i, p in enumerate(HEX_NODES):
            np.testing.assert_allclose(hex8_shape(*p).values, np.eye(8)[i])

    def test_partition_of_unity(self, rng):
        for xi in rng.uniform(-1, 1, (1000, 3)):
            q = q4_shape(xi[0], xi[1])
            assert abs(q.values.sum() - 1) < 1e-12
            assert np.abs(q.gradients.sum(axis=0)).max() < 1e-12
            h = hex8_shape(*xi)
            assert abs(h.values.sum() - 1) < 1e-12
            assert np.abs(h.gradients.sum(axis=0)).max() < 1e-12

    def test_q4_gradient_matches_difference_quotient(self):
        eps = 1e-6
        g = q4_shape(0.3, -0.2).gradients
        fd = (q4_shape(0.3 + eps, -0.2).values - q4_shape(0.3 - eps, -0.2).values) / (2 * eps)
        np.testing.assert_allclose(g[:, 0], fd, atol=1e-9)


class TestPolygonCentre:
    def test_square(self):
        np.testing.assert_allclose(polygon_center_shape(4).values, [0.25] * 4)

    def test_pentagon(self):
        np.testing.assert_allclose(polygon_center_shape(5).values, [0.2] * 5)

    @given(st.integers(3, 40))
    def test_sum(self, n):
        assert polygon_center_shape(n).values.sum() == pytest.approx(1.0, abs=1e-14)

    def test_too_few(self):
        with pytest.raises(ValueError):
            polygon_center_shape(2)


class TestWachspress:
    def test_vertices(self):
        for k, v in enumerate(PENTAGON):
            np.testing.assert_allclose(wachspress_shape(PENTAGON, v).values, np.eye(5)[k], atol=1e-14)

    @pytest.mark.parametrize("n", [3, 5, 6, 9])
    def test_regular_centroid(self, n):
        np.testing.assert_allclose(wachspress_shape(regular_polygon(n), (0, 0)).values, 1.0 / n, atol=1e-14)

    @settings(max_examples=80, deadline=None)
    @given(convex_polygons(), st.integers(0, 2**32 - 1))
    def test_linear_completeness(self, poly, seed):
        x = _interior_point(poly, np.random.default_rng(seed))
        ev = wachspress_shape(poly, x)
        assert abs(ev.values.sum() - 1) < 1e-12
        assert np.abs(ev.values @ poly - x).max() < 1e-10
        assert ev.values.min() >= -1e-14

    @settings(max_examples=40, deadline=None)
    @given(convex_polygons(), st.integers(0, 2**32 - 1))
    def test_gradients_reproduce_identity(self, poly, seed):
        x = _interior_point(poly, np.random.default_rng(seed))
        g = wachspress_shape(poly, x).gradients
        np.testing.assert_allclose(poly.T @ g, np.eye(2), atol=1e-9)

    def test_gradient_matches_difference_quotient(self):
        x = np.array([1.2, 1.7])
        eps = 1e-6
        g = wachspress_shape(PENTAGON, x).gradients
        for d in range(2):
            e = np.eye(2)[d] * eps
            fd = (wachspress_shape(PENTAGON, x + e).values - wachspress_shape(PENTAGON, x - e).values) / (2 * eps)
            np.testing.assert_allclose(g[:, d], fd, atol=1e-8)

    def test_edge_point_is_linear_on_edge(self):
        x = 0.25 * PENTAGON[1] + 0.75 * PENTAGON[2]
        expected = np.zeros(5)
        expected[1], expected[2] = 0.25, 0.75
        np.testing.assert_allclose(wachspress_shape(PENTAGON, x).values, expected, atol=1e-12)

    def test_non_convex(self):
        arrow = np.array([(0, 0), (2, 1), (0, 2), (1, 1)], dtype=float)
        with pytest.raises(UnsupportedFaceError):
            wachspress_shape(arrow, (0.5, 1.0))

    def test_outside(self):
        with pytest.raises(OutOfDomainError):
            wachspress_shape(UNIT_SQUARE, (1.5, 0.5))


class TestQuadrature:
    def test_segment_midpoint(self):
        r = quadrature_rule("segment", 1)
        np.testing.assert_allclose(r.points.ravel(), [0.0])
        np.testing.assert_allclose(r.weights, [2.0])

    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_segment_exactness(self, order):
        r = quadrature_rule("segment", order)
        for k in range(order + 1):
            exact = 2.0 / (k + 1) if k % 2 == 0 else 0.0
            assert (r.weights * r.points[:, 0] ** k).sum() == pytest.approx(exact, abs=1e-14)

    def test_triangle_degree_two(self):
        r = quadrature_rule("triangle", 2)
        assert len(r.weights) == 3
        x, y = r.points[:, 0], r.points[:, 1]
        # monomial integrals over the unit right triangle: a! b! / (a + b + 2)!
        for f, exact in [(x**2, 1 / 12), (x * y, 1 / 24), (y**2, 1 / 12), (x, 1 / 6), (np.ones_like(x), 0.5)]:
            assert (r.weights * f).sum() == pytest.approx(exact, abs=1e-15)

    @pytest.mark.parametrize("kind,order,measure", [("segment", 1, 2), ("segment", 3, 2), ("triangle", 1, 0.5),
                                                    ("triangle", 2, 0.5)])
    def test_weights_sum_and_positive(self, kind, order, measure):
        r = quadrature_rule(kind, order)
        assert r.weights.sum() == pytest.approx(measure, abs=1e-15)
        assert np.all(r.weights > 0)

    @pytest.mark.parametrize("kind,order", [("triangle", 3), ("segment", 0), ("square", 1)])
    def test_unsupported(self, kind, order):
        with pytest.raises(ValueError):
            quadrature_rule(kind, order)


def _lift(poly2d, z=0.0):
    return np.column_stack([poly2d, np.full(len(poly2d), z)])


class TestFaceIntegrals:
    def test_unit_square_nodal(self):
        face = _lift(UNIT_SQUARE)
        for i in range(4):
            assert face_shape_integral(face, i, "nodal") == pytest.approx(0.25, abs=1e-15)

    def test_unit_square_conforming_first_moment(self):
        face = _lift(UNIT_SQUARE)
        w = face_shape_integrals(face, "conforming")
        assert w @ UNIT_SQUARE[:, 0] == pytest.approx(0.5, abs=1e-12)

    @staticmethod
    def _area(poly):
        return 0.5 * np.sum(poly[:, 0] * np.roll(poly[:, 1], -1) - np.roll(poly[:, 0], -1) * poly[:, 1])

    @settings(max_examples=30, deadline=None)
    @given(convex_polygons())
    def test_nodal_sum_is_area(self, poly):
        assert face_shape_integrals(_lift(poly), "nodal").sum() == pytest.approx(self._area(poly), rel=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(convex_polygons(3, 4))
    def test_conforming_sum_is_area_for_triangles_and_quads(self, poly):
        # the mapped Jacobian is at most linear here, so the degree-2 rule is exact
        got = face_shape_integrals(_lift(poly), "conforming").sum()
        assert got == pytest.approx(self._area(poly), rel=1e-12)

    def test_conforming_sum_on_irregular_pentagon_is_approximate(self):
        # rational Wachspress Jacobian: degree-2 quadrature leaves a small residual
        got = face_shape_integrals(_lift(PENTAGON), "conforming").sum()
        assert got == pytest.approx(10.5, rel=1e-3)

    @pytest.mark.parametrize("face", [UNIT_SQUARE, 3.0 * UNIT_SQUARE, regular_polygon(5), regular_polygon(7, 2.0)])
    def test_schemes_agree_on_symmetric_faces(self, face):
        a = face_shape_integrals(_lift(face), "nodal")
        b = face_shape_integrals(_lift(face), "conforming")
        np.testing.assert_allclose(a, b, atol=1e-8)

    def test_tilted_face_vector_integrals(self):
        # a 1 x sqrt(2) rectangle in the plane x + z = 1; its area vector is (1, 0, 1)
        face = np.array([(1, 0, 0), (1, 1, 0), (0, 1, 1), (0, 0, 1)], dtype=float)
        v = face_vector_integrals(face, "nodal")
        np.testing.assert_allclose(v.sum(axis=0), [1.0, 0.0, 1.0], atol=1e-14)
        np.testing.assert_allclose(v, np.tile([0.25, 0.0, 0.25], (4, 1)), atol=1e-14)

    def test_nodal_rejects_non_star_face(self):
        comb = np.array([(0, 0), (4, 0), (4, 1), (1, 1), (1, 3), (0.5, 3), (0.5, 0.2), (0, 3)], dtype=float)
        with pytest.raises(UnsupportedFaceError):
            face_shape_integrals(_lift(comb), "nodal")

    def test_non_planar(self):
        warped = np.array([(0, 0, 0), (1, 0, 0), (1, 1, 0.3), (0, 1, 0)], dtype=float)
        with pytest.raises(UnsupportedFaceError):
            face_shape_integrals(warped, "nodal")

    def test_bilinear_handles_warped_face(self):
        warped = np.array([(0, 0, 0), (1, 0, 0), (1, 1, 0.3), (0, 1, 0)], dtype=float)
        v = face_vector_integrals(warped, "bilinear")
        # the z-projected area is exactly 1 for any warp of the unit square
        assert v[:, 2].sum() == pytest.approx(1.0, abs=1e-14)
