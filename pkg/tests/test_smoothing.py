import numpy as np
import pytest
from conftest import PENTAGON, UNIT_SQUARE, convex_polygons
from hypothesis import given, settings

from polysfem.benchmarks import load_fixture
from polysfem.errors import DegenerateElementError
from polysfem.fea import Material, constitutive_matrix
from polysfem.mesh import Subcell, polygon_geometry, polygon_subcells
from polysfem.smoothing import (
    sfem_stiffness_2d,
    sfem_stiffness_3d,
    smoothed_gradient_2d,
    smoothed_gradient_3d,
    smoothed_operators_2d,
)

# worked reference examples (scalar Laplace)
SC1Q4 = 0.5 * np.array([[1, 0, -1, 0], [0, 1, 0, -1], [-1, 0, 1, 0], [0, -1, 0, 1]], dtype=float)
SC2Q4 = np.array([[9, -1, -7, -1], [-1, 9, -1, -7], [-7, -1, 9, -1], [-1, -7, -1, 9]], dtype=float) / 16
PENTAGON_ONECELL = np.array([
    [0.5952, 0.0238, -0.4881, -0.4048, 0.2738],
    [0.0238, 0.3095, 0.0833, -0.1190, -0.2976],
    [-0.4881, 0.0833, 0.4345, 0.2976, -0.3274],
    [-0.4048, -0.1190, 0.2976, 0.3095, -0.0833],
    [0.2738, -0.2976, -0.3274, -0.0833, 0.4345],
])

D_PLANE = constitutive_matrix(Material(1.0, 0.3, "plane_stress"))
D_SOLID = constitutive_matrix(Material(1.0, 0.3, "solid"))


def _valid_ncs(poly):
    n = len(poly)
    return (1, 2, 4) if n == 4 else (1, n)


class TestGradient2D:
    def test_unit_square_node_one(self):
        (op,) = smoothed_operators_2d(UNIT_SQUARE, 1)
        np.testing.assert_allclose(op.grad[0], [-0.5, -0.5], atol=1e-15)

    @settings(max_examples=50, deadline=None)
    @given(convex_polygons())
    def test_linear_field_reproduced_by_every_subcell(self, poly):
        for nc in _valid_ncs(poly):
            for op in smoothed_operators_2d(poly, nc):
                np.testing.assert_allclose(poly[:, 0] @ op.grad, [1.0, 0.0], atol=1e-11)
                np.testing.assert_allclose(poly[:, 1] @ op.grad, [0.0, 1.0], atol=1e-11)
                np.testing.assert_allclose(op.grad.sum(axis=0), 0.0, atol=1e-11)

    @settings(max_examples=50, deadline=None)
    @given(convex_polygons())
    def test_one_cell_matches_edge_formula(self, poly):
        # g_I = (l_{I-1} n_{I-1} + l_I n_I) / (2 |E|)
        g = polygon_geometry(poly)
        ln = g.lengths[:, None] * g.normals
        expected = (np.roll(ln, 1, axis=0) + ln) / (2 * g.area)
        (op,) = smoothed_operators_2d(poly, 1)
        assert np.abs(op.grad - expected).max() < 1e-12

    def test_strain_matrix_layout(self):
        (op,) = smoothed_operators_2d(UNIT_SQUARE, 1)
        u = np.zeros(8)
        u[0::2] = UNIT_SQUARE[:, 1]  # u_x = y: pure shear strain gxy = 1
        np.testing.assert_allclose(op.B @ u, [0, 0, 1], atol=1e-15)

    def test_degenerate_subcell(self):
        flat = Subcell(0, np.zeros((3, 2)), 0.0, np.ones(3), np.zeros((3, 2)), np.eye(3))
        with pytest.raises(DegenerateElementError):
            smoothed_gradient_2d(flat)


class TestStiffness2D:
    def test_sc1q4(self):
        np.testing.assert_allclose(sfem_stiffness_2d(UNIT_SQUARE, 1).matrix, SC1Q4, atol=1e-12)

    def test_sc2q4(self):
        np.testing.assert_allclose(sfem_stiffness_2d(UNIT_SQUARE, 2).matrix, SC2Q4, atol=1e-12)

    def test_pentagon_onecell(self):
        np.testing.assert_allclose(sfem_stiffness_2d(PENTAGON, 1).matrix, PENTAGON_ONECELL, atol=5e-5)

    @settings(max_examples=40, deadline=None)
    @given(convex_polygons())
    def test_symmetric_with_rigid_kernel(self, poly):
        n = len(poly)
        for nc in _valid_ncs(poly):
            K = sfem_stiffness_2d(poly, nc, D_PLANE).matrix
            assert np.abs(K - K.T).max() <= 1e-12 * np.abs(K).max()
            c = poly.mean(axis=0)
            rigid = [np.tile([1.0, 0.0], n), np.tile([0.0, 1.0], n),
                     np.column_stack([-(poly[:, 1] - c[1]), poly[:, 0] - c[0]]).ravel()]
            for v in rigid:
                assert np.abs(K @ v).max() < 1e-10 * np.abs(K).max() * np.abs(v).max()

    @settings(max_examples=40, deadline=None)
    @given(convex_polygons())
    def test_linear_energy_independent_of_subdivision(self, poly):
        eps = np.array([0.3, -0.1, 0.25])  # exx, eyy, gxy
        u = np.column_stack([eps[0] * poly[:, 0] + 0.5 * eps[2] * poly[:, 1],
                             0.5 * eps[2] * poly[:, 0] + eps[1] * poly[:, 1]]).ravel()
        exact = polygon_geometry(poly).area * eps @ D_PLANE @ eps
        for nc in _valid_ncs(poly):
            K = sfem_stiffness_2d(poly, nc, D_PLANE).matrix
            assert u @ K @ u == pytest.approx(exact, rel=1e-10)

    def test_dofs_follow_node_ids(self):
        es = sfem_stiffness_2d(UNIT_SQUARE, 1, D_PLANE, nodes=[4, 7, 9, 2])
        np.testing.assert_array_equal(es.dofs, [8, 9, 14, 15, 18, 19, 4, 5])

    def test_fan_subcells_more_stable_than_one(self):
        one = np.linalg.eigvalsh(sfem_stiffness_2d(PENTAGON, 1, D_PLANE).matrix)
        fan = np.linalg.eigvalsh(sfem_stiffness_2d(PENTAGON, 5, D_PLANE).matrix)
        tol = 1e-10 * one.max()
        assert np.sum(np.abs(fan) < tol) == 3
        assert np.sum(np.abs(one) < tol) > 3


class TestStiffness3D:
    def test_translations_in_kernel(self, cube):
        K = sfem_stiffness_3d(cube, 0, D_SOLID).matrix
        for d in range(3):
            v = np.zeros(24)
            v[d::3] = 1.0
            assert np.abs(K @ v).max() < 1e-10 * np.abs(K).max()

    def test_linear_field_energy(self, cube):
        grad_u = np.array([[0.1, 0.2, -0.05], [0.0, -0.3, 0.1], [0.15, 0.05, 0.2]])
        x = cube.nodes[cube.cell_nodes(0)]
        u = (x @ grad_u.T).ravel()
        e = grad_u + grad_u.T
        eps = np.array([grad_u[0, 0], grad_u[1, 1], grad_u[2, 2], e[0, 1], e[1, 2], e[2, 0]])
        K = sfem_stiffness_3d(cube, 0, D_SOLID).matrix
        assert u @ K @ u == pytest.approx(eps @ D_SOLID @ eps, rel=1e-12)

    def test_unit_cube_has_eighteen_zero_modes(self, cube):
        lam = np.linalg.eigvalsh(sfem_stiffness_3d(cube, 0, D_SOLID).matrix)
        assert np.sum(np.abs(lam) < 1e-10 * lam.max()) == 18

    def test_warped_cells_reproduce_linear_strain(self):
        mesh = load_fixture("warped_cube")
        grad_u = np.array([[0.2, 0.1, 0.0], [-0.1, 0.05, 0.3], [0.0, 0.2, -0.1]])
        e = grad_u + grad_u.T
        eps = np.array([grad_u[0, 0], grad_u[1, 1], grad_u[2, 2], e[0, 1], e[1, 2], e[2, 0]])
        for c in range(mesh.n_elements):
            ids, op = smoothed_gradient_3d(mesh, c)
            u = (mesh.nodes[ids] @ grad_u.T).ravel()
            np.testing.assert_allclose(op.B @ u, eps, atol=1e-12)
        assert sum(smoothed_gradient_3d(mesh, c)[1].measure for c in range(mesh.n_elements)) == pytest.approx(1.0)

    def test_only_one_subcell(self, cube):
        with pytest.raises(ValueError):
            sfem_stiffness_3d(cube, 0, D_SOLID, nc=2)


def test_subcell_list_lengths():
    assert len(polygon_subcells(PENTAGON, 5)) == len(smoothed_operators_2d(PENTAGON, 5)) == 5
