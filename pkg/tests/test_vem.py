import numpy as np
import pytest
from conftest import PENTAGON, UNIT_SQUARE, convex_polygons, linear_strain
from hypothesis import given, settings

from polysfem.benchmarks import load_fixture
from polysfem.fea import Material, constitutive_matrix
from polysfem.smoothing import sfem_stiffness_2d
from polysfem.vem import vem_elasticity_2d_stiffness, vem_elasticity_3d_stiffness, vem_scalar_stiffness

SQUARE_CONST = 0.5 * np.array([[1, 0, -1, 0], [0, 1, 0, -1], [-1, 0, 1, 0], [0, -1, 0, 1]], dtype=float)
SQUARE_STAB = 0.25 * np.array([[1, -1, 1, -1], [-1, 1, -1, 1], [1, -1, 1, -1], [-1, 1, -1, 1]], dtype=float)
PENTAGON_CONST_ROW1 = [0.5952, 0.0238, -0.4881, -0.4048, 0.2738]
# reference total: consistency + stability
PENTAGON_TOTAL = np.array([
    [0.7422, -0.1966, -0.3412, -0.2578, 0.0534],
    [-0.1966, 0.7422, -0.3412, -0.1354, -0.0690],
    [-0.3412, -0.3412, 0.9896, 0.0364, -0.3437],
    [-0.2578, -0.1354, 0.0364, 0.8646, -0.5078],
    [0.0534, -0.0690, -0.3437, -0.5078, 0.8672],
])
D_SOLID = constitutive_matrix(Material(1.0, 0.3, "solid"))


class TestScalar:
    def test_unit_square_parts(self):
        parts = vem_scalar_stiffness(UNIT_SQUARE)
        np.testing.assert_allclose(parts.K_const, SQUARE_CONST, atol=1e-12)
        np.testing.assert_allclose(parts.K_stab, SQUARE_STAB, atol=1e-12)
        np.testing.assert_allclose(parts.K, SQUARE_CONST + SQUARE_STAB, atol=1e-12)

    def test_pentagon_consistency(self):
        np.testing.assert_allclose(vem_scalar_stiffness(PENTAGON).K_const[0], PENTAGON_CONST_ROW1, atol=5e-5)

    def test_pentagon_const_plus_stab_reference(self):
        parts = vem_scalar_stiffness(PENTAGON)
        np.testing.assert_allclose(parts.K, PENTAGON_TOTAL, atol=5e-5)
        # the listing is not the stability part on its own
        assert np.abs(parts.K_stab - PENTAGON_TOTAL).max() > 0.1

    @settings(max_examples=200, deadline=None)
    @given(convex_polygons())
    def test_consistency_equals_one_cell_smoothing(self, poly):
        diff = np.abs(vem_scalar_stiffness(poly).K_const - sfem_stiffness_2d(poly, 1).matrix).max()
        assert diff < 1e-12

    @settings(max_examples=60, deadline=None)
    @given(convex_polygons())
    def test_projector_properties(self, poly):
        parts = vem_scalar_stiffness(poly)
        n = len(poly)
        Pi = parts.Pi
        assert np.abs(Pi @ Pi - Pi).max() < 1e-12 * max(1.0, np.abs(Pi).max())
        for f in (np.ones(n), poly[:, 0], poly[:, 1], 2.0 - 0.5 * poly[:, 0] + 3.0 * poly[:, 1]):
            np.testing.assert_allclose(Pi @ f, f, atol=1e-11 * max(1.0, np.abs(f).max()))
        for K in (parts.K, parts.K_const):
            np.testing.assert_allclose(K.sum(axis=0), 0.0, atol=1e-12 * np.abs(K).max())
            np.testing.assert_allclose(K, K.T, atol=1e-12 * np.abs(K).max())

    @settings(max_examples=40, deadline=None)
    @given(convex_polygons())
    def test_consistency_energy_of_linears(self, poly):
        parts = vem_scalar_stiffness(poly)
        area = 0.5 * np.sum(poly[:, 0] * np.roll(poly[:, 1], -1) - np.roll(poly[:, 0], -1) * poly[:, 1])
        a, b = 0.7, -1.3
        f = a * poly[:, 0] + b * poly[:, 1]
        assert f @ parts.K_const @ f == pytest.approx(area * (a * a + b * b), rel=1e-12)
        assert abs(f @ parts.K_stab @ f) < 1e-10 * area


class TestElasticity2D:
    def test_rank(self):
        D = constitutive_matrix(Material(1.0, 0.3, "plane_stress"))
        lam = np.linalg.eigvalsh(vem_elasticity_2d_stiffness(PENTAGON, D, 0.1).matrix)
        assert np.sum(np.abs(lam) < 1e-10 * lam.max()) == 3

    def test_negative_alpha(self):
        with pytest.raises(ValueError):
            vem_elasticity_2d_stiffness(UNIT_SQUARE, np.eye(3), -0.1)


class TestElasticity3D:
    def test_duality_and_projector(self, cube):
        p = vem_elasticity_3d_stiffness(cube, 0, D_SOLID, 0.1).parts
        np.testing.assert_allclose(p.W_R.T @ p.N_R, np.eye(6), atol=1e-10)
        np.testing.assert_allclose(p.W_C.T @ p.N_C, np.eye(6), atol=1e-10)
        Pp = p.P_p
        np.testing.assert_allclose(Pp @ Pp, Pp, atol=1e-10)

    def test_warped_cells_duality(self):
        mesh = load_fixture("warped_cube")
        for c in range(mesh.n_elements):
            p = vem_elasticity_3d_stiffness(mesh, c, D_SOLID, 0.1).parts
            np.testing.assert_allclose(p.W_R.T @ p.N_R, np.eye(6), atol=1e-10)
            np.testing.assert_allclose(p.W_C.T @ p.N_C, np.eye(6), atol=1e-10)

    def test_translations_in_kernel(self, cube):
        es = vem_elasticity_3d_stiffness(cube, 0, D_SOLID, 0.1)
        scale = np.abs(es.matrix).max()
        for d in range(3):
            v = np.zeros(24)
            v[d::3] = 1.0
            assert np.abs(es.parts.K_const @ v).max() < 1e-10 * scale
            assert np.abs(es.matrix @ v).max() < 1e-10 * scale

    def test_unit_cube_six_zero_modes(self, cube):
        K = vem_elasticity_3d_stiffness(cube, 0, D_SOLID, 0.1).matrix
        np.testing.assert_allclose(K, K.T, atol=1e-12 * np.abs(K).max())
        lam = np.linalg.eigvalsh(K)
        assert lam.min() > -1e-10 * lam.max()
        assert np.sum(np.abs(lam) < 1e-10 * lam.max()) == 6

    def test_stability_vanishes_on_linear_fields(self):
        mesh = load_fixture("warped_cube")
        rng = np.random.default_rng(3)
        for c in range(mesh.n_elements):
            es = vem_elasticity_3d_stiffness(mesh, c, D_SOLID, 0.1)
            x = mesh.nodes[mesh.cell_nodes(c)]
            G = rng.normal(size=(3, 3))
            u = (x @ G.T + rng.normal(size=3)).ravel()
            assert np.abs(es.parts.K_stab @ u).max() < 1e-10 * np.abs(es.parts.K_stab).max() * np.abs(u).max()

    def test_linear_energy_on_warped_cells(self):
        mesh = load_fixture("warped_cube")
        G = np.array([[0.2, 0.1, 0.0], [-0.1, 0.05, 0.3], [0.0, 0.2, -0.1]])
        eps = linear_strain(G)
        total = 0.0
        for c in range(mesh.n_elements):
            es = vem_elasticity_3d_stiffness(mesh, c, D_SOLID, 0.1)
            u = (mesh.nodes[mesh.cell_nodes(c)] @ G.T).ravel()
            total += u @ es.matrix @ u
        assert total == pytest.approx(eps @ D_SOLID @ eps, rel=1e-10)

    def test_alpha_scaling(self, cube):
        p = vem_elasticity_3d_stiffness(cube, 0, D_SOLID, 0.3).parts
        assert p.alpha == pytest.approx(0.3 * np.trace(p.K_const), rel=1e-14)
