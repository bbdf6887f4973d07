import numpy as np
import pytest
from hypothesis import strategies as st

from polysfem.benchmarks import random_convex_polygon
from polysfem.mesh import generate_structured_hex_mesh

UNIT_SQUARE = np.array([(0, 0), (1, 0), (1, 1), (0, 1)], dtype=float)
PENTAGON = np.array([(0, 0), (3, 0), (3, 2), (1.5, 4), (0, 4)], dtype=float)


def regular_polygon(n, radius=1.0, centre=(0.0, 0.0), phase=0.0):
    t = phase + 2 * np.pi * np.arange(n) / n
    return np.column_stack([centre[0] + radius * np.cos(t), centre[1] + radius * np.sin(t)])


@st.composite
def convex_polygons(draw, min_sides=3, max_sides=10):
    """Random strictly convex CCW polygons, drawn through a seeded generator."""
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(min_sides, max_sides))
    return random_convex_polygon(np.random.default_rng(seed), n)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture(scope="session")
def cube():
    """Unit-cube single hexahedron."""
    return generate_structured_hex_mesh(1, 1, 1, ((0, 1), (0, 1), (0, 1)))


def linear_strain(grad_u):
    """Engineering Voigt strain of the displacement gradient ``grad_u``."""
    g = np.asarray(grad_u, float)
    if g.shape == (2, 2):
        return np.array([g[0, 0], g[1, 1], g[0, 1] + g[1, 0]])
    e = g + g.T
    return np.array([g[0, 0], g[1, 1], g[2, 2], e[0, 1], e[1, 2], e[2, 0]])


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
