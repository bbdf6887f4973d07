import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.sparse as sp

from polysfem import _kernels, _kernels_py
from polysfem.benchmarks import load_fixture
from polysfem.fea import Material, constitutive_matrix
from polysfem.stab import stabilized_stiffness_2d

D = constitutive_matrix(Material(1.0, 0.3))


def _batch_input(mesh):
    conn = np.concatenate(mesh.elements).astype(np.int64)
    offsets = np.concatenate([[0], np.cumsum([len(e) for e in mesh.elements])]).astype(np.int64)
    return mesh.nodes, conn, offsets


def _dense(triplets, n):
    r, c, v = triplets
    return sp.coo_matrix((v, (r, c)), shape=(n, n)).toarray()


@pytest.fixture(scope="module")
def mesh():
    return load_fixture("cantilever_voronoi_100")


@pytest.mark.parametrize("alpha", [0.0, 0.1, 0.7])
def test_python_kernel_matches_element_routine(mesh, alpha):
    ndof = 2 * mesh.n_nodes
    got = _dense(_kernels_py.stab2d_batch(*_batch_input(mesh), D, alpha), ndof)
    ref = np.zeros((ndof, ndof))
    for e, nodes in enumerate(mesh.elements):
        k = stabilized_stiffness_2d(mesh.coords(e), D, alpha, nodes)
        ref[np.ix_(k.dofs, k.dofs)] += k.matrix
    np.testing.assert_allclose(got, ref, atol=1e-12 * np.abs(ref).max())


@pytest.mark.parametrize("alpha", [0.0, 0.1])
def test_compiled_kernel_matches_python(mesh, alpha):
    ck = pytest.importorskip("polysfem._ckernels")
    args = _batch_input(mesh)
    r1, c1, v1 = _kernels_py.stab2d_batch(*args, D, alpha)
    r2, c2, v2 = ck.stab2d_batch(*args, D, alpha)
    np.testing.assert_array_equal(r1, r2)
    np.testing.assert_array_equal(c1, c2)
    np.testing.assert_allclose(v1, v2, rtol=0, atol=1e-13 * np.abs(v1).max())


def test_selected_backend_is_consistent():
    assert _kernels.BACKEND in ("cython", "python")
    if _kernels.BACKEND == "python":
        assert _kernels.stab2d_batch is _kernels_py.stab2d_batch


@pytest.mark.parametrize("flag,expected", [("1", "python"), ("0", None)])
def test_environment_override(flag, expected):
    env = dict(os.environ, POLYSFEM_PURE_PYTHON=flag)
    out = subprocess.run([sys.executable, "-c", "import polysfem; print(polysfem.KERNEL_BACKEND)"],
                         env=env, capture_output=True, text=True, check=True).stdout.strip()
    assert out == (expected or _kernels.BACKEND)
