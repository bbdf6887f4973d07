"""Cell-based strain smoothing: smoothed gradient operators and SFEM stiffness."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .element import ElementStiffness, node_dofs
from .errors import DegenerateElementError
from .interp import face_frame, face_vector_integrals
from .mesh import AREA_TOL, Subcell, polygon_subcells


@dataclass(frozen=True)
class SmoothedCellOperator:
    subcell: int
    measure: float
    grad: np.ndarray  # (n, dim): smoothed gradient row g_I of every node
    B: np.ndarray  # (3, 2n) in 2D or (6, 3n) in 3D


def strain_matrix_2d(grad: np.ndarray) -> np.ndarray:
    """Voigt strain-displacement matrix (exx, eyy, gxy) from nodal gradients."""
    n = len(grad)
    B = np.zeros((3, 2 * n))
    B[0, 0::2] = grad[:, 0]
    B[1, 1::2] = grad[:, 1]
    B[2, 0::2] = grad[:, 1]
    B[2, 1::2] = grad[:, 0]
    return B


def strain_matrix_3d(grad: np.ndarray) -> np.ndarray:
    """Voigt order exx, eyy, ezz, gxy, gyz, gzx with engineering shear."""
    n = len(grad)
    B = np.zeros((6, 3 * n))
    gx, gy, gz = grad[:, 0], grad[:, 1], grad[:, 2]
    B[0, 0::3] = gx
    B[1, 1::3] = gy
    B[2, 2::3] = gz
    B[3, 0::3] = gy
    B[3, 1::3] = gx
    B[4, 1::3] = gz
    B[4, 2::3] = gy
    B[5, 0::3] = gz
    B[5, 2::3] = gx
    return B


def smoothed_gradient_2d(subcell: Subcell, index: int = 0) -> SmoothedCellOperator:
    """g_I = (1/A_C) sum_b N_I(x_b) n_b l_b with one midpoint per segment."""
    if subcell.area < AREA_TOL:
        raise DegenerateElementError(f"subcell area {subcell.area:.3e} below tolerance", subcell.parent)
    weighted = subcell.seg_normals * subcell.seg_lengths[:, None]
    grad = subcell.seg_shape.T @ weighted / subcell.area
    return SmoothedCellOperator(index, subcell.area, grad, strain_matrix_2d(grad))


def smoothed_operators_2d(coords, nc: int = 1, parent=None) -> list:
    return [smoothed_gradient_2d(c, i) for i, c in enumerate(polygon_subcells(coords, nc, parent))]


def sfem_stiffness_2d(coords, nc: int = 1, D=None, nodes=None) -> ElementStiffness:
    """Smoothed stiffness of one polygon.

    With ``D=None`` the scalar Laplace operator (one DOF per node) is
    assembled; otherwise ``D`` is the 3x3 plane constitutive matrix.
    """
    coords = np.asarray(coords, dtype=float)
    n = len(coords)
    ops = smoothed_operators_2d(coords, nc)
    if D is None:
        K = sum(op.measure * op.grad @ op.grad.T for op in ops)
        dofs = np.arange(n) if nodes is None else np.asarray(nodes)
    else:
        D = np.asarray(D, dtype=float)
        K = sum(op.measure * op.B.T @ D @ op.B for op in ops)
        dofs = node_dofs(np.arange(n) if nodes is None else nodes, 2)
    K = 0.5 * (K + K.T)
    return ElementStiffness(K, dofs, "sfem", parts=ops)


# ---------------------------------------------------------------------------
# 3D
# ---------------------------------------------------------------------------


def resolve_face_scheme(face: np.ndarray, scheme: str) -> str:
    """``auto`` picks the nodal scheme on planar faces, bilinear on warped quads."""
    if scheme != "auto":
        return scheme
    try:
        face_frame(face)
        return "nodal"
    except ValueError:
        if len(face) == 4:
            return "bilinear"
        raise


def cell_face_integrals(mesh, c: int, scheme: str = "auto"):
    """Return (cell node ids, (m,3) array of sum over faces of int N_I n dS)."""
    ids = mesh.cell_nodes(c)
    pos = {int(v): k for k, v in enumerate(ids)}
    acc = np.zeros((len(ids), 3))
    for loop in mesh.cell_faces(c):
        p = mesh.nodes[loop]
        vec = face_vector_integrals(p, resolve_face_scheme(p, scheme))
        for k, node in enumerate(loop):
            acc[pos[int(node)]] += vec[k]
    return ids, acc


def smoothed_gradient_3d(mesh, c: int, scheme: str = "auto") -> tuple:
    """One-subcell smoothed gradient of cell c.

    The volume is taken from the same face integrals, V = (1/3) sum x_I . q_I,
    so linear fields are reproduced exactly whenever the face rule is
    linearly exact.
    """
    ids, acc = cell_face_integrals(mesh, c, scheme)
    x = mesh.nodes[ids]
    volume = float(np.einsum("ij,ij->", x, acc)) / 3.0
    if volume < AREA_TOL:
        raise DegenerateElementError(f"cell volume {volume:.3e} not positive", c)
    grad = acc / volume
    return ids, SmoothedCellOperator(0, volume, grad, strain_matrix_3d(grad))


def sfem_stiffness_3d(mesh, c: int, D, nc: int = 1, face_scheme: str = "auto") -> ElementStiffness:
    """One-subcell smoothed stiffness of a polyhedral cell (only nc = 1)."""
    if nc != 1:
        raise ValueError("3D smoothing supports a single subcell per cell")
    ids, op = smoothed_gradient_3d(mesh, c, face_scheme)
    K = op.measure * op.B.T @ np.asarray(D, float) @ op.B
    K = 0.5 * (K + K.T)
    return ElementStiffness(K, node_dofs(ids, 3), "sfem", parts=op)
