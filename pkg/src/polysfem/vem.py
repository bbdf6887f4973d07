"""Lowest-order virtual elements: scalar Laplace in 2D and linear elasticity in 3D."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .element import ElementStiffness, node_dofs
from .mesh import polygon_geometry
from .smoothing import cell_face_integrals


@dataclass(frozen=True)
class VemScalarParts:
    R: np.ndarray
    N: np.ndarray
    Pi_tilde: np.ndarray
    Pi: np.ndarray
    P: np.ndarray  # I - Pi
    K_const: np.ndarray
    K_stab: np.ndarray

    @property
    def K(self) -> np.ndarray:
        return self.K_const + self.K_stab


def vem_scalar_stiffness(coords) -> VemScalarParts:
    """Consistency and identity-scaled stability matrices for k = 1.

    R stacks half the length-weighted normals of the two edges meeting at
    each vertex, so R^T v / |E| is the mean gradient of the boundary
    interpolant. Pi maps nodal values onto the affine function with that
    gradient and the same vertex mean.
    """
    p = np.asarray(coords, dtype=float)
    g = polygon_geometry(p)
    n = len(p)
    ln = g.normals * g.lengths[:, None]
    R = 0.5 * (np.roll(ln, 1, axis=0) + ln)
    area = g.area
    N = p
    Pi_t = N @ R.T / area
    Pi_o = np.full((n, n), 1.0 / n)
    eye = np.eye(n)
    Pi = Pi_t + Pi_o @ (eye - Pi_t)
    P = eye - Pi
    K_const = R @ R.T / area
    K_stab = P.T @ P
    return VemScalarParts(R, N, Pi_t, Pi, P, K_const, K_stab)


def vem_elasticity_2d_stiffness(coords, D, alpha_star: float = 0.1, nodes=None) -> ElementStiffness:
    """Plane elasticity built from the scalar projector applied per component.

    The consistency part is |E| B^T D B with the mean-gradient B; the
    stability part is alpha (I - Pi x I2)^T (I - Pi x I2), alpha = alpha* tr(K_const).
    """
    if alpha_star < 0:
        raise ValueError("alpha_star must be non-negative")
    parts = vem_scalar_stiffness(coords)
    area = polygon_geometry(coords).area
    n = len(parts.R)
    g = parts.R / area
    B = np.zeros((3, 2 * n))
    B[0, 0::2] = g[:, 0]
    B[1, 1::2] = g[:, 1]
    B[2, 0::2] = g[:, 1]
    B[2, 1::2] = g[:, 0]
    K_const = area * B.T @ np.asarray(D, float) @ B
    K_const = 0.5 * (K_const + K_const.T)
    Q = np.kron(parts.P, np.eye(2))
    K_stab = alpha_star * float(np.trace(K_const)) * Q.T @ Q
    dofs = node_dofs(np.arange(n) if nodes is None else nodes, 2)
    return ElementStiffness(K_const + K_stab, dofs, "vem", parts=(K_const, K_stab))


# ---------------------------------------------------------------------------
# 3D elasticity
# ---------------------------------------------------------------------------

# Voigt shear entries carry a factor 2 when D acts on tensor strains.
_TENSOR_SCALE = np.diag([1.0, 1.0, 1.0, 2.0, 2.0, 2.0])


@dataclass(frozen=True)
class VemElasticParts3D:
    N_R: np.ndarray
    N_C: np.ndarray
    W_R: np.ndarray
    W_C: np.ndarray
    q: np.ndarray
    P_R: np.ndarray
    P_C: np.ndarray
    volume: float
    alpha: float
    K_const: np.ndarray
    K_stab: np.ndarray

    @property
    def P_p(self) -> np.ndarray:
        return self.P_R + self.P_C


def vem_matrices_3d(x: np.ndarray, q: np.ndarray):
    """Rigid/strain mode matrices and their duals for nodes x and weights q.

    ``x`` must be centred on the vertex average so that the rigid and
    strain dual pairs are mutually orthogonal.
    """
    n = len(x)
    N_R = np.zeros((3 * n, 6))
    N_C = np.zeros((3 * n, 6))
    W_R = np.zeros((3 * n, 6))
    W_C = np.zeros((3 * n, 6))
    for i in range(n):
        x1, x2, x3 = x[i]
        q1, q2, q3 = q[i]
        r = slice(3 * i, 3 * i + 3)
        N_R[r] = [[1, 0, 0, x2, 0, -x3], [0, 1, 0, -x1, x3, 0], [0, 0, 1, 0, -x2, x1]]
        N_C[r] = [[x1, 0, 0, x2, 0, x3], [0, x2, 0, x1, x3, 0], [0, 0, x3, 0, x2, x1]]
        W_R[r] = [[1 / n, 0, 0, q2, 0, -q3], [0, 1 / n, 0, -q1, q3, 0], [0, 0, 1 / n, 0, -q2, q1]]
        W_C[r] = [[2 * q1, 0, 0, q2, 0, q3], [0, 2 * q2, 0, q1, q3, 0], [0, 0, 2 * q3, 0, q2, q1]]
    return N_R, N_C, W_R, W_C


def vem_elasticity_3d_stiffness(mesh, c: int, D, alpha_star: float = 0.1, face_scheme: str = "auto") -> ElementStiffness:
    """K = |E| W_C D W_C^T + alpha (I - P_p)^T (I - P_p) for polyhedral cell c.

    ``D`` is the engineering-strain 6x6 constitutive matrix; W_C yields
    tensor strains, hence the shear rescaling.
    """
    if alpha_star < 0:
        raise ValueError("alpha_star must be non-negative")
    ids, acc = cell_face_integrals(mesh, c, face_scheme)
    xn = mesh.nodes[ids]
    volume = float(np.einsum("ij,ij->", xn, acc)) / 3.0
    q = acc / (2.0 * volume)
    x = xn - xn.mean(axis=0)
    N_R, N_C, W_R, W_C = vem_matrices_3d(x, q)
    Dt = _TENSOR_SCALE @ np.asarray(D, float) @ _TENSOR_SCALE
    K_const = volume * W_C @ Dt @ W_C.T
    K_const = 0.5 * (K_const + K_const.T)
    P_R = N_R @ W_R.T
    P_C = N_C @ W_C.T
    alpha = alpha_star * float(np.trace(K_const))
    Q = np.eye(3 * len(ids)) - P_R - P_C
    K_stab = alpha * Q.T @ Q
    parts = VemElasticParts3D(N_R, N_C, W_R, W_C, q, P_R, P_C, volume, alpha, K_const, K_stab)
    return ElementStiffness(K_const + K_stab, node_dofs(ids, 3), "vem", parts=parts)
