"""One-subcell smoothed stiffness plus a projector-based stabilization term."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .element import ElementStiffness
from .errors import RankDeficientError
from .smoothing import sfem_stiffness_2d, sfem_stiffness_3d

COND_LIMIT = 1e12


@dataclass(frozen=True)
class StabilizedStiffness:
    K1: np.ndarray
    T: np.ndarray
    P: np.ndarray
    alpha: float

    @property
    def K2(self) -> np.ndarray:
        return self.alpha * self.P

    @property
    def K(self) -> np.ndarray:
        return self.K1 + self.alpha * self.P


def build_T(coords) -> np.ndarray:
    """Rigid-body plus linear-strain modal matrix of an element.

    Coordinates are shifted to the vertex average. 2D nodes give a 2n x 6
    block per node [[1,0,y,x,0,y],[0,1,-x,0,y,x]]; 3D nodes give the
    3n x 12 matrix of translations, rotations, normal and shear strains.
    """
    p = np.asarray(coords, dtype=float)
    x = p - p.mean(axis=0)
    n, dim = x.shape
    if dim == 2:
        T = np.zeros((2 * n, 6))
        T[0::2, 0] = 1.0
        T[1::2, 1] = 1.0
        T[0::2, 2], T[1::2, 2] = x[:, 1], -x[:, 0]
        T[0::2, 3] = x[:, 0]
        T[1::2, 4] = x[:, 1]
        T[0::2, 5], T[1::2, 5] = x[:, 1], x[:, 0]
        return T
    if dim == 3:
        T = np.zeros((3 * n, 12))
        X, Y, Z = x[:, 0], x[:, 1], x[:, 2]
        u, v, w = slice(0, None, 3), slice(1, None, 3), slice(2, None, 3)
        T[u, 0] = T[v, 1] = T[w, 2] = 1.0
        T[u, 3], T[v, 3] = Y, -X
        T[v, 4], T[w, 4] = Z, -Y
        T[u, 5], T[w, 5] = -Z, X
        T[u, 6], T[v, 7], T[w, 8] = X, Y, Z
        T[u, 9], T[v, 9] = Y, X
        T[v, 10], T[w, 10] = Z, Y
        T[u, 11], T[w, 11] = Z, X
        return T
    raise ValueError("coordinates must be 2D or 3D")


def stability_projector(T) -> np.ndarray:
    """P = I - T (T^T T)^{-1} T^T, rejecting ill-conditioned T."""
    T = np.asarray(T, dtype=float)
    G = T.T @ T
    if np.linalg.cond(G) > COND_LIMIT:
        raise RankDeficientError("modal matrix T is rank deficient")
    P = np.eye(len(T)) - T @ np.linalg.solve(G, T.T)
    return 0.5 * (P + P.T)


def affine_projector(coords, ncomp: int) -> np.ndarray:
    """Same projector as ``stability_projector(build_T(coords))`` built per component.

    The columns of T span all affine fields in each displacement component,
    so P factorizes as P_s (x) I with P_s the scalar projector off {1, x, y(, z)}.
    """
    p = np.asarray(coords, dtype=float)
    x = p - p.mean(axis=0)
    M = np.column_stack([np.ones(len(x)), x])
    G = M.T @ M
    if np.linalg.cond(G) > COND_LIMIT:
        raise RankDeficientError("node set is collinear/coplanar")
    Ps = np.eye(len(x)) - M @ np.linalg.solve(G, M.T)
    return np.kron(Ps, np.eye(ncomp))


def _stabilize(K1, coords, ncomp, alpha_star):
    if alpha_star < 0:
        raise ValueError("alpha_star must be non-negative")
    T = build_T(coords) if ncomp > 1 else np.column_stack([np.ones(len(coords)), coords - coords.mean(axis=0)])
    P = stability_projector(T)
    alpha = alpha_star * float(np.trace(K1))
    return StabilizedStiffness(K1, T, P, alpha)


def stabilized_stiffness_2d(coords, D, alpha_star: float = 0.1, nodes=None) -> ElementStiffness:
    """K = K1 + alpha* tr(K1) P for a polygon (``D=None``: scalar Laplace)."""
    coords = np.asarray(coords, dtype=float)
    base = sfem_stiffness_2d(coords, 1, D, nodes)
    parts = _stabilize(base.matrix, coords, 1 if D is None else 2, alpha_star)
    return ElementStiffness(parts.K, base.dofs, "stab", parts=parts)


def stabilized_stiffness_3d(mesh, c: int, D, alpha_star: float = 0.1, face_scheme: str = "auto") -> ElementStiffness:
    base = sfem_stiffness_3d(mesh, c, D, 1, face_scheme)
    coords = mesh.nodes[mesh.cell_nodes(c)]
    parts = _stabilize(base.matrix, coords, 3, alpha_star)
    return ElementStiffness(parts.K, base.dofs, "stab", parts=parts)


def stabilized_stiffness(element, D, alpha_star: float = 0.1, **kwargs) -> ElementStiffness:
    """Dispatch on the element: a polygon coordinate array or a ``(PolyMesh3D, cell)`` pair."""
    if isinstance(element, tuple) and len(element) == 2 and hasattr(element[0], "cells"):
        return stabilized_stiffness_3d(element[0], element[1], D, alpha_star, **kwargs)
    return stabilized_stiffness_2d(element, D, alpha_star, **kwargs)
