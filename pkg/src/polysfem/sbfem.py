"""Scaled boundary polygon element with direct stress-intensity-factor extraction.

Only the boundary is discretized (2-node line elements); the radial
solution is a sum of power-law modes u(xi) = Phi_u xi^(-Lambda) c obtained
from the eigenvectors of a Hamiltonian matrix. With the scaling centre at a
crack tip, the modes with -1 < Re(lambda) < 0 carry the square-root stress
singularity, so SIFs follow without any extrapolation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .element import ElementStiffness, node_dofs
from .errors import (
    InvalidScalingCentreError,
    JacobianError,
    ModalSelectionError,
    NoSingularModeError,
)
from .interp import gauss_points

COND_LIMIT = 1e12


@dataclass(frozen=True)
class SbfemElement:
    """Boundary of a scaled polygon.

    ``coords`` are absolute node coordinates, ``lines`` pairs of local node
    indices oriented counter-clockwise about ``centre``. ``open_boundary``
    marks a cracked polygon whose first and last nodes sit on the two crack
    faces. ``direction`` is the unit crack-extension vector (theta = 0).
    """

    centre: np.ndarray
    coords: np.ndarray
    lines: np.ndarray
    open_boundary: bool = False
    node_ids: np.ndarray | None = None
    direction: np.ndarray | None = None

    @property
    def n_nodes(self) -> int:
        return len(self.coords)

    @property
    def local(self) -> np.ndarray:
        return self.coords - self.centre


def sbfem_element(coords, centre, open_boundary=False, node_ids=None, direction=None) -> SbfemElement:
    """Line elements between consecutive boundary nodes (closing edge dropped if open)."""
    coords = np.asarray(coords, dtype=float)
    n = len(coords)
    last = n - 1 if open_boundary else n
    lines = np.array([[i, (i + 1) % n] for i in range(last)], dtype=np.int64)
    d = None if direction is None else np.asarray(direction, float) / np.linalg.norm(direction)
    ids = None if node_ids is None else np.asarray(node_ids, dtype=np.int64)
    return SbfemElement(np.asarray(centre, float), coords, lines, open_boundary, ids, d)


def _line_jacobian(p1, p2, scale):
    det = 0.5 * (p1[0] * p2[1] - p2[0] * p1[1])
    if det < -1e-12 * scale:
        raise InvalidScalingCentreError("boundary segment is not visible from the scaling centre")
    if det <= 1e-12 * scale:
        raise JacobianError("line element is radial (zero Jacobian)")
    return det


def _b_matrices(p1, p2, eta, det):
    """B1 = b1 N and B2 = b2 N_eta at parametric point eta of one line element."""
    n1, n2 = 0.5 * (1.0 - eta), 0.5 * (1.0 + eta)
    xb, yb = n1 * p1 + n2 * p2
    xe, ye = 0.5 * (p2 - p1)
    b1 = np.array([[ye, 0.0], [0.0, -xe], [-xe, ye]]) / det
    b2 = np.array([[-yb, 0.0], [0.0, xb], [xb, -yb]]) / det
    N = np.array([[n1, 0.0, n2, 0.0], [0.0, n1, 0.0, n2]])
    Ne = np.array([[-0.5, 0.0, 0.5, 0.0], [0.0, -0.5, 0.0, 0.5]])
    return b1 @ N, b2 @ Ne


def sbfem_coefficient_matrices(element: SbfemElement, D):
    """Assemble E0, E1, E2 over the boundary line elements (2-point Gauss)."""
    D = np.asarray(D, dtype=float)
    loc = element.local
    m = 2 * element.n_nodes
    E0, E1, E2 = np.zeros((m, m)), np.zeros((m, m)), np.zeros((m, m))
    scale = float(np.max(np.abs(loc))) ** 2
    pts, wts = gauss_points(2)
    for a, b in element.lines:
        p1, p2 = loc[a], loc[b]
        det = _line_jacobian(p1, p2, scale)
        dofs = np.array([2 * a, 2 * a + 1, 2 * b, 2 * b + 1])
        e0, e1, e2 = np.zeros((4, 4)), np.zeros((4, 4)), np.zeros((4, 4))
        for eta, w in zip(pts, wts):
            B1, B2 = _b_matrices(p1, p2, eta, det)
            DB1 = D @ B1
            e0 += w * det * B1.T @ DB1
            e1 += w * det * B2.T @ DB1
            e2 += w * det * B2.T @ D @ B2
        ix = np.ix_(dofs, dofs)
        E0[ix] += e0
        E1[ix] += e1
        E2[ix] += e2
    return E0, E1, E2


@dataclass(frozen=True)
class SbfemModalData:
    """Modal solution of one scaled polygon.

    ``Phi_u``/``Phi_q`` columns span, in order, the regular decaying modes,
    the singular modes (``n_singular`` columns, -1 < Re(lambda) < 0) and the
    two translations. ``Lambda`` is block upper-triangular so that
    Z [Phi_u; Phi_q] = [Phi_u; Phi_q] Lambda holds exactly.
    """

    E0: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    Z: np.ndarray
    eigenvalues: np.ndarray  # sorted spectrum of Z (ascending real part)
    Lambda: np.ndarray
    Phi_u: np.ndarray
    Phi_q: np.ndarray
    K: np.ndarray
    asymmetry: float
    n_singular: int

    @property
    def singular_slice(self) -> slice:
        m = len(self.E0)
        return slice(m - 2 - self.n_singular, m - 2)

    @property
    def singular_eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.Lambda[self.singular_slice, self.singular_slice])


def hamiltonian_matrix(E0, E1, E2) -> np.ndarray:
    E0inv = np.linalg.inv(E0)
    return np.block([[E0inv @ E1.T, -E0inv], [E1 @ E0inv @ E1.T - E2, -E1 @ E0inv]])


def sorted_eigenvalues(Z) -> np.ndarray:
    lam = np.linalg.eigvals(Z)
    order = np.lexsort((np.arange(len(lam)), lam.imag, lam.real))
    return lam[order]


def _invariant_subspace(Z, select):
    """Orthonormal real basis Q and block T with Z Q = Q T for selected eigenvalues."""
    T, Q, k = scipy.linalg.schur(Z, output="real", sort=select)
    return Q[:, :k], T[:k, :k]


def sbfem_modal_data(E0, E1, E2, rigid_tol: float = 1e-6, singular_tol: float = 1e-6) -> SbfemModalData:
    """Decaying modes of Z plus the two translations, and K = Phi_q Phi_u^-1.

    Eigenvalues with Re(lambda) < -rigid_tol * rho are kept (rho is the
    spectral radius); the zero eigenvalues of rigid translation form Jordan
    blocks and are replaced by the analytic translation modes. Working with
    real Schur bases instead of individual eigenvectors keeps repeated
    eigenvalues (common on symmetric boundaries) well conditioned.
    """
    m = len(E0)
    scale = float(np.abs(np.diag(E0)).max())
    Z = hamiltonian_matrix(E0 / scale, E1 / scale, E2 / scale)
    lam = sorted_eigenvalues(Z)
    rho = float(np.abs(lam).max())
    cut = rigid_tol * rho

    def is_singular(re):
        return (re > -1.0 + singular_tol) & (re < -singular_tol)

    def regular(re, im=0.0):
        return re < -cut and not is_singular(re)

    def singular(re, im=0.0):
        return re < -cut and is_singular(re)

    n_keep = int(np.sum(lam.real < -cut))
    if n_keep != m - 2:
        raise ModalSelectionError(f"expected {m - 2} decaying modes, found {n_keep}")
    Q1, T1 = _invariant_subspace(Z, regular)
    Q2, T2 = _invariant_subspace(Z, singular)
    if Q1.shape[1] + Q2.shape[1] != m - 2:
        raise ModalSelectionError("mode partition does not match the eigenvalue count")
    trans = np.zeros((2 * m, 2))
    trans[0:m:2, 0] = 1.0
    trans[1:m:2, 1] = 1.0
    Phi = np.column_stack([Q1, Q2, trans])
    Lambda = scipy.linalg.block_diag(T1, T2, np.zeros((2, 2)))
    Phi_u, Phi_q = Phi[:m], Phi[m:] * scale
    if np.linalg.cond(Phi_u) > COND_LIMIT:
        raise ModalSelectionError("modal displacement matrix is ill-conditioned")
    K = np.linalg.solve(Phi_u.T, Phi_q.T).T
    norm = float(np.abs(K).max())
    asym = float(np.abs(K - K.T).max() / norm)
    if asym > 1e-8:
        raise ModalSelectionError(f"SBFEM stiffness asymmetry {asym:.2e} exceeds 1e-8")
    K = 0.5 * (K + K.T)
    return SbfemModalData(E0, E1, E2, Z, lam, Lambda, Phi_u, Phi_q, K, asym, Q2.shape[1])


def sbfem_stiffness(element: SbfemElement, D) -> ElementStiffness:
    modal = sbfem_modal_data(*sbfem_coefficient_matrices(element, D))
    ids = element.node_ids if element.node_ids is not None else np.arange(element.n_nodes)
    return ElementStiffness(modal.K, node_dofs(ids, 2), "sbfem", parts=modal)


@dataclass(frozen=True)
class SifResult:
    K_I: float
    K_II: float
    singular_eigenvalues: np.ndarray
    stress_modes: np.ndarray  # (3, n_singular) crack-frame Voigt rows at theta = 0
    L_O: float


def _ray_intersection(element: SbfemElement, direction):
    """Line element(s) and parametric coordinates hit by the ray theta = 0."""
    loc = element.local
    hits = []
    for k, (a, b) in enumerate(element.lines):
        p1, p2 = loc[a], loc[b]
        # solve s*d = p1 + t*(p2 - p1), t in [0, 1], s > 0
        M = np.column_stack([direction, p1 - p2])
        if abs(np.linalg.det(M)) < 1e-14 * np.dot(p2 - p1, p2 - p1):
            continue
        s, t = np.linalg.solve(M, p1)
        if s > 0 and -1e-9 <= t <= 1 + 1e-9:
            hits.append((k, 2.0 * min(max(t, 0.0), 1.0) - 1.0, s))
    if not hits:
        raise InvalidScalingCentreError("crack-extension ray does not meet the boundary")
    return hits


def _crack_frame_rows(psi, d):
    """Rotate Voigt stress rows (sxx, syy, txy) into the frame with x along ``d``."""
    cth, sth = d
    sxx, syy, txy = psi
    s_xx = sxx * cth**2 + syy * sth**2 + 2.0 * txy * sth * cth
    s_yy = sxx * sth**2 + syy * cth**2 - 2.0 * txy * sth * cth
    t_xy = (syy - sxx) * sth * cth + txy * (cth**2 - sth**2)
    return np.vstack([s_xx, s_yy, t_xy])


def sbfem_stress_and_sif(modal: SbfemModalData, element: SbfemElement, D, u_b, direction=None) -> SifResult:
    """SIFs from the singular stress modes on the ray straight ahead of the tip.

    ``u_b`` holds the element's nodal displacements (interleaved x, y).
    The modes are sampled at the midpoint of every boundary line element,
    where linear elements give their most accurate derivatives, scaled by
    sqrt(2 pi r) of that point, and interpolated in the polar angle to
    theta = 0 through the four samples nearest to the ray.
    """
    d = element.direction if direction is None else np.asarray(direction, float)
    if d is None:
        raise ValueError("crack direction is required")
    d = d / np.linalg.norm(d)
    if modal.n_singular == 0:
        raise NoSingularModeError("no eigenvalue with -1 < Re(lambda) < 0")
    sing = modal.singular_slice
    Lam = modal.Lambda[sing, sing]
    c = np.linalg.solve(modal.Phi_u, np.asarray(u_b, float))
    D = np.asarray(D, dtype=float)
    loc = element.local
    hits = _ray_intersection(element, d)
    L_O = float(np.mean([s for _, _, s in hits]))
    normal = np.array([-d[1], d[0]])
    scale = float(np.max(np.abs(loc))) ** 2
    angles, samples = [], []
    for a, b in element.lines:
        p1, p2 = loc[a], loc[b]
        det = _line_jacobian(p1, p2, scale)
        B1, B2 = _b_matrices(p1, p2, 0.0, det)
        dofs = np.array([2 * a, 2 * a + 1, 2 * b, 2 * b + 1])
        Pu = modal.Phi_u[dofs][:, sing]
        psi = D @ (-B1 @ Pu @ Lam + B2 @ Pu)
        mid = 0.5 * (p1 + p2)
        angles.append(np.arctan2(mid @ normal, mid @ d))
        samples.append(np.sqrt(2.0 * np.pi * np.linalg.norm(mid)) * _crack_frame_rows(psi, d))
    angles = np.asarray(angles)
    samples = np.asarray(samples)  # (n_lines, 3, n_singular)
    order = np.argsort(angles)
    angles, samples = angles[order], samples[order]
    k = int(np.searchsorted(angles, 0.0))
    if k == 0 or k == len(angles):
        raise InvalidScalingCentreError("boundary samples do not straddle the crack-extension ray")
    # Lagrange interpolation through up to two samples on either side of the ray
    idx = np.arange(max(k - 2, 0), min(k + 2, len(angles)))
    rows = np.zeros_like(samples[0])  # sqrt(2 pi r) * stress modes at theta = 0
    for i in idx:
        w = np.prod([(0.0 - angles[j]) / (angles[i] - angles[j]) for j in idx if j != i])
        rows += w * samples[i]
    KI = float(rows[1] @ c[sing])
    KII = float(rows[2] @ c[sing])
    return SifResult(KI, KII, modal.singular_eigenvalues, rows / np.sqrt(2.0 * np.pi * L_O), L_O)
