"""Shape functions and quadrature rules.

Covers the bilinear quad, the trilinear hexahedron, the polygon
averaging value at the centre point, Wachspress coordinates on convex
polygons and the face integrals of shape functions used by the 3D
smoothing and virtual element operators.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import JacobianError, OutOfDomainError, UnsupportedFaceError


@dataclass(frozen=True)
class ShapeEval:
    values: np.ndarray
    gradients: np.ndarray | None = None


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray
    weights: np.ndarray


# ---------------------------------------------------------------------------
# Lagrange families
# ---------------------------------------------------------------------------

_Q4_SIGNS = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])

_HEX8_SIGNS = np.array(
    [
        [-1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0],
        [1.0, 1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
        [1.0, -1.0, 1.0],
        [1.0, 1.0, 1.0],
        [-1.0, 1.0, 1.0],
    ]
)


def q4_shape(xi: float, eta: float) -> ShapeEval:
    """Bilinear quad basis; gradients are w.r.t. (xi, eta)."""
    s = _Q4_SIGNS
    a = 1.0 + s[:, 0] * xi
    b = 1.0 + s[:, 1] * eta
    values = 0.25 * a * b
    grads = 0.25 * np.column_stack([s[:, 0] * b, s[:, 1] * a])
    return ShapeEval(values, grads)


def hex8_shape(xi: float, eta: float, zeta: float) -> ShapeEval:
    """Trilinear 8-node basis; gradients are w.r.t. the reference coordinates."""
    s = _HEX8_SIGNS
    a = 1.0 + s[:, 0] * xi
    b = 1.0 + s[:, 1] * eta
    c = 1.0 + s[:, 2] * zeta
    values = 0.125 * a * b * c
    grads = 0.125 * np.column_stack([s[:, 0] * b * c, s[:, 1] * a * c, s[:, 2] * a * b])
    return ShapeEval(values, grads)


def polygon_center_shape(n: int) -> ShapeEval:
    """Shape function values at the vertex-average point of an n-gon."""
    if n < 3:
        raise ValueError(f"a polygon needs at least 3 nodes, got {n}")
    return ShapeEval(np.full(n, 1.0 / n))


# ---------------------------------------------------------------------------
# Wachspress coordinates
# ---------------------------------------------------------------------------


def _edge_normals(poly):
    edges = np.roll(poly, -1, axis=0) - poly
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    normals = np.column_stack([edges[:, 1], -edges[:, 0]]) / lengths[:, None]
    return normals, lengths


def is_strictly_convex(poly: np.ndarray, tol: float = 1e-12) -> bool:
    e = np.roll(poly, -1, axis=0) - poly
    e_next = np.roll(e, -1, axis=0)
    cross = e[:, 0] * e_next[:, 1] - e[:, 1] * e_next[:, 0]
    scale = np.max(np.hypot(e[:, 0], e[:, 1])) ** 2
    return bool(np.all(cross > tol * scale))


def wachspress_shape(poly: np.ndarray, x) -> ShapeEval:
    """Wachspress coordinates of point ``x`` in a strictly convex CCW polygon.

    Gradients are returned for interior points only.
    """
    poly = np.asarray(poly, dtype=float)
    x = np.asarray(x, dtype=float)
    n = len(poly)
    if not is_strictly_convex(poly):
        raise UnsupportedFaceError("Wachspress coordinates need a strictly convex polygon")
    normals, lengths = _edge_normals(poly)
    diam = np.max(np.linalg.norm(poly[:, None, :] - poly[None, :, :], axis=2))
    tol = 1e-12 * diam
    # distance from x to each edge line, positive inside
    h = np.einsum("ij,ij->i", poly - x, normals)
    if np.any(h < -tol):
        raise OutOfDomainError(f"point {x.tolist()} lies outside the polygon")
    on_edge = np.flatnonzero(np.abs(h) <= tol)
    if on_edge.size:
        values = np.zeros(n)
        d = np.linalg.norm(poly - x, axis=1)
        k = int(np.argmin(d))
        if d[k] <= tol:
            values[k] = 1.0
            return ShapeEval(values)
        j = int(on_edge[0])
        jn = (j + 1) % n
        t = np.linalg.norm(x - poly[j]) / lengths[j]
        values[j] = 1.0 - t
        values[jn] = t
        return ShapeEval(values)
    n_prev = np.roll(normals, 1, axis=0)
    h_prev = np.roll(h, 1)
    cross = n_prev[:, 0] * normals[:, 1] - n_prev[:, 1] * normals[:, 0]
    w = cross / (h_prev * h)
    values = w / w.sum()
    r = n_prev / h_prev[:, None] + normals / h[:, None]
    grads = values[:, None] * (r - values @ r)
    return ShapeEval(values, grads)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

_TRIANGLE_RULES = {
    1: (np.array([[1.0 / 3.0, 1.0 / 3.0]]), np.array([0.5])),
    2: (
        np.array([[1.0 / 6.0, 1.0 / 6.0], [2.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 2.0 / 3.0]]),
        np.full(3, 1.0 / 6.0),
    ),
}


@lru_cache(maxsize=None)
def _gauss(npts: int):
    return np.polynomial.legendre.leggauss(npts)


def gauss_points(npts: int):
    """Gauss-Legendre points and weights on [-1, 1]."""
    p, w = _gauss(npts)
    return p.copy(), w.copy()


def quadrature_rule(kind: str, order: int) -> QuadratureRule:
    """Rule exact for polynomials of degree ``order`` on the reference domain.

    ``segment`` lives on [-1, 1]; ``triangle`` on the unit right triangle.
    Segments accept orders 1-9 (Gauss-Legendre), triangles 1-2.
    """
    if kind == "segment":
        if not 1 <= order <= 9:
            raise ValueError(f"unsupported segment order {order}")
        p, w = gauss_points((order + 2) // 2)
        return QuadratureRule(p[:, None], w)
    if kind == "triangle":
        if order not in _TRIANGLE_RULES:
            raise ValueError(f"unsupported triangle order {order}")
        p, w = _TRIANGLE_RULES[order]
        return QuadratureRule(p.copy(), w.copy())
    raise ValueError(f"unknown quadrature kind {kind!r}")


# ---------------------------------------------------------------------------
# Face integrals (3D)
# ---------------------------------------------------------------------------


def newell_normal(face: np.ndarray) -> np.ndarray:
    """Area vector of a (possibly non-planar) polygon loop, right-hand rule."""
    nxt = np.roll(face, -1, axis=0)
    return 0.5 * np.cross(face, nxt).sum(axis=0)


def face_frame(face: np.ndarray, planar_tol: float = 1e-10):
    """Project a planar 3D face onto its own plane.

    Returns (local 2D coordinates, unit normal). Non-planar faces raise
    :class:`UnsupportedFaceError`.
    """
    face = np.asarray(face, dtype=float)
    if face.shape[1] == 2:
        return face, np.array([0.0, 0.0, 1.0])
    av = newell_normal(face)
    area = np.linalg.norm(av)
    if area < 1e-14:
        raise UnsupportedFaceError("face has zero area")
    n = av / area
    origin = face.mean(axis=0)
    diam = np.max(np.linalg.norm(face - origin, axis=1))
    if np.max(np.abs((face - origin) @ n)) > planar_tol * diam:
        raise UnsupportedFaceError("face is not planar")
    e1 = face[1] - face[0]
    e1 = e1 - (e1 @ n) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    local = np.column_stack([(face - origin) @ e1, (face - origin) @ e2])
    return local, n


def _polygon_area_centroid(p):
    x, y = p[:, 0], p[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    a = 0.5 * cr.sum()
    c = np.array([((x + xn) * cr).sum(), ((y + yn) * cr).sum()]) / (6.0 * a)
    return a, c


def _nodal_weights(local):
    a, c = _polygon_area_centroid(local)
    nxt = np.roll(local, -1, axis=0)
    tri = (local[:, 0] - c[0]) * (nxt[:, 1] - c[1]) - (local[:, 1] - c[1]) * (nxt[:, 0] - c[0])
    if np.any(tri <= 1e-14 * abs(a)):
        raise UnsupportedFaceError("nodal quadrature needs a face star-convex w.r.t. its centroid")
    mid_next = 0.5 * (local + nxt)
    mid_prev = np.roll(mid_next, 1, axis=0)
    quads = np.stack([local, mid_next, np.broadcast_to(c, local.shape), mid_prev], axis=1)
    qa = 0.5 * np.sum(quads[:, :, 0] * np.roll(quads[:, :, 1], -1, axis=1)
                      - np.roll(quads[:, :, 0], -1, axis=1) * quads[:, :, 1], axis=1)
    return qa


@lru_cache(maxsize=None)
def _regular_polygon(n: int):
    ang = 2.0 * np.pi * np.arange(n) / n + 0.5 * np.pi
    return np.column_stack([np.cos(ang), np.sin(ang)])


def _conforming_weights(local, order=2):
    n = len(local)
    reg = _regular_polygon(n)
    rule = quadrature_rule("triangle", order)
    out = np.zeros(n)
    for k in range(n):
        a, b = reg[k], reg[(k + 1) % n]
        jt = a[0] * b[1] - a[1] * b[0]
        for (s, t), w in zip(rule.points, rule.weights):
            p = s * a + t * b
            ev = wachspress_shape(reg, p)
            jac = local.T @ ev.gradients
            det = np.linalg.det(jac)
            if det <= 0.0:
                raise JacobianError("non-positive Jacobian in conforming face mapping")
            out += w * jt * det * ev.values
    return out


def face_shape_integrals(face, scheme: str = "nodal") -> np.ndarray:
    """Integrals of every node's shape function over a planar polygonal face."""
    local, _ = face_frame(face)
    if _polygon_area_centroid(local)[0] <= 0.0:
        raise UnsupportedFaceError("face loop must be counter-clockwise in its own frame")
    if scheme == "nodal":
        return _nodal_weights(local)
    if scheme == "conforming":
        if not is_strictly_convex(local):
            raise UnsupportedFaceError("conforming scheme needs a strictly convex face")
        return _conforming_weights(local)
    raise ValueError(f"unknown face scheme {scheme!r}")


def face_shape_integral(face, node: int, scheme: str = "nodal") -> float:
    return float(face_shape_integrals(face, scheme)[node])


def bilinear_face_vector_integrals(face: np.ndarray) -> np.ndarray:
    """Exact integrals of N_I n dS over a 4-node bilinear (possibly warped) face.

    The integrand is biquadratic in the face coordinates, so 2x2 Gauss is exact.
    """
    p, w = _gauss(2)
    out = np.zeros((4, 3))
    for xi, wx in zip(p, w):
        for eta, wy in zip(p, w):
            ev = q4_shape(xi, eta)
            dx = face.T @ ev.gradients
            nda = np.cross(dx[:, 0], dx[:, 1])
            out += wx * wy * np.outer(ev.values, nda)
    return out


def bilinear_face_moment(face: np.ndarray) -> float:
    """Exact integral of x . n dS over a bilinear face."""
    p, w = _gauss(2)
    total = 0.0
    for xi, wx in zip(p, w):
        for eta, wy in zip(p, w):
            ev = q4_shape(xi, eta)
            dx = face.T @ ev.gradients
            total += wx * wy * (ev.values @ face) @ np.cross(dx[:, 0], dx[:, 1])
    return total


def face_vector_integrals(face, scheme: str = "nodal") -> np.ndarray:
    """Vector integrals of N_I n dS over one face, shape (n_nodes, 3).

    ``bilinear`` is only valid for 4-node faces and does not require planarity.
    """
    face = np.asarray(face, dtype=float)
    if scheme == "bilinear":
        if len(face) != 4:
            raise UnsupportedFaceError("bilinear scheme needs a 4-node face")
        return bilinear_face_vector_integrals(face)
    _, n = face_frame(face)
    return np.outer(face_shape_integrals(face, scheme), n)
