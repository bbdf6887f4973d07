"""Displacement (L2) and energy-type (H1) error norms, and convergence slopes.

The strain compared with the exact one is the strain the method produces:
compatible strain for ``fem``, the constant smoothed strain of each
smoothing cell for ``sfem``, and the one-cell projected strain for
``stab`` and ``vem``. The energy norm is weighted by D.
"""
from __future__ import annotations

import numpy as np

from ..interp import gauss_points, q4_shape, quadrature_rule
from ..mesh import polygon_subcells
from ..smoothing import smoothed_gradient_2d, smoothed_gradient_3d, strain_matrix_2d, strain_matrix_3d
from .assembly import Formulation, hex8_gradients
from .material import constitutive_matrix

_TRI2 = quadrature_rule("triangle", 2)


def _fan_points(poly):
    """Degree-2 fan quadrature about the vertex average.

    Returns points, weights and the (npts, n) values of the piecewise linear
    interpolant whose centre value is the mean of the vertex values.
    """
    n = len(poly)
    c = poly.mean(axis=0)
    pts, wts, vals = [], [], []
    for i in range(n):
        j = (i + 1) % n
        e1, e2 = poly[i] - c, poly[j] - c
        area2 = e1[0] * e2[1] - e1[1] * e2[0]
        for (r, s), w in zip(_TRI2.points, _TRI2.weights):
            l0 = 1.0 - r - s
            pts.append(l0 * c + r * poly[i] + s * poly[j])
            wts.append(w * area2)
            v = np.full(n, l0 / n)
            v[i] += r
            v[j] += s
            vals.append(v)
    return np.array(pts), np.array(wts), np.array(vals)


def _q4_points(coords, npts=3):
    g, w = gauss_points(npts)
    pts, wts, vals, grads = [], [], [], []
    for a, wa in zip(g, w):
        for b, wb in zip(g, w):
            s = q4_shape(a, b)
            J = s.gradients.T @ coords
            pts.append(s.values @ coords)
            wts.append(wa * wb * np.linalg.det(J))
            vals.append(s.values)
            grads.append(s.gradients @ np.linalg.inv(J).T)
    return np.array(pts), np.array(wts), np.array(vals), grads


def _hex_points(coords, npts=3):
    g, w = gauss_points(npts)
    pts, wts, vals, grads = [], [], [], []
    for a, wa in zip(g, w):
        for b, wb in zip(g, w):
            for c, wc in zip(g, w):
                v, grad, detJ = hex8_gradients(coords, a, b, c)
                pts.append(v @ coords)
                wts.append(wa * wb * wc * detJ)
                vals.append(v)
                grads.append(grad)
    return np.array(pts), np.array(wts), np.array(vals), grads


class _Accumulator:
    def __init__(self, D):
        self.D = D
        self.l2 = self.u2 = self.h1 = self.e2 = 0.0

    def disp(self, wts, u_exact, u_h):
        d = u_exact - u_h
        self.l2 += float(wts @ np.einsum("ij,ij->i", d, d))
        self.u2 += float(wts @ np.einsum("ij,ij->i", u_exact, u_exact))

    def strain(self, wts, e_exact, e_h):
        d = e_exact - e_h
        self.h1 += float(wts @ np.einsum("ij,jk,ik->i", d, self.D, d))
        self.e2 += float(wts @ np.einsum("ij,jk,ik->i", e_exact, self.D, e_exact))


def _elements_2d(solution, exact, acc, f):
    mesh = solution.mesh
    if mesh.crack_tips:
        raise ValueError("error norms are not defined on meshes with crack-tip polygons")
    for e, loop in enumerate(mesh.elements):
        coords = mesh.nodes[loop]
        ue = solution.vector[(loop[:, None] * 2 + np.arange(2)).ravel()]
        U = ue.reshape(-1, 2)
        if f.kind == "fem" and len(loop) == 4:
            pts, wts, vals, grads = _q4_points(coords)
            ex = exact(pts)
            acc.disp(wts, ex.displacement, vals @ U)
            eh = np.array([strain_matrix_2d(g) @ ue for g in grads])
            acc.strain(wts, ex.strain, eh)
            continue
        pts, wts, vals = _fan_points(coords)
        acc.disp(wts, exact(pts).displacement, vals @ U)
        nc = {"fem": len(loop), "sfem": f.nc}.get(f.kind, 1)
        for k, sub in enumerate(polygon_subcells(coords, nc, e)):
            op = smoothed_gradient_2d(sub, k)
            sp_, sw, _ = _fan_points(np.asarray(sub.vertices))
            eh = op.B @ ue
            acc.strain(sw, exact(sp_).strain, np.tile(eh, (len(sw), 1)))


def _elements_3d(solution, exact, acc, f):
    mesh = solution.mesh
    if mesh.hexes is None:
        raise ValueError("3D error norms are implemented for hexahedral meshes")
    for c, ids in enumerate(mesh.hexes):
        coords = mesh.nodes[ids]
        ue = solution.vector[(ids[:, None] * 3 + np.arange(3)).ravel()]
        pts, wts, vals, grads = _hex_points(coords)
        ex = exact(pts)
        acc.disp(wts, ex.displacement, vals @ ue.reshape(-1, 3))
        if f.kind == "fem":
            eh = np.array([strain_matrix_3d(g) @ ue for g in grads])
        else:
            cids, op = smoothed_gradient_3d(mesh, c)
            uc = solution.vector[(cids[:, None] * 3 + np.arange(3)).ravel()]
            eh = np.tile(op.B @ uc, (len(wts), 1))
        acc.strain(wts, ex.strain, eh)


def error_norms(solution, exact_field, mesh=None, relative: bool = True) -> tuple:
    """(L2, H1) error of ``solution`` against ``exact_field(points) -> FieldSample``.

    With ``relative`` the norms are divided by those of the exact field.
    """
    if mesh is not None and mesh is not solution.mesh:
        raise ValueError("solution was computed on a different mesh")
    f = Formulation.parse(solution.formulation)
    acc = _Accumulator(constitutive_matrix(solution.material))
    if solution.mesh.dim == 2:
        _elements_2d(solution, exact_field, acc, f)
    else:
        _elements_3d(solution, exact_field, acc, f)
    l2, h1 = np.sqrt(acc.l2), np.sqrt(acc.h1)
    if relative:
        l2 = l2 / np.sqrt(acc.u2) if acc.u2 > 0 else l2
        h1 = h1 / np.sqrt(acc.e2) if acc.e2 > 0 else h1
    return float(l2), float(h1)


def convergence_rate(h_list, e_list) -> float:
    """Least-squares slope of log(e) against log(h)."""
    h = np.asarray(h_list, float)
    e = np.asarray(e_list, float)
    if h.shape != e.shape or h.ndim != 1:
        raise ValueError("h and e must be 1D sequences of equal length")
    if len(h) < 2:
        raise ValueError("at least two (h, e) pairs are required")
    if np.any(h <= 0) or np.any(e <= 0):
        raise ValueError("h and e must be positive")
    dh = np.diff(h)
    if not (np.all(dh < 0) or np.all(dh > 0)):
        raise ValueError("h must be strictly monotone")
    slope, _ = np.polyfit(np.log(h), np.log(e), 1)
    return float(slope)
