"""Global assembly, boundary conditions and the linear solve."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .. import _kernels
from ..element import ElementStiffness, node_dofs
from ..errors import ConstraintDeficiencyError
from ..interp import gauss_points, hex8_shape, q4_shape, quadrature_rule
from ..mesh import PolyMesh2D, subdivide_element_edges
from ..sbfem import sbfem_element, sbfem_stiffness, sbfem_stress_and_sif
from ..smoothing import sfem_stiffness_2d, sfem_stiffness_3d
from ..stab import stabilized_stiffness_2d, stabilized_stiffness_3d
from ..vem import vem_elasticity_2d_stiffness, vem_elasticity_3d_stiffness
from .material import Material, constitutive_matrix

KINDS = ("fem", "sfem", "vem", "stab", "sbfem")


@dataclass(frozen=True)
class Formulation:
    """Element technology: ``kind`` plus its parameters.

    ``nc`` is the number of smoothing cells (sfem only) and ``alpha_star``
    the stabilization factor (stab, vem, and the non-tip elements of sbfem).
    """

    kind: str
    nc: int = 1
    alpha_star: float = 0.1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown formulation {self.kind!r}; expected one of {KINDS}")
        if self.nc < 1:
            raise ValueError("nc must be >= 1")
        if self.alpha_star < 0:
            raise ValueError("alpha_star must be non-negative")

    @classmethod
    def parse(cls, value, alpha_star: float | None = None) -> "Formulation":
        """Accept a Formulation, ``"stab"``, or ``"sfem:2"`` (kind:nc)."""
        if isinstance(value, Formulation):
            return value if alpha_star is None else cls(value.kind, value.nc, alpha_star)
        kind, _, arg = str(value).lower().partition(":")
        kw = {}
        if arg:
            if kind != "sfem":
                raise ValueError(f"only sfem takes a subcell count, got {value!r}")
            kw["nc"] = int(arg)
        if alpha_star is not None:
            kw["alpha_star"] = float(alpha_star)
        return cls(kind, **kw)

    @property
    def tag(self) -> str:
        if self.kind == "sfem":
            return f"sfem(nc={self.nc})"
        if self.kind in ("stab", "vem", "sbfem"):
            return f"{self.kind}(alpha*={self.alpha_star:g})"
        return self.kind


class BoundaryConditions:
    """Prescribed DOF values and a nodal load vector for one mesh."""

    def __init__(self, mesh):
        self.mesh = mesh
        self.dim = mesh.dim
        self.ndof = mesh.n_nodes * self.dim
        self._fixed: dict[int, float] = {}
        self.loads = np.zeros(self.ndof)

    # -- essential conditions -------------------------------------------------
    def fix(self, nodes, components=None, values=0.0) -> "BoundaryConditions":
        """Prescribe ``values`` (scalar, per-component, or (N, ncomp)) on the given components."""
        nodes = np.asarray(sorted(set(int(n) for n in np.atleast_1d(nodes))), dtype=np.int64)
        comps = tuple(range(self.dim)) if components is None else tuple(np.atleast_1d(components))
        vals = np.broadcast_to(np.asarray(values, float), (len(nodes), len(comps)))
        for i, n in enumerate(nodes):
            for j, c in enumerate(comps):
                self._fixed[int(n) * self.dim + int(c)] = float(vals[i, j])
        return self

    def prescribe(self, nodes, displacement_fn, components=None) -> "BoundaryConditions":
        """Prescribe u = displacement_fn(points) ((N, dim) array) on ``nodes``."""
        nodes = np.asarray(sorted(set(int(n) for n in np.atleast_1d(nodes))), dtype=np.int64)
        u = np.asarray(displacement_fn(self.mesh.nodes[nodes]), float)
        comps = tuple(range(self.dim)) if components is None else tuple(np.atleast_1d(components))
        return self.fix(nodes, comps, u[:, comps])

    @property
    def fixed_dofs(self) -> np.ndarray:
        return np.array(sorted(self._fixed), dtype=np.int64)

    @property
    def fixed_values(self) -> np.ndarray:
        return np.array([self._fixed[d] for d in sorted(self._fixed)])

    # -- natural conditions ---------------------------------------------------
    def add_point_load(self, node: int, force) -> "BoundaryConditions":
        self.loads[node * self.dim:(node + 1) * self.dim] += np.asarray(force, float)
        return self

    def add_edge_traction(self, edges, traction_fn, npts: int = 2) -> "BoundaryConditions":
        """Integrate t = traction_fn(points, normals) along 2D edges (a, b).

        Edges are taken in boundary loop order, so the outward normal is the
        edge direction turned clockwise.
        """
        xi, w = gauss_points(npts)
        nodes = self.mesh.nodes
        for a, b in edges:
            pa, pb = nodes[a], nodes[b]
            d = pb - pa
            length = float(np.hypot(*d))
            normal = np.array([d[1], -d[0]]) / length
            Na, Nb = 0.5 * (1 - xi), 0.5 * (1 + xi)
            pts = Na[:, None] * pa + Nb[:, None] * pb
            t = np.asarray(traction_fn(pts, np.tile(normal, (npts, 1))), float)
            scale = 0.5 * length * w
            self.loads[2 * a:2 * a + 2] += (scale * Na) @ t
            self.loads[2 * b:2 * b + 2] += (scale * Nb) @ t
        return self

    def add_face_traction(self, face_ids, traction_fn, npts: int = 3) -> "BoundaryConditions":
        """Integrate t = traction_fn(points, outward normals) over 3D boundary faces.

        Quadrilateral faces use the bilinear map with npts x npts Gauss points;
        other faces are split into triangles about the vertex average (value
        there = mean of the nodal values) with a degree-2 rule.
        """
        mesh = self.mesh
        owner = _face_owner_sign(mesh)
        for f in face_ids:
            loop = mesh.faces[f]
            if owner.get(int(f), 1) < 0:
                loop = loop[::-1]
            p = mesh.nodes[loop]
            pts, wts, normals, N = _face_quadrature(p, npts)
            t = np.asarray(traction_fn(pts, normals), float)
            contrib = (N * wts[:, None]).T @ t  # (nloop, 3)
            for k, node in enumerate(loop):
                self.loads[3 * node:3 * node + 3] += contrib[k]
        return self


def _face_owner_sign(mesh) -> dict:
    sign = {}
    for c, (fids, orient) in enumerate(zip(mesh.cells, mesh.orientation)):
        for f, s in zip(fids, orient):
            sign.setdefault(int(f), int(s))
    return sign


def _face_quadrature(p, npts):
    """Points, weights (area), unit normals and shape values on a face loop."""
    if len(p) == 4:
        g, gw = gauss_points(npts)
        pts, wts, nrm, vals = [], [], [], []
        for a, wa in zip(g, gw):
            for b, wb in zip(g, gw):
                s = q4_shape(a, b)
                x = s.values @ p
                J = s.gradients.T @ p  # (2, 3)
                cr = np.cross(J[0], J[1])
                dA = np.linalg.norm(cr)
                pts.append(x)
                wts.append(wa * wb * dA)
                nrm.append(cr / dA)
                vals.append(s.values)
        return np.array(pts), np.array(wts), np.array(nrm), np.array(vals)
    n = len(p)
    c = p.mean(axis=0)
    rule = quadrature_rule("triangle", 2)
    pts, wts, nrm, vals = [], [], [], []
    for i in range(n):
        j = (i + 1) % n
        cr = np.cross(p[i] - c, p[j] - c)
        area2 = np.linalg.norm(cr)
        for (r, s), w in zip(rule.points, rule.weights):
            l0 = 1.0 - r - s
            pts.append(l0 * c + r * p[i] + s * p[j])
            wts.append(w * area2)
            nrm.append(cr / area2)
            v = np.full(n, l0 / n)
            v[i] += r
            v[j] += s
            vals.append(v)
    return np.array(pts), np.array(wts), np.array(nrm), np.array(vals)


# ---------------------------------------------------------------------------
# Element matrices
# ---------------------------------------------------------------------------


def q4_stiffness(coords, D, nodes=None, npts: int = 2) -> ElementStiffness:
    g, w = gauss_points(npts)
    K = np.zeros((8, 8))
    for a, wa in zip(g, w):
        for b, wb in zip(g, w):
            s = q4_shape(a, b)
            J = s.gradients.T @ coords
            detJ = np.linalg.det(J)
            grad = s.gradients @ np.linalg.inv(J).T
            B = np.zeros((3, 8))
            B[0, 0::2] = grad[:, 0]
            B[1, 1::2] = grad[:, 1]
            B[2, 0::2] = grad[:, 1]
            B[2, 1::2] = grad[:, 0]
            K += wa * wb * detJ * B.T @ D @ B
    dofs = node_dofs(np.arange(4) if nodes is None else nodes, 2)
    return ElementStiffness(0.5 * (K + K.T), dofs, "fem")


def hex8_gradients(coords, xi, eta, zeta):
    s = hex8_shape(xi, eta, zeta)
    J = s.gradients.T @ coords
    return s.values, s.gradients @ np.linalg.inv(J).T, np.linalg.det(J)


def hex8_stiffness(coords, D, nodes=None, npts: int = 2) -> ElementStiffness:
    from ..smoothing import strain_matrix_3d

    g, w = gauss_points(npts)
    K = np.zeros((24, 24))
    for a, wa in zip(g, w):
        for b, wb in zip(g, w):
            for c, wc in zip(g, w):
                _, grad, detJ = hex8_gradients(coords, a, b, c)
                B = strain_matrix_3d(grad)
                K += wa * wb * wc * detJ * B.T @ D @ B
    dofs = node_dofs(np.arange(8) if nodes is None else nodes, 3)
    return ElementStiffness(0.5 * (K + K.T), dofs, "fem")


def element_stiffness(mesh, e: int, formulation: Formulation, D) -> ElementStiffness:
    """Element matrix of element/cell ``e`` with global DOF ids."""
    f = formulation
    if mesh.dim == 2:
        nodes = mesh.elements[e]
        coords = mesh.nodes[nodes]
        if e in mesh.sbfem_elements:
            if f.kind != "sbfem":
                raise ValueError(f"element {e} is a crack-tip polygon; use the sbfem formulation")
            ct = mesh.sbfem_elements[e]
            el = sbfem_element(coords, ct.tip, open_boundary=True, node_ids=nodes, direction=ct.direction)
            k = sbfem_stiffness(el, D)
            k.extra["element"] = el
            return k
        if f.kind == "fem":
            if len(nodes) == 4:
                return q4_stiffness(coords, D, nodes)
            k = sfem_stiffness_2d(coords, len(nodes), D, nodes)
            k.formulation = "fem"
            return k
        if f.kind == "sfem":
            return sfem_stiffness_2d(coords, f.nc, D, nodes)
        if f.kind == "vem":
            return vem_elasticity_2d_stiffness(coords, D, f.alpha_star, nodes)
        return stabilized_stiffness_2d(coords, D, f.alpha_star, nodes)
    if f.kind == "fem":
        if mesh.hexes is None:
            raise ValueError("the trilinear FEM baseline needs a hexahedral mesh")
        ids = mesh.hexes[e]
        return hex8_stiffness(mesh.nodes[ids], D, ids)
    if f.kind == "sfem":
        return sfem_stiffness_3d(mesh, e, D, f.nc)
    if f.kind == "vem":
        return vem_elasticity_3d_stiffness(mesh, e, D, f.alpha_star)
    if f.kind == "stab":
        return stabilized_stiffness_3d(mesh, e, D, f.alpha_star)
    raise ValueError("the sbfem formulation is two-dimensional")


@dataclass
class GlobalSystem:
    K: sp.csr_matrix
    D: np.ndarray
    formulation: Formulation
    special: dict = field(default_factory=dict)  # element id -> ElementStiffness kept for post-processing


def _uses_batch_kernel(mesh, f: Formulation) -> bool:
    return mesh.dim == 2 and (f.kind in ("stab", "sbfem") or (f.kind == "sfem" and f.nc == 1))


def assemble(mesh, formulation, material: Material) -> GlobalSystem:
    """Sparse global stiffness for the chosen formulation."""
    f = Formulation.parse(formulation)
    if material.dim != mesh.dim:
        raise ValueError(f"material mode {material.mode!r} does not match a {mesh.dim}D mesh")
    D = constitutive_matrix(material)
    ndof = mesh.n_nodes * mesh.dim
    rows, cols, vals = [], [], []
    special = {}
    todo = range(mesh.n_elements)
    if _uses_batch_kernel(mesh, f):
        tips = mesh.sbfem_elements
        batch = [e for e in range(mesh.n_elements) if e not in tips]
        if batch:
            conn = np.concatenate([mesh.elements[e] for e in batch])
            offsets = np.concatenate([[0], np.cumsum([len(mesh.elements[e]) for e in batch])])
            alpha = 0.0 if f.kind == "sfem" else f.alpha_star
            r, c, v = _kernels.stab2d_batch(mesh.nodes, conn, offsets, D, alpha)
            rows.append(r)
            cols.append(c)
            vals.append(v)
        todo = sorted(tips)
    for e in todo:
        k = element_stiffness(mesh, e, f, D)
        n = len(k.dofs)
        rows.append(np.repeat(k.dofs, n))
        cols.append(np.tile(k.dofs, n))
        vals.append(k.matrix.ravel())
        if k.formulation == "sbfem":
            special[e] = k
    if rows:
        K = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(ndof, ndof))
    else:
        K = sp.coo_matrix((ndof, ndof))
    return GlobalSystem(K.tocsr(), D, f, special)


# ---------------------------------------------------------------------------
# Solve
# ---------------------------------------------------------------------------

PIVOT_TOL = 1e-11


@dataclass
class Solution:
    mesh: object
    formulation: Formulation
    material: Material
    vector: np.ndarray  # interleaved global displacements
    reactions: np.ndarray  # K u - f on every DOF (zero up to round-off on free DOFs)
    system: GlobalSystem
    loads: np.ndarray

    @property
    def displacement(self) -> np.ndarray:
        return self.vector.reshape(-1, self.mesh.dim)

    def element_displacements(self, e: int) -> np.ndarray:
        ids = self.mesh.elements[e] if self.mesh.dim == 2 else self.mesh.cell_nodes(e)
        return self.vector[node_dofs(ids, self.mesh.dim)]

    def equilibrium_residual(self) -> np.ndarray:
        """Per-axis |sum(reactions) + sum(applied loads)| relative to the load scale."""
        dim = self.mesh.dim
        r = self.reactions
        total = r.reshape(-1, dim).sum(axis=0) + self.loads.reshape(-1, dim).sum(axis=0)
        scale = max(np.abs(r).sum(), np.abs(self.loads).sum(), 1e-300)
        return np.abs(total) / scale


def _factorize(A):
    return spla.splu(A, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0, options={"SymmetricMode": True})


def solve_system(K, loads, fixed_dofs, fixed_values):
    """Condense prescribed DOFs, factorize, and return (u, K u - f)."""
    K = sp.csr_matrix(K)
    ndof = K.shape[0]
    u = np.zeros(ndof)
    fixed_dofs = np.asarray(fixed_dofs, dtype=np.int64)
    u[fixed_dofs] = fixed_values
    free = np.setdiff1d(np.arange(ndof), fixed_dofs)
    if len(free):
        Kff = K[free][:, free].tocsc()
        rhs = loads[free] - K[free][:, fixed_dofs] @ u[fixed_dofs]
        diag_scale = max(float(np.abs(Kff.diagonal()).max(initial=0.0)), 1e-300)
        try:
            lu = _factorize(Kff)
        except RuntimeError:
            # an exactly zero pivot: count the deficient modes on a slightly shifted copy
            shift = 1e-3 * PIVOT_TOL * diag_scale
            piv = np.abs(_factorize(Kff + shift * sp.identity(Kff.shape[0], format="csc")).U.diagonal())
            zero = max(int(np.sum(piv < PIVOT_TOL * diag_scale)), 1)
            raise ConstraintDeficiencyError(
                f"stiffness matrix is singular: {zero} zero-energy mode(s) remain after applying constraints",
                zero_modes=zero,
            ) from None
        piv = np.abs(lu.U.diagonal())
        zero = int(np.sum(piv < PIVOT_TOL * diag_scale))
        if zero:
            raise ConstraintDeficiencyError(
                f"{zero} zero-energy mode(s) remain after applying constraints", zero_modes=zero
            )
        u[free] = lu.solve(rhs)
    reactions = K @ u - loads
    return u, reactions


def solve(system: GlobalSystem, mesh, material: Material, bcs: BoundaryConditions) -> Solution:
    u, r = solve_system(system.K, bcs.loads, bcs.fixed_dofs, bcs.fixed_values)
    return Solution(mesh, system.formulation, material, u, r, system, bcs.loads.copy())


def assemble_and_solve(mesh, formulation, material: Material, bcs: BoundaryConditions) -> Solution:
    """Assemble the global stiffness, apply ``bcs`` and solve for the displacements."""
    system = assemble(mesh, formulation, material)
    return solve(system, mesh, material, bcs)


# ---------------------------------------------------------------------------
# Crack-tip helpers
# ---------------------------------------------------------------------------


def refine_crack_tips(mesh: PolyMesh2D, nsub: int = 5) -> PolyMesh2D:
    """Split the boundary edges of every crack-tip polygon into ``nsub`` segments."""
    for ct in mesh.crack_tips:
        mesh = subdivide_element_edges(mesh, ct.element, nsub)
    return mesh


def stress_intensity_factors(solution: Solution) -> list:
    """SifResult of every crack-tip polygon, in the order of ``mesh.crack_tips``."""
    out = []
    for ct in solution.mesh.crack_tips:
        k = solution.system.special.get(ct.element)
        if k is None:
            raise ValueError("crack-tip polygons were not assembled with the sbfem formulation")
        u_b = solution.vector[k.dofs]
        out.append(sbfem_stress_and_sif(k.parts, k.extra["element"], solution.system.D, u_b))
    return out


def node_set(mesh, predicate) -> np.ndarray:
    """Ids of nodes whose coordinates satisfy ``predicate(points) -> bool array``."""
    return np.nonzero(predicate(mesh.nodes))[0]


def tagged_nodes(mesh, tag: str) -> np.ndarray:
    """Nodes on a boundary tag (edge pairs in 2D, face ids in 3D)."""
    if tag not in mesh.boundary_tags:
        known = ", ".join(sorted(mesh.boundary_tags)) or "none"
        raise ValueError(f"mesh has no boundary tag {tag!r} (available: {known})")
    items = mesh.boundary_tags[tag]
    if mesh.dim == 2:
        return np.unique(np.asarray(items, dtype=np.int64).ravel()) if len(items) else np.zeros(0, np.int64)
    if not len(items):
        return np.zeros(0, np.int64)
    return np.unique(np.concatenate([mesh.faces[f] for f in items]))


__all__ = [
    "KINDS", "Formulation", "BoundaryConditions", "GlobalSystem", "Solution", "assemble", "solve",
    "solve_system", "assemble_and_solve", "element_stiffness", "q4_stiffness", "hex8_stiffness",
    "refine_crack_tips", "stress_intensity_factors", "node_set", "tagged_nodes",
]
