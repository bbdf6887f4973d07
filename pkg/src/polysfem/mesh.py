"""Polygonal / polyhedral mesh data model, generators, geometry and I/O."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DegenerateElementError, MeshLoadError
from .interp import bilinear_face_moment, newell_normal, q4_shape

AREA_TOL = 1e-14


# ---------------------------------------------------------------------------
# Polygon geometry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolygonGeometry:
    area: float
    centroid: np.ndarray  # area centroid
    vertex_mean: np.ndarray  # point O of the averaging interpolant
    lengths: np.ndarray
    normals: np.ndarray  # outward unit normal of edge i (node i -> i+1)
    midpoints: np.ndarray


def polygon_geometry(coords) -> PolygonGeometry:
    """Shoelace area, centroids and edge data of a CCW polygon.

    Zero-length edges (the closing edge of a cracked SBFEM polygon) are
    given a zero normal.
    """
    p = np.asarray(coords, dtype=float)
    if p.ndim != 2 or p.shape[1] != 2 or len(p) < 3:
        raise ValueError("polygon needs at least 3 2D vertices")
    q = np.roll(p, -1, axis=0)
    cr = p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]
    area = 0.5 * cr.sum()
    if abs(area) < AREA_TOL:
        raise DegenerateElementError(f"polygon area {area:.3e} below tolerance")
    if area < 0.0:
        raise DegenerateElementError("polygon is clockwise (negative area)")
    centroid = np.array([((p[:, 0] + q[:, 0]) * cr).sum(), ((p[:, 1] + q[:, 1]) * cr).sum()]) / (6.0 * area)
    e = q - p
    lengths = np.hypot(e[:, 0], e[:, 1])
    safe = np.where(lengths > 0.0, lengths, 1.0)
    normals = np.column_stack([e[:, 1], -e[:, 0]]) / safe[:, None]
    return PolygonGeometry(area, centroid, p.mean(axis=0), lengths, normals, 0.5 * (p + q))


def _segments_cross(a, b, c, d) -> bool:
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    d1, d2 = orient(c, d, a), orient(c, d, b)
    d3, d4 = orient(a, b, c), orient(a, b, d)
    return d1 * d2 < 0.0 and d3 * d4 < 0.0


def _self_intersects(p: np.ndarray) -> bool:
    n = len(p)
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if _segments_cross(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n]):
                return True
    return False


# ---------------------------------------------------------------------------
# 2D mesh
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CrackTip:
    """SBFEM crack-tip polygon: ``element`` is scaled from ``tip``.

    ``direction`` is the unit vector of crack extension (theta = 0).
    The element loop starts on one crack face and ends on the other; the
    closing edge between them is the open crack mouth and is not an element
    edge.
    """

    element: int
    tip: np.ndarray
    direction: np.ndarray


@dataclass(frozen=True, eq=False)
class PolyMesh2D:
    nodes: np.ndarray
    elements: tuple
    boundary_tags: dict = field(default_factory=dict)
    crack_tips: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.ascontiguousarray(self.nodes, dtype=float))
        object.__setattr__(self, "elements", tuple(np.asarray(e, dtype=np.int64) for e in self.elements))

    dim = 2

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @cached_property
    def sbfem_elements(self) -> dict:
        return {ct.element: ct for ct in self.crack_tips}

    def coords(self, e: int) -> np.ndarray:
        return self.nodes[self.elements[e]]

    @cached_property
    def geometry(self) -> list:
        return [polygon_geometry(self.coords(e)) for e in range(self.n_elements)]

    @cached_property
    def areas(self) -> np.ndarray:
        return np.array([g.area for g in self.geometry])

    def mesh_size(self) -> float:
        """Mean equivalent diameter sqrt(area) over the elements."""
        return float(np.sqrt(self.areas).mean())

    def boundary_edges(self) -> list:
        """Undirected edges used by exactly one element, as (a, b) in loop order."""
        count = {}
        for e, loop in enumerate(self.elements):
            n = len(loop)
            last = n - 1 if e in self.sbfem_elements else n
            for i in range(last):
                a, b = int(loop[i]), int(loop[(i + 1) % n])
                key = (min(a, b), max(a, b))
                count.setdefault(key, []).append((a, b))
        return [v[0] for v in count.values() if len(v) == 1]

    def validate(self):
        n_nodes = self.n_nodes
        for e, loop in enumerate(self.elements):
            if len(loop) < 3:
                raise MeshLoadError("element has fewer than 3 nodes", e)
            if loop.min() < 0 or loop.max() >= n_nodes:
                raise MeshLoadError("node index out of range", e)
            if len(set(loop.tolist())) != len(loop):
                raise DegenerateElementError("repeated node in element loop", e)
            p = self.nodes[loop]
            try:
                polygon_geometry(p)
            except DegenerateElementError as exc:
                raise DegenerateElementError(str(exc), e) from None
            if e in self.sbfem_elements:
                seg_len = np.linalg.norm(np.diff(p, axis=0), axis=1)
                if np.any(seg_len < 1e-14):
                    raise DegenerateElementError("zero-length edge", e)
                continue
            seg_len = np.linalg.norm(np.roll(p, -1, axis=0) - p, axis=1)
            if np.any(seg_len < 1e-14):
                raise DegenerateElementError("zero-length edge", e)
            if len(p) > 3 and _self_intersects(p):
                raise MeshLoadError("element loop self-intersects", e)
        # CCW neighbours traverse a shared edge in opposite directions; the same
        # directed edge in two loops means the elements overlap
        seen = {}
        for e, loop in enumerate(self.elements):
            n = len(loop)
            last = n - 1 if e in self.sbfem_elements else n
            for i in range(last):
                key = (int(loop[i]), int(loop[(i + 1) % n]))
                if key in seen:
                    raise MeshLoadError(f"elements {seen[key]} and {e} overlap along an edge", e)
                seen[key] = e
        for tag, edges in self.boundary_tags.items():
            for a, b in edges:
                if not (0 <= a < n_nodes and 0 <= b < n_nodes):
                    raise MeshLoadError(f"boundary tag {tag!r} references missing node")
        return self


def generate_structured_quad_mesh(nx: int, ny: int, Lx: float, Ly: float, origin=(0.0, 0.0)) -> PolyMesh2D:
    """Regular nx x ny grid of CCW quadrilaterals on [x0, x0+Lx] x [y0, y0+Ly]."""
    if nx < 1 or ny < 1:
        raise ValueError("element counts must be >= 1")
    if Lx <= 0 or Ly <= 0:
        raise ValueError("domain lengths must be positive")
    x = origin[0] + np.linspace(0.0, Lx, nx + 1)
    y = origin[1] + np.linspace(0.0, Ly, ny + 1)
    X, Y = np.meshgrid(x, y)
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    def nid(i, j):
        return j * (nx + 1) + i

    elements = [
        [nid(i, j), nid(i + 1, j), nid(i + 1, j + 1), nid(i, j + 1)] for j in range(ny) for i in range(nx)
    ]
    tags = {
        "bottom": [(nid(i, 0), nid(i + 1, 0)) for i in range(nx)],
        "right": [(nid(nx, j), nid(nx, j + 1)) for j in range(ny)],
        "top": [(nid(i + 1, ny), nid(i, ny)) for i in range(nx)],
        "left": [(nid(0, j + 1), nid(0, j)) for j in range(ny)],
    }
    return PolyMesh2D(nodes, elements, tags)


def subdivide_element_edges(mesh: PolyMesh2D, element: int, nsub: int) -> PolyMesh2D:
    """Split every edge of ``element`` into ``nsub`` equal segments.

    The new nodes are inserted into the neighbouring element loops too, so
    the mesh stays conforming (neighbours acquire collinear nodes). The
    open crack mouth of an SBFEM element is left alone.
    """
    if nsub < 1:
        raise ValueError("nsub must be >= 1")
    if nsub == 1:
        return mesh
    nodes = [row for row in mesh.nodes]
    loop = mesh.elements[element].tolist()
    n = len(loop)
    is_open = element in mesh.sbfem_elements
    inserted = {}
    for i in range(n - 1 if is_open else n):
        a, b = loop[i], loop[(i + 1) % n]
        new_ids = []
        for k in range(1, nsub):
            t = k / nsub
            nodes.append((1.0 - t) * mesh.nodes[a] + t * mesh.nodes[b])
            new_ids.append(len(nodes) - 1)
        inserted[(a, b)] = new_ids
    new_elements = []
    for e, el in enumerate(mesh.elements):
        el = el.tolist()
        m = len(el)
        out = []
        for i in range(m):
            a, b = el[i], el[(i + 1) % m]
            out.append(a)
            if e == element and is_open and i == m - 1:
                continue
            if (a, b) in inserted:
                out.extend(inserted[(a, b)])
            elif (b, a) in inserted:
                out.extend(reversed(inserted[(b, a)]))
        new_elements.append(out)
    tags = {}
    for tag, edges in mesh.boundary_tags.items():
        new_edges = []
        for a, b in edges:
            mids = inserted.get((a, b)) or (list(reversed(inserted[(b, a)])) if (b, a) in inserted else None)
            if mids:
                chain = [a, *mids, b]
                new_edges.extend(zip(chain[:-1], chain[1:]))
            else:
                new_edges.append((a, b))
        tags[tag] = new_edges
    return PolyMesh2D(np.array(nodes), new_elements, tags, mesh.crack_tips)


# ---------------------------------------------------------------------------
# Subcells
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subcell:
    """Smoothing cell with its boundary segments.

    ``seg_shape[b, I]`` is the parent's shape function I at the midpoint of
    boundary segment b.
    """

    parent: int | None
    vertices: np.ndarray
    area: float
    seg_lengths: np.ndarray
    seg_normals: np.ndarray
    seg_shape: np.ndarray


def _subcell_from_loop(parent, verts, seg_shape):
    g = polygon_geometry(verts)
    return Subcell(parent, verts, g.area, g.lengths, g.normals, seg_shape)


def _quad_parametric_subcells(coords, boxes, parent):
    cells = []
    for (x0, x1), (y0, y1) in boxes:
        par = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
        verts = np.array([q4_shape(*pt).values @ coords for pt in par])
        mids = 0.5 * (par + np.roll(par, -1, axis=0))
        shape = np.array([q4_shape(*m).values for m in mids])
        cells.append(_subcell_from_loop(parent, verts, shape))
    return cells


def polygon_subcells(coords, nc: int, parent: int | None = None) -> list:
    """Partition an element into ``nc`` smoothing cells.

    * nc = 1: the element itself (linear edge traces).
    * quadrilateral, nc = 2: two halves split along the parametric line
      eta = 0 (parallel to the first edge); nc = 4: parametric quadrants.
      Bilinear shape functions give the traces on interior segments.
    * n-gon, nc = n: centroid-fan triangles about the vertex average O,
      where every shape function takes the value 1/n.
    """
    p = np.asarray(coords, dtype=float)
    n = len(p)
    if nc == 1:
        g = polygon_geometry(p)
        shape = 0.5 * (np.eye(n) + np.roll(np.eye(n), 1, axis=1))
        return [Subcell(parent, p, g.area, g.lengths, g.normals, shape)]
    if n == 4 and nc == 2:
        polygon_geometry(p)
        return _quad_parametric_subcells(p, [((-1, 1), (-1, 0)), ((-1, 1), (0, 1))], parent)
    if n == 4 and nc == 4:
        polygon_geometry(p)
        boxes = [((-1, 0), (-1, 0)), ((0, 1), (-1, 0)), ((0, 1), (0, 1)), ((-1, 0), (0, 1))]
        return _quad_parametric_subcells(p, boxes, parent)
    if nc == n and n != 4:
        polygon_geometry(p)
        o = p.mean(axis=0)
        eye = np.eye(n)
        centre = np.full(n, 1.0 / n)
        cells = []
        for i in range(n):
            j = (i + 1) % n
            verts = np.array([p[i], p[j], o])
            shape = np.array([0.5 * (eye[i] + eye[j]), 0.5 * (eye[j] + centre), 0.5 * (centre + eye[i])])
            cells.append(_subcell_from_loop(parent, verts, shape))
        return cells
    raise ValueError(f"unsupported subcell count nc={nc} for a {n}-node element")


# ---------------------------------------------------------------------------
# 3D mesh
# ---------------------------------------------------------------------------

HEX_FACES = ((0, 3, 2, 1), (4, 5, 6, 7), (0, 1, 5, 4), (1, 2, 6, 5), (2, 3, 7, 6), (3, 0, 4, 7))


def face_moment(face_coords: np.ndarray) -> float:
    """Integral of x . n dS over one face loop (bilinear for quads, fan otherwise)."""
    if len(face_coords) == 4:
        return bilinear_face_moment(face_coords)
    c = face_coords.mean(axis=0)
    nxt = np.roll(face_coords, -1, axis=0)
    total = 0.0
    for a, b in zip(face_coords, nxt):
        av = 0.5 * np.cross(a - c, b - c)
        total += (a + b + c) @ av / 3.0
    return total


def _orient_faces(faces_of_cell: list) -> np.ndarray:
    """Relative orientation flags so that shared edges run opposite ways."""
    m = len(faces_of_cell)
    flags = np.zeros(m, dtype=int)
    edge_users = {}
    for k, f in enumerate(faces_of_cell):
        for i in range(len(f)):
            a, b = f[i], f[(i + 1) % len(f)]
            edge_users.setdefault((min(a, b), max(a, b)), []).append((k, a, b))
    for users in edge_users.values():
        if len(users) != 2:
            raise MeshLoadError("cell is not watertight")
    flags[0] = 1
    stack = [0]
    while stack:
        k = stack.pop()
        f = faces_of_cell[k]
        for i in range(len(f)):
            a, b = f[i], f[(i + 1) % len(f)]
            for kk, aa, bb in edge_users[(min(a, b), max(a, b))]:
                if kk == k:
                    continue
                same_dir = (aa, bb) == (a, b)
                want = -flags[k] if same_dir else flags[k]
                if flags[kk] == 0:
                    flags[kk] = want
                    stack.append(kk)
                elif flags[kk] != want:
                    raise MeshLoadError("cell faces cannot be oriented consistently")
    if np.any(flags == 0):
        raise MeshLoadError("cell faces are not connected")
    return flags


@dataclass(frozen=True, eq=False)
class PolyMesh3D:
    """Polyhedral mesh: shared face loops and cells as face-id lists.

    ``orientation[c][k]`` is +1 when face ``cells[c][k]`` (right-hand rule)
    points out of cell c. ``hexes`` keeps the 8-node connectivity of
    hexahedral meshes (needed by the trilinear FEM baseline).
    """

    nodes: np.ndarray
    faces: tuple
    cells: tuple
    orientation: tuple = None
    boundary_tags: dict = field(default_factory=dict)
    hexes: np.ndarray | None = None

    dim = 3

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.ascontiguousarray(self.nodes, dtype=float))
        object.__setattr__(self, "faces", tuple(np.asarray(f, dtype=np.int64) for f in self.faces))
        object.__setattr__(self, "cells", tuple(np.asarray(c, dtype=np.int64) for c in self.cells))
        if self.orientation is None:
            orient = []
            for c, fids in enumerate(self.cells):
                try:
                    flags = _orient_faces([self.faces[f].tolist() for f in fids])
                except MeshLoadError as exc:
                    raise MeshLoadError(str(exc), c) from None
                vol = sum(s * face_moment(self.nodes[self.faces[f]]) for s, f in zip(flags, fids)) / 3.0
                orient.append(flags if vol > 0 else -flags)
            object.__setattr__(self, "orientation", tuple(orient))
        else:
            object.__setattr__(self, "orientation", tuple(np.asarray(o, dtype=int) for o in self.orientation))

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.cells)

    def cell_nodes(self, c: int) -> np.ndarray:
        if self.hexes is not None:
            return self.hexes[c]
        ids = np.concatenate([self.faces[f] for f in self.cells[c]])
        _, first = np.unique(ids, return_index=True)
        return ids[np.sort(first)]

    def cell_faces(self, c: int):
        """Yield outward-oriented face loops (node ids) of cell c."""
        for f, s in zip(self.cells[c], self.orientation[c]):
            loop = self.faces[f]
            yield loop if s > 0 else loop[::-1]

    def cell_volume(self, c: int) -> float:
        return sum(face_moment(self.nodes[loop]) for loop in self.cell_faces(c)) / 3.0

    @cached_property
    def volumes(self) -> np.ndarray:
        return np.array([self.cell_volume(c) for c in range(self.n_elements)])

    def mesh_size(self) -> float:
        return float(np.cbrt(self.volumes).mean())

    def validate(self):
        for c in range(self.n_elements):
            v = self.volumes[c]
            if v < AREA_TOL:
                raise DegenerateElementError(f"cell volume {v:.3e} not positive", c)
        for f, loop in enumerate(self.faces):
            if len(set(loop.tolist())) != len(loop) or len(loop) < 3:
                raise DegenerateElementError(f"face {f} is degenerate")
            if loop.min() < 0 or loop.max() >= self.n_nodes:
                raise MeshLoadError(f"face {f} references a missing node")
        return self

    @classmethod
    def from_hexes(cls, nodes, hexes, boundary_tags=None) -> "PolyMesh3D":
        hexes = np.asarray(hexes, dtype=np.int64)
        faces, cells, index = [], [], {}
        for h in hexes:
            fids = []
            for lf in HEX_FACES:
                loop = [int(h[i]) for i in lf]
                key = tuple(sorted(loop))
                if key not in index:
                    index[key] = len(faces)
                    faces.append(loop)
                fids.append(index[key])
            cells.append(fids)
        return cls(nodes, faces, cells, boundary_tags=boundary_tags or {}, hexes=hexes)


def generate_structured_hex_mesh(nx: int, ny: int, nz: int, extents) -> PolyMesh3D:
    """Regular hexahedral grid on the box ((x0,x1),(y0,y1),(z0,z1))."""
    if min(nx, ny, nz) < 1:
        raise ValueError("element counts must be >= 1")
    (x0, x1), (y0, y1), (z0, z1) = extents
    if x1 <= x0 or y1 <= y0 or z1 <= z0:
        raise ValueError("box extents must be positive")
    x = np.linspace(x0, x1, nx + 1)
    y = np.linspace(y0, y1, ny + 1)
    z = np.linspace(z0, z1, nz + 1)
    Z, Y, X = np.meshgrid(z, y, x, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])

    def nid(i, j, k):
        return (k * (ny + 1) + j) * (nx + 1) + i

    hexes = []
    for k in range(nz):
        for j in range(ny):
            for i in range(nx):
                hexes.append([
                    nid(i, j, k), nid(i + 1, j, k), nid(i + 1, j + 1, k), nid(i, j + 1, k),
                    nid(i, j, k + 1), nid(i + 1, j, k + 1), nid(i + 1, j + 1, k + 1), nid(i, j + 1, k + 1),
                ])
    mesh = PolyMesh3D.from_hexes(nodes, hexes)
    tags = {"xmin": [], "xmax": [], "ymin": [], "ymax": [], "zmin": [], "zmax": []}
    tol = 1e-12 * max(x1 - x0, y1 - y0, z1 - z0)
    for f, loop in enumerate(mesh.faces):
        p = mesh.nodes[loop]
        for axis, (lo, hi) in enumerate(extents):
            name = "xyz"[axis]
            if np.all(np.abs(p[:, axis] - lo) < tol):
                tags[f"{name}min"].append(f)
            elif np.all(np.abs(p[:, axis] - hi) < tol):
                tags[f"{name}max"].append(f)
    object.__setattr__(mesh, "boundary_tags", tags)
    return mesh


# ---------------------------------------------------------------------------
# JSON I/O
# ---------------------------------------------------------------------------


def mesh_to_dict(mesh) -> dict:
    out = {"dim": mesh.dim, "nodes": mesh.nodes.tolist()}
    if mesh.dim == 2:
        out["elements"] = [e.tolist() for e in mesh.elements]
        out["boundary_tags"] = {k: [list(map(int, ed)) for ed in v] for k, v in mesh.boundary_tags.items()}
        if mesh.crack_tips:
            out["crack_tips"] = [
                {"element": int(ct.element), "tip": list(map(float, ct.tip)), "direction": list(map(float, ct.direction))}
                for ct in mesh.crack_tips
            ]
    else:
        out["faces"] = [f.tolist() for f in mesh.faces]
        out["cells"] = [c.tolist() for c in mesh.cells]
        out["boundary_tags"] = {k: [int(f) for f in v] for k, v in mesh.boundary_tags.items()}
        if mesh.hexes is not None:
            out["hexes"] = mesh.hexes.tolist()
    return out


def save_mesh(mesh, path) -> None:
    Path(path).write_text(json.dumps(mesh_to_dict(mesh)))


def mesh_from_dict(data: dict):
    try:
        dim = int(data["dim"])
        nodes = np.asarray(data["nodes"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise MeshLoadError(f"malformed mesh header: {exc}") from None
    if nodes.ndim != 2 or nodes.shape[1] != dim:
        raise MeshLoadError(f"nodes must be an array of {dim}-vectors")
    if dim == 2:
        if "elements" not in data:
            raise MeshLoadError("2D mesh needs 'elements'")
        tips = tuple(
            CrackTip(int(t["element"]), np.asarray(t["tip"], float), np.asarray(t["direction"], float))
            for t in data.get("crack_tips", [])
        )
        tags = {k: [tuple(int(i) for i in ed) for ed in v] for k, v in data.get("boundary_tags", {}).items()}
        for e, loop in enumerate(data["elements"]):
            if not isinstance(loop, list) or not all(isinstance(i, int) for i in loop):
                raise MeshLoadError("element loop must be a list of integers", e)
        return PolyMesh2D(nodes, data["elements"], tags, tips).validate()
    if dim == 3:
        if "faces" not in data or "cells" not in data:
            raise MeshLoadError("3D mesh needs 'faces' and 'cells'")
        n_faces = len(data["faces"])
        for c, fids in enumerate(data["cells"]):
            if any((not isinstance(f, int)) or f < 0 or f >= n_faces for f in fids):
                raise MeshLoadError("dangling face reference", c)
        hexes = np.asarray(data["hexes"], dtype=np.int64) if "hexes" in data else None
        tags = {k: [int(f) for f in v] for k, v in data.get("boundary_tags", {}).items()}
        return PolyMesh3D(nodes, data["faces"], data["cells"], boundary_tags=tags, hexes=hexes).validate()
    raise MeshLoadError(f"unsupported dimension {dim}")


def load_mesh(path):
    """Read and validate a JSON mesh file."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MeshLoadError(f"cannot read mesh {path}: {exc}") from None
    return mesh_from_dict(data)
