"""Seeded, Lloyd-relaxed Voronoi meshes for the shipped fixtures (dev tooling).

Requires scipy and shapely. The package itself only ever reads the JSON
files written by ``make_fixtures.py``.

Cracks are straight segments. Seeds near a crack are kept in mirrored
pairs about the crack line so that Voronoi edges run exactly along it; a
seed sits on every crack tip, so the tip lies inside its own cell. After
meshing, nodes on the crack faces are duplicated and every tip cell is
reordered to run from the lower crack face round to the upper one.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Voronoi, cKDTree
from shapely.geometry import LineString, Point, Polygon
from shapely.geometry.polygon import orient

from polysfem.mesh import CrackTip, PolyMesh2D


@dataclass
class Crack:
    start: np.ndarray  # mouth (or second tip)
    end: np.ndarray  # tip
    start_is_tip: bool = False

    def __post_init__(self):
        self.start = np.asarray(self.start, float)
        self.end = np.asarray(self.end, float)

    @property
    def direction(self):
        d = self.end - self.start
        return d / np.linalg.norm(d)

    @property
    def normal(self):
        d = self.direction
        return np.array([-d[1], d[0]])

    @property
    def length(self):
        return float(np.linalg.norm(self.end - self.start))

    def local(self, p):
        q = np.asarray(p, float) - self.start
        return q @ self.direction, q @ self.normal

    def mirror(self, p):
        s, t = self.local(p)
        return self.start + np.outer(s, self.direction) - np.outer(t, self.normal)

    def tips(self):
        out = [(self.end, self.direction)]
        if self.start_is_tip:
            out.append((self.start, -self.direction))
        return out


@dataclass
class Domain:
    polygon: Polygon
    straight_edges: list = field(default_factory=list)  # segments usable for seed reflection
    corners: list = field(default_factory=list)


def rectangle(x0, y0, x1, y1) -> Domain:
    poly = Polygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
    corners = [np.array(c) for c in [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]]
    edges = [(corners[i], corners[(i + 1) % 4]) for i in range(4)]
    return Domain(poly, edges, corners)


def polygon_domain(vertices, holes=(), hole_segments=256) -> Domain:
    """Polygon minus discs ``holes = [(centre, radius), ...]``."""
    verts = [np.asarray(v, float) for v in vertices]
    poly = Polygon(verts)
    for centre, radius in holes:
        poly = poly.difference(Point(*centre).buffer(radius, quad_segs=hole_segments // 4))
    poly = orient(poly, 1.0)
    edges = [(verts[i], verts[(i + 1) % len(verts)]) for i in range(len(verts))]
    return Domain(poly, edges, _sharp_corners(poly))


def _sharp_corners(poly, min_turn_deg=10.0):
    out = []
    for ring in [poly.exterior, *poly.interiors]:
        p = np.asarray(ring.coords)[:-1]
        n = len(p)
        for i in range(n):
            a, b = p[i] - p[i - 1], p[(i + 1) % n] - p[i]
            cos = a @ b / (np.linalg.norm(a) * np.linalg.norm(b))
            if np.degrees(np.arccos(np.clip(cos, -1, 1))) > min_turn_deg:
                out.append(p[i].copy())
    return out


def _reflect(p, a, b):
    d = (b - a) / np.linalg.norm(b - a)
    q = p - a
    along = q @ d
    return a + 2 * np.outer(along, d) - q


def _voronoi_cells(seeds, domain: Domain, h):
    """Voronoi cells of ``seeds`` clipped to the domain (list of coordinate arrays)."""
    pts = [seeds]
    for a, b in domain.straight_edges:
        d = b - a
        L = np.linalg.norm(d)
        rel = seeds - a
        along = rel @ d / L**2
        dist = np.abs(rel[:, 0] * d[1] - rel[:, 1] * d[0]) / L
        near = (dist < 3 * h) & (along > -0.5) & (along < 1.5)
        if np.any(near):
            r = _reflect(seeds[near], a, b)
            # a ghost must sit outside, facing its own mirror edge; a ghost that
            # is closer to another part of the outline (re-entrant corners)
            # would claim domain area beyond that part
            gap = np.array([Point(*x).distance(domain.polygon) for x in r])
            keep = gap >= dist[near] * (1.0 - 1e-9)
            pts.append(r[keep])
    minx, miny, maxx, maxy = domain.polygon.bounds
    size = max(maxx - minx, maxy - miny)
    t = np.linspace(0, 2 * np.pi, 32, endpoint=False)
    c = np.array([(minx + maxx) / 2, (miny + maxy) / 2])
    far = c + 10 * size * np.column_stack([np.cos(t), np.sin(t)])
    ghosts = np.vstack(pts[1:]) if len(pts) > 1 else np.zeros((0, 2))
    if len(ghosts):
        # symmetric seeds about a corner can mirror onto the same ghost twice
        _, first = np.unique(np.round(ghosts / (1e-9 * h)), axis=0, return_index=True)
        ghosts = ghosts[np.sort(first)]
    allp = np.vstack([seeds, ghosts, far])
    vor = Voronoi(allp)
    cells = []
    for i in range(len(seeds)):
        region = vor.regions[vor.point_region[i]]
        if -1 in region or not region:
            raise RuntimeError("unbounded Voronoi region for an interior seed")
        poly = Polygon(vor.vertices[region])
        if not poly.is_valid:
            poly = poly.buffer(0)
        clipped = poly.intersection(domain.polygon)
        if clipped.geom_type == "MultiPolygon":
            clipped = max(clipped.geoms, key=lambda g: g.area)
        if clipped.is_empty or clipped.geom_type != "Polygon":
            cells.append(None)
            continue
        cells.append(clipped)
    return [None if c is None else np.asarray(orient(c, 1.0).exterior.coords)[:-1] for c in cells]


class _SeedSet:
    """Free seeds plus the constraints imposed by cracks."""

    def __init__(self, free, cracks, h, band, pinned=None):
        self.cracks = cracks
        self.h = h
        self.band = band
        self.free = free
        tips = np.array([tip for c in cracks for tip, _ in c.tips()]).reshape(-1, 2)
        if pinned is None:
            self.pin_centre, pins = None, np.zeros((0, 2))
        else:
            self.pin_centre, pins = np.asarray(pinned[0], float), np.asarray(pinned[1], float)
            self.pin_radius = np.linalg.norm(pins - self.pin_centre, axis=1).max() + 0.6 * h
        self.fixed = np.vstack([tips, pins])
        self.project()

    def _push_away(self, p, centre, radius=None):
        radius = 0.6 * self.h if radius is None else radius
        d = np.linalg.norm(p - centre, axis=1)
        near = d < radius
        if np.any(near):
            v = (p[near] - centre) / np.maximum(d[near], 1e-12)[:, None]
            p[near] = centre + radius * v

    def _in_band(self, crack, p):
        s, t = crack.local(p)
        return (np.abs(t) < self.band) & (s > -self.band) & (s < crack.length + self.band)

    def owner(self, p):
        """Index of the crack that mirrors each seed (-1: none).

        A seed inside several bands belongs to the nearest crack segment only;
        mirroring it once per band would duplicate seeds when cracks are collinear.
        """
        best = np.full(len(p), np.inf)
        own = np.full(len(p), -1)
        for k, c in enumerate(self.cracks):
            s, t = c.local(p)
            dist = np.hypot(np.clip(s, 0.0, c.length) - s, t)
            take = self._in_band(c, p) & (dist < best)
            own[take] = k
            best[take] = dist[take]
        return own

    def project(self):
        p = self.free
        own = self.owner(p)
        for k, c in enumerate(self.cracks):
            inb = own == k
            s, t = c.local(p)
            flip = inb & (t < 0)
            p[flip] = c.mirror(p[flip])
            s, t = c.local(p)
            close = inb & (t < 0.3 * self.h)
            p[close] = c.start + np.outer(s[close], c.direction) + 0.3 * self.h * c.normal
            # no seed may crowd a tip seed
            for tip, _ in c.tips():
                self._push_away(p, tip)
        if self.pin_centre is not None:
            # radial push from the centre keeps every free seed clear of all pins
            self._push_away(p, self.pin_centre, self.pin_radius)
        self.free = p

    def all(self):
        parts = [self.free, self.fixed]
        own = self.owner(self.free)
        for k, c in enumerate(self.cracks):
            parts.append(c.mirror(self.free[own == k]))
        return np.vstack(parts)


def _sample(domain: Domain, n, rng):
    minx, miny, maxx, maxy = domain.polygon.bounds
    out = []
    while len(out) < n:
        cand = np.column_stack([rng.uniform(minx, maxx, 4 * n), rng.uniform(miny, maxy, 4 * n)])
        for x in cand:
            if domain.polygon.contains(Point(*x)):
                out.append(x)
                if len(out) == n:
                    break
    return np.array(out)


def _outside_bands(seeds, p):
    return seeds.owner(p) < 0


def _adjust_count(seeds, target, domain, rng):
    """Add or remove seeds away from the cracks until the cell count is ``target``."""
    for _ in range(10 * target):
        total = len(seeds.all())
        if total == target:
            return seeds
        free = seeds.free
        if total > target:
            out = np.nonzero(_outside_bands(seeds, free))[0]
            if len(out) == 0:
                # coarse meshes: the bands cover everything, drop a mirrored pair
                out = np.arange(len(free))
            free = np.delete(free, out[rng.integers(len(out))], axis=0)
        else:
            while True:
                x = _sample(domain, 1, rng)
                if _outside_bands(seeds, x)[0]:
                    break
            free = np.vstack([free, x])
        seeds.free = free
        seeds.project()
    raise RuntimeError("could not match the requested cell count")


def voronoi_mesh(domain: Domain, n_cells: int, seed: int = 42, cracks=(), lloyd: int = 30,
                 short_edge: float = 0.08, tags=None, pinned=None) -> PolyMesh2D:
    """Lloyd-relaxed clipped Voronoi mesh with exactly ``n_cells`` polygons.

    ``pinned(h)`` may return ``(centre, points)``: seeds that stay fixed during
    relaxation, with free seeds kept out of a disc about ``centre``.
    """
    rng = np.random.default_rng(seed)
    cracks = list(cracks)
    h = np.sqrt(domain.polygon.area / n_cells)
    band = 2.5 * h
    pins = pinned(h) if pinned is not None else None
    constrained = bool(cracks) or pins is not None
    if constrained:
        seeds = _SeedSet(_sample(domain, n_cells, rng), cracks, h, band, pins)
        seeds = _adjust_count(seeds, n_cells, domain, rng)
        free = seeds.free
    else:
        free = _sample(domain, n_cells, rng)
    for _ in range(lloyd):
        allp = seeds.all() if constrained else free
        cells = _voronoi_cells(allp, domain, h)
        nf = len(free)
        for i in range(nf):
            if cells[i] is not None:
                free[i] = np.asarray(Polygon(cells[i]).centroid.coords[0])
        if constrained:
            seeds.free = free
            seeds.project()
            free = seeds.free
            if len(seeds.all()) != n_cells:
                # a seed drifted into or out of a band
                seeds = _adjust_count(seeds, n_cells, domain, rng)
                free = seeds.free
    allp = seeds.all() if constrained else free
    cells = _voronoi_cells(allp, domain, h)
    if any(c is None for c in cells):
        raise RuntimeError("empty cell after clipping")
    return _build_mesh(cells, allp, domain, cracks, h, short_edge, tags)


def _merge_vertices(cells, tol):
    pts = np.vstack(cells)
    tree = cKDTree(pts)
    parent = np.arange(len(pts))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in tree.query_pairs(tol):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    roots = np.array([find(i) for i in range(len(pts))])
    uniq, inv = np.unique(roots, return_inverse=True)
    nodes = pts[uniq]
    loops, k = [], 0
    for c in cells:
        ids = inv[k:k + len(c)].tolist()
        k += len(c)
        loops.append(_dedupe(ids))
    return nodes, loops


def _dedupe(ids):
    out = []
    for v in ids:
        if not out or out[-1] != v:
            out.append(v)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def _protected_nodes(nodes, domain, cracks, tol):
    """0 = free interior, 1 = on the boundary, 2 = corner/crack line/tip-critical."""
    level = np.zeros(len(nodes), int)
    boundary = domain.polygon.boundary
    for i, x in enumerate(nodes):
        if boundary.distance(Point(*x)) < tol:
            level[i] = 1
        for c in domain.corners:
            if np.linalg.norm(x - c) < tol:
                level[i] = 2
        for cr in cracks:
            s, t = cr.local(x[None])
            if abs(t[0]) < tol and -tol < s[0] < cr.length + tol:
                level[i] = 2
    return level


def _collapse_short_edges(nodes, loops, level, h, frac):
    limit = frac * h
    changed = True
    while changed:
        changed = False
        for loop in loops:
            n = len(loop)
            for i in range(n):
                a, b = loop[i], loop[(i + 1) % n]
                if np.linalg.norm(nodes[a] - nodes[b]) >= limit:
                    continue
                if level[a] == 2 and level[b] == 2:
                    continue
                if level[a] == 1 and level[b] == 1:
                    continue  # keep boundary resolution (curved boundaries)
                keep, drop = (a, b) if level[a] >= level[b] else (b, a)
                if level[keep] == level[drop] == 0:
                    nodes[keep] = 0.5 * (nodes[a] + nodes[b])
                for lp in loops:
                    for k, v in enumerate(lp):
                        if v == drop:
                            lp[k] = keep
                changed = True
                break
            if changed:
                break
        if changed:
            loops[:] = [_dedupe(lp) for lp in loops]
    return nodes, loops


def _compact(nodes, loops):
    used = sorted({v for lp in loops for v in lp})
    remap = {v: i for i, v in enumerate(used)}
    return nodes[used], [[remap[v] for v in lp] for lp in loops]


def _build_mesh(cells, seeds, domain, cracks, h, short_edge, tags):
    scale = np.sqrt(domain.polygon.area)
    nodes, loops = _merge_vertices(cells, 1e-9 * scale)
    level = _protected_nodes(nodes, domain, cracks, 1e-9 * scale)
    nodes, loops = _collapse_short_edges(nodes.copy(), loops, level, h, short_edge)
    nodes, loops = _compact(nodes, loops)
    for lp in loops:
        if len(lp) < 3:
            raise RuntimeError("cell collapsed")
    crack_tips = []
    if cracks:
        nodes, loops, crack_tips = _split_cracks(nodes, loops, seeds, cracks, scale)
    boundary_tags = _classify_boundary(nodes, loops, crack_tips, tags or {}, scale)
    mesh = PolyMesh2D(nodes, loops, boundary_tags, tuple(crack_tips)).validate()
    if abs(mesh.areas.sum() - domain.polygon.area) > 1e-9 * domain.polygon.area:
        raise RuntimeError("mesh does not cover the domain")
    if not cracks and len(boundary_tags.get("crack", ())):
        raise RuntimeError("boundary edges off the domain outline")
    return mesh


def _split_cracks(nodes, loops, seeds, cracks, scale):
    tol = 1e-9 * scale
    nodes = [x for x in nodes]
    tip_cells = {}
    for c in cracks:
        for tip, d in c.tips():
            k = int(np.argmin(np.linalg.norm(seeds - tip, axis=1)))
            tip_cells[k] = (tip, d, c)
    for c in cracks:
        on_crack = [i for i, x in enumerate(nodes)
                    if abs(c.local(x[None])[1][0]) < tol and -tol < c.local(x[None])[0][0] < c.length + tol]
        dup = {}
        for e, lp in enumerate(loops):
            if e in tip_cells:
                continue
            cen = np.mean([nodes[v] for v in lp], axis=0)
            below = c.local(cen[None])[1][0] < 0
            # only cells adjacent to the crack segment itself (not its extension)
            if not below:
                continue
            for k, v in enumerate(lp):
                if v in on_crack and _between_tips(c, nodes[v], tol):
                    if v not in dup:
                        nodes.append(nodes[v].copy())
                        dup[v] = len(nodes) - 1
                    lp[k] = dup[v]
        for e, (tip, d, cr) in tip_cells.items():
            if cr is not c:
                continue
            lp = loops[e]
            # the crack enters the tip cell through a node on the crack line behind the tip
            cands = [k for k, v in enumerate(lp) if v in dup]
            if len(cands) != 1:
                raise RuntimeError(f"tip cell {e} meets the crack at {len(cands)} nodes")
            k = cands[0]
            v = lp[k]
            rot = lp[k:] + lp[:k]  # starts at the crack-face node, CCW
            # duplicates live on the crack-frame lower side, which is the
            # tip-frame lower side only for tips pointing along the crack
            if d @ c.direction > 0:
                loops[e] = [dup[v]] + rot[1:] + [v]
            else:
                loops[e] = [v] + rot[1:] + [dup[v]]
            # the lower face copy must come first: check the second node lies below the crack
            second = nodes[loops[e][1]]
            rel = second - tip
            if rel @ np.array([-d[1], d[0]]) > 0:
                raise RuntimeError("tip cell orientation inconsistent")
    tips = [CrackTip(e, np.asarray(tip, float), np.asarray(d, float)) for e, (tip, d, _) in sorted(tip_cells.items())]
    return np.array(nodes), loops, tips


def _between_tips(c: Crack, x, tol):
    s, t = c.local(x[None])
    s = s[0]
    lo = tol if c.start_is_tip else -tol
    return lo < s < c.length - tol


def _classify_boundary(nodes, loops, crack_tips, tag_fns, scale):
    tip_set = {ct.element for ct in crack_tips}
    count = {}
    for e, lp in enumerate(loops):
        n = len(lp)
        last = n - 1 if e in tip_set else n
        for i in range(last):
            a, b = lp[i], lp[(i + 1) % n]
            count.setdefault((min(a, b), max(a, b)), []).append((a, b))
    edges = [v[0] for v in count.values() if len(v) == 1]
    tags = {name: [] for name in tag_fns}
    tags["crack"] = []
    for a, b in edges:
        mid = 0.5 * (nodes[a] + nodes[b])
        for name, fn in tag_fns.items():
            if fn(mid):
                tags[name].append((int(a), int(b)))
                break
        else:
            tags["crack"].append((int(a), int(b)))
    for name in tags:
        tags[name].sort()
    return tags
