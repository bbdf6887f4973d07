"""Regenerate the JSON mesh fixtures shipped in src/polysfem/fixtures.

Usage: python3 scripts/make_fixtures.py [--only NAME ...]

Needs scipy and shapely (dev only). Every mesh is seeded, so reruns are
byte-identical on the same library versions.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent))

from meshgen import Crack, polygon_domain, rectangle, voronoi_mesh  # noqa: E402

from polysfem.interp import hex8_shape  # noqa: E402
from polysfem.mesh import HEX_FACES, PolyMesh3D, save_mesh  # noqa: E402

OUT = Path(__file__).resolve().parents[1] / "src" / "polysfem" / "fixtures"
TOL = 1e-9
SEED = 42


def _side(axis, value):
    return lambda m: abs(m[axis] - value) < TOL


def cantilever():
    dom = rectangle(0.0, -2.0, 8.0, 2.0)
    tags = {"left": _side(0, 0.0), "right": _side(0, 8.0), "bottom": _side(1, -2.0), "top": _side(1, 2.0)}
    for n in (100, 200, 400, 800):
        yield f"cantilever_voronoi_{n}", voronoi_mesh(dom, n, seed=SEED, tags=tags)


def plate_hole():
    tags = {
        "bottom": _side(1, 0.0), "right": _side(0, 5.0), "top": _side(1, 5.0), "left": _side(0, 0.0),
        "hole": lambda m: np.hypot(*m) < 1.0 + 1e-3,
    }
    area = 25.0 - np.pi / 4
    for n in (100, 200, 400, 800):
        # about eight chords per element length along the quarter arc
        h = np.sqrt(area / n)
        quarter = int(np.ceil(8 * (np.pi / 2) / h))
        dom = polygon_domain([(0, 0), (5, 0), (5, 5), (0, 5)], holes=[((0.0, 0.0), 1.0)], hole_segments=4 * quarter)
        yield f"plate_hole_{n}", voronoi_mesh(dom, n, seed=SEED, tags=tags, short_edge=0.05)


def l_shape():
    dom = polygon_domain([(-1, -1), (0, -1), (0, 0), (1, 0), (1, 1), (-1, 1)])
    tags = {
        "left": _side(0, -1.0), "bottom": _side(1, -1.0), "right": _side(0, 1.0), "top": _side(1, 1.0),
        "corner": lambda m: (abs(m[0]) < TOL and m[1] < 0) or (abs(m[1]) < TOL and m[0] > 0),
    }

    def corner_seeds(h):
        # one seed per material quadrant, equidistant from the re-entrant corner,
        # so the corner is a Voronoi vertex and no cell wraps around it
        t = np.array([0.25, 0.75, 1.25]) * np.pi
        return np.zeros(2), 0.5 * h * np.column_stack([np.cos(t), np.sin(t)])

    for n in (75, 150, 300, 600, 1200, 2400):
        yield f"l_shape_{n}", voronoi_mesh(dom, n, seed=SEED, tags=tags, pinned=corner_seeds)


def patch2d():
    dom = rectangle(0.0, 0.0, 1.0, 1.0)
    tags = {"boundary": lambda m: True}
    yield "patch2d", voronoi_mesh(dom, 30, seed=SEED, tags=tags)


WARPED_INNER = [
    (0.249, 0.342, 0.192), (0.826, 0.288, 0.288), (0.850, 0.649, 0.263), (0.273, 0.750, 0.230),
    (0.320, 0.186, 0.643), (0.677, 0.305, 0.683), (0.788, 0.693, 0.644), (0.165, 0.745, 0.705),
]


def warped_cube():
    outer = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0), (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)]
    nodes = np.array(outer + WARPED_INNER, dtype=float)
    hexes = [list(range(8, 16))]
    for face in HEX_FACES:
        hexes.append(list(face) + [i + 8 for i in face])
    fixed = []
    for h in hexes:
        J = hex8_shape(0.0, 0.0, 0.0).gradients.T @ nodes[h]
        fixed.append(h if np.linalg.det(J) > 0 else h[4:] + h[:4])
    mesh = PolyMesh3D.from_hexes(nodes, fixed)
    outer_faces = [f for f, loop in enumerate(mesh.faces) if np.all(np.asarray(loop) < 8)]
    object.__setattr__(mesh, "boundary_tags", {"outer": outer_faces})
    yield "warped_cube", mesh.validate()


EDGE_CRACK_COUNTS = (32, 91, 332, 1229, 4940)
EDGE_CRACK_HEIGHT = 2.0


def edge_crack():
    hp = EDGE_CRACK_HEIGHT
    dom = rectangle(-0.5, -hp / 2, 0.5, hp / 2)
    cracks = [Crack((-0.5, 0.0), (-0.25, 0.0)), Crack((0.5, 0.0), (0.25, 0.0))]
    tags = {"bottom": _side(1, -hp / 2), "top": _side(1, hp / 2), "left": _side(0, -0.5), "right": _side(0, 0.5)}
    for n in EDGE_CRACK_COUNTS:
        yield f"edge_crack_{n}", voronoi_mesh(dom, n, seed=SEED, cracks=cracks, tags=tags)


def inclined_crack():
    a = 0.1
    dom = rectangle(-0.5, -0.5, 0.5, 0.5)
    tags = {"bottom": _side(1, -0.5), "top": _side(1, 0.5), "left": _side(0, -0.5), "right": _side(0, 0.5)}
    for beta in range(0, 91, 15):
        b = np.deg2rad(beta)
        d = np.array([np.cos(b), -np.sin(b)])
        crack = Crack(-a * d, a * d, start_is_tip=True)
        yield f"inclined_crack_{beta}", voronoi_mesh(dom, 300, seed=SEED, cracks=[crack], tags=tags)


GROUPS = {
    "cantilever": cantilever, "plate_hole": plate_hole, "l_shape": l_shape, "patch2d": patch2d,
    "warped_cube": warped_cube, "edge_crack": edge_crack, "inclined_crack": inclined_crack,
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--only", nargs="*", choices=sorted(GROUPS), default=sorted(GROUPS))
    args = ap.parse_args(argv)
    OUT.mkdir(parents=True, exist_ok=True)
    for group in args.only:
        for name, mesh in GROUPS[group]():
            save_mesh(mesh, OUT / f"{name}.json")
            print(f"{name}: {mesh.n_elements} elements, {mesh.n_nodes} nodes")


if __name__ == "__main__":
    main()
