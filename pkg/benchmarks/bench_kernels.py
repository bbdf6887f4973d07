"""Timing of the compiled and numpy element kernels on the same input.

    python3 benchmarks/bench_kernels.py [--cells 800] [--repeat 5]

Both backends are imported directly, so the environment switch that forces
the fallback is not needed here. The script also checks that the two
produce the same COO triplets.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from polysfem import _kernels_py
from polysfem.benchmarks import load_fixture
from polysfem.fea import Material, constitutive_matrix

try:
    from polysfem import _ckernels
except ImportError:
    _ckernels = None


def _csr(mesh, copies):
    conn = np.concatenate(mesh.elements)
    offsets = np.concatenate([[0], np.cumsum([len(e) for e in mesh.elements])])
    if copies > 1:
        conn = np.tile(conn, copies)
        step = offsets[-1]
        offsets = np.concatenate([offsets[:-1] + k * step for k in range(copies)] + [[copies * step]])
    return conn, offsets


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--mesh", default="cantilever_voronoi_800")
    ap.add_argument("--copies", type=int, default=10, help="repeat the element list to enlarge the batch")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    mesh = load_fixture(args.mesh)
    conn, offsets = _csr(mesh, args.copies)
    D = constitutive_matrix(Material(1e5, 0.3, "plane_stress"))
    call = (mesh.nodes, conn, offsets, D, 0.1)
    nel = len(offsets) - 1

    t_py = min(timeit.repeat(lambda: _kernels_py.stab2d_batch(*call), number=1, repeat=args.repeat))
    print(f"elements={nel}")
    print(f"python  {t_py * 1e3:9.2f} ms  ({t_py / nel * 1e6:.2f} us/element)")
    if _ckernels is None:
        print("cython  not built (run: pip install -e . --no-build-isolation)")
        return 0
    t_c = min(timeit.repeat(lambda: _ckernels.stab2d_batch(*call), number=1, repeat=args.repeat))
    print(f"cython  {t_c * 1e3:9.2f} ms  ({t_c / nel * 1e6:.2f} us/element)")
    print(f"speedup {t_py / t_c:.1f}x")
    rp, cp, vp = _kernels_py.stab2d_batch(*call)
    rc, cc, vc = _ckernels.stab2d_batch(*call)
    same = np.array_equal(rp, rc) and np.array_equal(cp, cc)
    dev = float(np.abs(vp - vc).max() / np.abs(vp).max())
    print(f"identical index triplets: {same}; max relative value difference: {dev:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
