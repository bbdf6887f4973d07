"""Vectorized numpy implementation of the batched element kernels.

Polygons are passed in CSR form: ``conn[offsets[e]:offsets[e+1]]`` lists
the node ids of element e (counter-clockwise). Elements with the same
node count are processed together.
"""
from __future__ import annotations

import numpy as np


def _group_by_size(offsets):
    sizes = np.diff(offsets)
    for n in np.unique(sizes):
        yield int(n), np.nonzero(sizes == n)[0]


def stab2d_batch(nodes, conn, offsets, D, alpha_star):
    """One-subcell smoothed stiffness plus alpha* tr(K1) P for every polygon.

    Returns (rows, cols, vals) COO triplets of global DOFs (2 per node),
    element by element in input order with row-major (2n x 2n) blocks.
    """
    nodes = np.asarray(nodes, dtype=np.float64)
    conn = np.asarray(conn, dtype=np.int64)
    offsets = np.asarray(offsets, dtype=np.int64)
    D = np.asarray(D, dtype=np.float64)
    ne = len(offsets) - 1
    sizes = np.diff(offsets)
    block_start = np.concatenate([[0], np.cumsum((2 * sizes) ** 2)])
    rows = np.empty(block_start[-1], dtype=np.int64)
    cols = np.empty(block_start[-1], dtype=np.int64)
    vals = np.empty(block_start[-1], dtype=np.float64)
    for n, elems in _group_by_size(offsets):
        idx = conn[offsets[elems][:, None] + np.arange(n)]  # (m, n)
        p = nodes[idx]  # (m, n, 2)
        q = np.roll(p, -1, axis=1)
        area = 0.5 * np.sum(p[..., 0] * q[..., 1] - q[..., 0] * p[..., 1], axis=1)
        e = q - p
        ln = np.stack([e[..., 1], -e[..., 0]], axis=-1)  # length-weighted outward normals
        g = 0.5 * (np.roll(ln, 1, axis=1) + ln) / area[:, None, None]  # (m, n, 2)
        m = len(elems)
        B = np.zeros((m, 3, 2 * n))
        B[:, 0, 0::2] = g[..., 0]
        B[:, 1, 1::2] = g[..., 1]
        B[:, 2, 0::2] = g[..., 1]
        B[:, 2, 1::2] = g[..., 0]
        K = area[:, None, None] * np.einsum("eki,kl,elj->eij", B, D, B)
        if alpha_star != 0.0:
            x = p - p.mean(axis=1, keepdims=True)
            M = np.concatenate([np.ones((m, n, 1)), x], axis=2)  # (m, n, 3)
            G = np.einsum("eni,enj->eij", M, M)
            Ps = np.eye(n)[None] - np.einsum("eni,eij,emj->enm", M, np.linalg.inv(G), M)
            P = np.einsum("enm,ab->enamb", Ps, np.eye(2)).reshape(m, 2 * n, 2 * n)
            tr = np.trace(K, axis1=1, axis2=2)
            K = K + (alpha_star * tr)[:, None, None] * P
        dofs = (2 * idx[..., None] + np.arange(2)).reshape(m, 2 * n)
        span = (2 * n) ** 2
        flat = block_start[elems][:, None] + np.arange(span)
        rows[flat] = np.repeat(dofs, 2 * n, axis=1)
        cols[flat] = np.tile(dofs, (1, 2 * n))
        vals[flat] = K.reshape(m, span)
    del ne
    return rows, cols, vals
