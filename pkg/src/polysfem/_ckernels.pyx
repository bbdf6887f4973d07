# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled element kernels (same contract as ``_kernels_py``)."""
import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def stab2d_batch(nodes, conn, offsets, D, double alpha_star):
    cdef const double[:, ::1] X = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef const long long[::1] C = np.ascontiguousarray(conn, dtype=np.int64)
    cdef const long long[::1] O = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef const double[:, ::1] Dm = np.ascontiguousarray(D, dtype=np.float64)
    cdef Py_ssize_t ne = O.shape[0] - 1
    cdef Py_ssize_t e, i, j, k, n, nd, base, a, b
    cdef Py_ssize_t total = 0
    for e in range(ne):
        n = O[e + 1] - O[e]
        total += 4 * n * n
    rows_a = np.empty(total, dtype=np.int64)
    cols_a = np.empty(total, dtype=np.int64)
    vals_a = np.empty(total, dtype=np.float64)
    cdef long long[::1] rows = rows_a
    cdef long long[::1] cols = cols_a
    cdef double[::1] vals = vals_a

    cdef Py_ssize_t nmax = 0
    for e in range(ne):
        n = O[e + 1] - O[e]
        if n > nmax:
            nmax = n
    gx_a = np.empty(nmax)
    gy_a = np.empty(nmax)
    px_a = np.empty(nmax)
    py_a = np.empty(nmax)
    ps_a = np.empty((nmax, nmax))
    k_a = np.empty((2 * nmax, 2 * nmax))
    cdef double[::1] gx = gx_a
    cdef double[::1] gy = gy_a
    cdef double[::1] px = px_a
    cdef double[::1] py = py_a
    cdef double[:, ::1] Ps = ps_a
    cdef double[:, ::1] K = k_a

    cdef double area, cx, cy, nx0, ny0, nx1, ny1, tr, alpha
    cdef double d11 = Dm[0, 0], d12 = Dm[0, 1], d13 = Dm[0, 2]
    cdef double d22 = Dm[1, 1], d23 = Dm[1, 2], d33 = Dm[2, 2]
    cdef double d21 = Dm[1, 0], d31 = Dm[2, 0], d32 = Dm[2, 1]
    cdef double bi0, bi1, bi2, bj0, bj1, bj2
    cdef double g00, g01, g02, g11, g12, g22, det
    cdef double i00, i01, i02, i11, i12, i22
    cdef double mi0, mi1, mi2, mj0, mj1, mj2
    cdef Py_ssize_t pos = 0
    cdef int ci, cj

    for e in range(ne):
        base = O[e]
        n = O[e + 1] - base
        nd = 2 * n
        cx = 0.0
        cy = 0.0
        for i in range(n):
            px[i] = X[C[base + i], 0]
            py[i] = X[C[base + i], 1]
            cx += px[i]
            cy += py[i]
        cx /= n
        cy /= n
        for i in range(n):
            px[i] -= cx
            py[i] -= cy
        area = 0.0
        for i in range(n):
            j = (i + 1) % n
            area += px[i] * py[j] - px[j] * py[i]
        area *= 0.5
        # g_I = (l_{I-1} n_{I-1} + l_I n_I) / (2A); l n of edge i->i+1 is (dy, -dx)
        for i in range(n):
            j = (i + 1) % n
            k = (i + n - 1) % n
            nx1 = py[j] - py[i]
            ny1 = -(px[j] - px[i])
            nx0 = py[i] - py[k]
            ny0 = -(px[i] - px[k])
            gx[i] = 0.5 * (nx0 + nx1) / area
            gy[i] = 0.5 * (ny0 + ny1) / area
        tr = 0.0
        for a in range(nd):
            i = a // 2
            ci = a % 2
            # column a of B: (exx, eyy, gxy)
            if ci == 0:
                bi0 = gx[i]; bi1 = 0.0; bi2 = gy[i]
            else:
                bi0 = 0.0; bi1 = gy[i]; bi2 = gx[i]
            for b in range(a, nd):
                j = b // 2
                cj = b % 2
                if cj == 0:
                    bj0 = gx[j]; bj1 = 0.0; bj2 = gy[j]
                else:
                    bj0 = 0.0; bj1 = gy[j]; bj2 = gx[j]
                K[a, b] = area * (
                    bi0 * (d11 * bj0 + d12 * bj1 + d13 * bj2)
                    + bi1 * (d21 * bj0 + d22 * bj1 + d23 * bj2)
                    + bi2 * (d31 * bj0 + d32 * bj1 + d33 * bj2)
                )
                K[b, a] = K[a, b]
            tr += K[a, a]
        if alpha_star != 0.0:
            # scalar projector off span{1, x, y}: Ps = I - M G^-1 M^T
            g00 = n; g01 = 0.0; g02 = 0.0; g11 = 0.0; g12 = 0.0; g22 = 0.0
            for i in range(n):
                g01 += px[i]; g02 += py[i]
                g11 += px[i] * px[i]; g12 += px[i] * py[i]; g22 += py[i] * py[i]
            det = (g00 * (g11 * g22 - g12 * g12) - g01 * (g01 * g22 - g12 * g02)
                   + g02 * (g01 * g12 - g11 * g02))
            i00 = (g11 * g22 - g12 * g12) / det
            i01 = (g02 * g12 - g01 * g22) / det
            i02 = (g01 * g12 - g02 * g11) / det
            i11 = (g00 * g22 - g02 * g02) / det
            i12 = (g01 * g02 - g00 * g12) / det
            i22 = (g00 * g11 - g01 * g01) / det
            for i in range(n):
                mi0 = 1.0; mi1 = px[i]; mi2 = py[i]
                for j in range(n):
                    mj0 = 1.0; mj1 = px[j]; mj2 = py[j]
                    Ps[i, j] = -(
                        mi0 * (i00 * mj0 + i01 * mj1 + i02 * mj2)
                        + mi1 * (i01 * mj0 + i11 * mj1 + i12 * mj2)
                        + mi2 * (i02 * mj0 + i12 * mj1 + i22 * mj2)
                    )
                Ps[i, i] += 1.0
            alpha = alpha_star * tr
            for i in range(n):
                for j in range(n):
                    K[2 * i, 2 * j] += alpha * Ps[i, j]
                    K[2 * i + 1, 2 * j + 1] += alpha * Ps[i, j]
        for a in range(nd):
            for b in range(nd):
                rows[pos] = 2 * C[base + a // 2] + a % 2
                cols[pos] = 2 * C[base + b // 2] + b % 2
                vals[pos] = K[a, b]
                pos += 1
    return rows_a, cols_a, vals_a
