# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Must stay numerically identical to _pykernels."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, floor

cnp.import_array()


def filter_triplets(const double[::1] cx, const double[::1] cy, double rfill):
    """Pairs (j, i) with centroid distance < rfill and weight rfill - dist.

    Uses a uniform bin grid with cell size rfill, so only the 3x3 block of
    cells around each element is scanned.
    """
    cdef Py_ssize_t n = cx.shape[0]
    cdef Py_ssize_t j, i, k, b, bx, by, nbx, nby, ox, oy, cap, cnt = 0
    cdef double xmin, ymin, dx, dy, d
    if n == 0:
        return (np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, np.float64))
    xmin = cx[0]; ymin = cy[0]
    cdef double xmax = cx[0], ymax = cy[0]
    for j in range(n):
        if cx[j] < xmin: xmin = cx[j]
        if cx[j] > xmax: xmax = cx[j]
        if cy[j] < ymin: ymin = cy[j]
        if cy[j] > ymax: ymax = cy[j]
    nbx = <Py_ssize_t>floor((xmax - xmin) / rfill) + 1
    nby = <Py_ssize_t>floor((ymax - ymin) / rfill) + 1

    cdef cnp.int64_t[::1] ebx = np.empty(n, np.int64)
    cdef cnp.int64_t[::1] eby = np.empty(n, np.int64)
    cdef cnp.int64_t[::1] start = np.zeros(nbx * nby + 1, np.int64)
    cdef cnp.int64_t[::1] order = np.empty(n, np.int64)
    cdef cnp.int64_t[::1] fill
    for j in range(n):
        ebx[j] = <Py_ssize_t>floor((cx[j] - xmin) / rfill)
        eby[j] = <Py_ssize_t>floor((cy[j] - ymin) / rfill)
        if ebx[j] >= nbx: ebx[j] = nbx - 1
        if eby[j] >= nby: eby[j] = nby - 1
        start[eby[j] * nbx + ebx[j] + 1] += 1
    for b in range(nbx * nby):
        start[b + 1] += start[b]
    fill = np.array(start[:nbx * nby], dtype=np.int64)
    for j in range(n):
        b = eby[j] * nbx + ebx[j]
        order[fill[b]] = j
        fill[b] += 1

    cap = 16 * n
    rows_a = np.empty(cap, np.int64)
    cols_a = np.empty(cap, np.int64)
    w_a = np.empty(cap, np.float64)
    cdef cnp.int64_t[::1] rows = rows_a
    cdef cnp.int64_t[::1] cols = cols_a
    cdef double[::1] w = w_a
    for j in range(n):
        for oy in range(-1, 2):
            by = eby[j] + oy
            if by < 0 or by >= nby:
                continue
            for ox in range(-1, 2):
                bx = ebx[j] + ox
                if bx < 0 or bx >= nbx:
                    continue
                b = by * nbx + bx
                for k in range(start[b], start[b + 1]):
                    i = order[k]
                    dx = cx[j] - cx[i]
                    dy = cy[j] - cy[i]
                    d = sqrt(dx * dx + dy * dy)
                    if d < rfill:
                        if cnt == cap:
                            cap *= 2
                            rows_a = np.resize(rows_a, cap)
                            cols_a = np.resize(cols_a, cap)
                            w_a = np.resize(w_a, cap)
                            rows = rows_a
                            cols = cols_a
                            w = w_a
                        rows[cnt] = j
                        cols[cnt] = i
                        w[cnt] = rfill - d
                        cnt += 1
    return rows_a[:cnt].copy(), cols_a[:cnt].copy(), w_a[:cnt].copy()


def element_energies(const double[::1] u, const cnp.int64_t[:, ::1] dofs,
                     const double[:, ::1] k0):
    """ce[e] = u_e^T k0 u_e with u_e = u[dofs[e]]."""
    cdef Py_ssize_t ne = dofs.shape[0], nd = dofs.shape[1]
    cdef Py_ssize_t e, a, b
    cdef double s, t
    cdef double ue[64]
    cdef double kl[4096]
    if nd > 64:
        raise ValueError("at most 64 DOFs per element")
    # local row-major copy keeps the inner loop on contiguous memory
    for a in range(nd):
        for b in range(nd):
            kl[a * nd + b] = k0[a, b]
    out = np.empty(ne, np.float64)
    cdef double[::1] ce = out
    for e in range(ne):
        for a in range(nd):
            ue[a] = u[dofs[e, a]]
        s = 0.0
        for a in range(nd):
            t = 0.0
            for b in range(nd):
                t += kl[a * nd + b] * ue[b]
            s += t * ue[a]
        ce[e] = s
    return out


def scatter_values(const cnp.int64_t[::1] slot, const double[::1] moduli,
                   const double[::1] kflat, Py_ssize_t nnz):
    """data[slot[e*m + a]] += moduli[e] * kflat[a]; negative slots are skipped."""
    cdef Py_ssize_t ne = moduli.shape[0], m = kflat.shape[0]
    cdef Py_ssize_t e, a, s
    cdef double me
    out = np.zeros(nnz, np.float64)
    cdef double[::1] data = out
    for e in range(ne):
        me = moduli[e]
        for a in range(m):
            s = slot[e * m + a]
            if s >= 0:
                data[s] += me * kflat[a]
    return out
