# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled RK4 stepping kernel for x' = -K(t) x + g(t).

Mirrors the pure-numpy fallback exactly; kept to tight C loops because the
sweep dominates every solve (one step per grid interval, several right-hand
sides per sweep).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport isfinite

cnp.import_array()


def rk4_sweep(
    const double complex[:, :, ::1] k_nodes,
    const double complex[:, :, ::1] g_nodes,
    const double complex[:, :, ::1] k_half,
    const double complex[:, :, ::1] g_half,
    const double complex[:, ::1] x0,
    double h,
):
    cdef Py_ssize_t nsteps = k_half.shape[0]
    cdef Py_ssize_t dim = k_nodes.shape[1]
    cdef Py_ssize_t ncols = x0.shape[1]
    cdef Py_ssize_t gcols = g_nodes.shape[2]

    traj_arr = np.empty((nsteps + 1, dim, ncols), dtype=np.complex128)
    cdef double complex[:, :, ::1] traj = traj_arr

    work_arr = np.empty((6, dim, ncols), dtype=np.complex128)
    cdef double complex[:, :, ::1] work = work_arr

    cdef double complex[:, ::1] x = work[0]
    cdef double complex[:, ::1] xm = work[1]
    cdef double complex[:, ::1] k1 = work[2]
    cdef double complex[:, ::1] k2 = work[3]
    cdef double complex[:, ::1] k3 = work[4]
    cdef double complex[:, ::1] k4 = work[5]

    cdef Py_ssize_t i, a, b, c
    cdef double complex acc, v
    cdef double half = 0.5 * h
    cdef double sixth = h / 6.0
    cdef bint ok

    for a in range(dim):
        for c in range(ncols):
            x[a, c] = x0[a, c]
            traj[0, a, c] = x0[a, c]

    for i in range(nsteps):
        _stage(k_nodes[i], g_nodes[i], x, k1, dim, ncols, gcols)

        for a in range(dim):
            for c in range(ncols):
                xm[a, c] = x[a, c] + half * k1[a, c]
        _stage(k_half[i], g_half[i], xm, k2, dim, ncols, gcols)

        for a in range(dim):
            for c in range(ncols):
                xm[a, c] = x[a, c] + half * k2[a, c]
        _stage(k_half[i], g_half[i], xm, k3, dim, ncols, gcols)

        for a in range(dim):
            for c in range(ncols):
                xm[a, c] = x[a, c] + h * k3[a, c]
        _stage(k_nodes[i + 1], g_nodes[i + 1], xm, k4, dim, ncols, gcols)

        ok = True
        for a in range(dim):
            for c in range(ncols):
                v = x[a, c] + sixth * (k1[a, c] + 2.0 * (k2[a, c] + k3[a, c]) + k4[a, c])
                x[a, c] = v
                traj[i + 1, a, c] = v
                if not (isfinite(v.real) and isfinite(v.imag)):
                    ok = False
        if not ok:
            return traj_arr[: i + 2], i + 1

    return traj_arr, -1


cdef inline void _stage(
    const double complex[:, ::1] k,
    const double complex[:, ::1] g,
    const double complex[:, ::1] x,
    double complex[:, ::1] out,
    Py_ssize_t dim,
    Py_ssize_t ncols,
    Py_ssize_t gcols,
) noexcept:
    cdef Py_ssize_t a, b, c
    cdef double complex acc
    for a in range(dim):
        for c in range(ncols):
            acc = g[a, c] if gcols == ncols else g[a, 0]
            for b in range(dim):
                acc = acc - k[a, b] * x[b, c]
            out[a, c] = acc
