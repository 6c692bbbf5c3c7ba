# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: subgradient solver iterations and exhaustive grid scans.

Same contract as ``_kernels_py``; see that module for semantics.  The
iteration bodies run without the GIL, so batch drivers can use threads.
"""

import numpy as np

from libc.math cimport fabs, sqrt


STOP_CONVERGED = 0
STOP_ZERO_SUBGRADIENT = 1
STOP_MAX_ITERS = 2


cdef inline double _objective(const double* x, const double* u, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double s = 0.0
    for i in range(n):
        for j in range(n):
            s += fabs(x[i] * x[j] - u[i] * u[j])
    return 0.5 * s


cdef inline double _subgradient(const double* x, const double* u, double* g,
                                Py_ssize_t n) noexcept nogil:
    # Fills g with sign(x x^T - u u^T) x and returns |g|^2.
    cdef Py_ssize_t i, j
    cdef double r, gi, gg = 0.0
    for i in range(n):
        gi = 0.0
        for j in range(n):
            r = x[i] * x[j] - u[i] * u[j]
            if r > 0.0:
                gi += x[j]
            elif r < 0.0:
                gi -= x[j]
        g[i] = gi
        gg += gi * gi
    return gg


def _run_loop(u_in, x0_in, long max_iters, double f_tol, long record_every,
              bint polyak, double step_c):
    u_arr = np.ascontiguousarray(u_in, dtype=np.float64)
    x_arr = np.array(x0_in, dtype=np.float64)
    cdef Py_ssize_t n = u_arr.shape[0]
    if x_arr.shape[0] != n:
        raise ValueError("u and x0 must have the same length")

    f_hist_arr = np.empty(max_iters + 1, dtype=np.float64)
    g_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] u = u_arr
    cdef double[::1] x = x_arr
    cdef double[::1] g = g_arr
    cdef double[::1] f_hist = f_hist_arr

    rec_arr = None
    cdef double[:, ::1] rec = None
    cdef Py_ssize_t nrec = 0
    if record_every > 0:
        rec_arr = np.empty((max_iters // record_every + 2, n), dtype=np.float64)
        rec = rec_arr

    cdef double f, gg, step
    cdef long k = 0
    cdef int stop = STOP_MAX_ITERS
    cdef Py_ssize_t i

    with nogil:
        f = _objective(&x[0], &u[0], n)
        f_hist[0] = f
        if record_every > 0:
            for i in range(n):
                rec[nrec, i] = x[i]
            nrec += 1
        while True:
            if f <= f_tol:
                stop = STOP_CONVERGED
                break
            if k >= max_iters:
                stop = STOP_MAX_ITERS
                break
            gg = _subgradient(&x[0], &u[0], &g[0], n)
            if gg == 0.0:
                stop = STOP_ZERO_SUBGRADIENT
                break
            if polyak:
                step = f / gg
            else:
                step = step_c / sqrt(k + 1.0) / sqrt(gg)
            for i in range(n):
                x[i] -= step * g[i]
            k += 1
            f = _objective(&x[0], &u[0], n)
            f_hist[k] = f
            if record_every > 0 and k % record_every == 0:
                for i in range(n):
                    rec[nrec, i] = x[i]
                nrec += 1

    iterates = None
    if record_every > 0:
        if k % record_every != 0:
            for i in range(n):
                rec_arr[nrec, i] = x_arr[i]
            nrec += 1
        iterates = rec_arr[:nrec].copy()
    return x_arr, f_hist_arr[: k + 1].copy(), stop, iterates


def polyak_loop(u, x0, long max_iters, double f_tol, long record_every=0):
    """Polyak-step subgradient iteration with known optimal value 0."""
    return _run_loop(u, x0, max_iters, f_tol, record_every, True, 0.0)


def diminishing_loop(u, x0, long max_iters, double f_tol, double step_c,
                     long record_every=0):
    """Normalized-direction subgradient iteration with step c/sqrt(k+1)."""
    return _run_loop(u, x0, max_iters, f_tol, record_every, False, step_c)


def grid_scan(u_scaled, long long step_scaled, long half_count):
    """Exact integer objective table and Moore local-minimum mask (n <= 3)."""
    u_arr = np.ascontiguousarray(u_scaled, dtype=np.int64)
    cdef Py_ssize_t n = u_arr.shape[0]
    if n < 1 or n > 3:
        raise ValueError("grid scan supports 1 <= n <= 3")

    cdef long long[::1] u = u_arr
    cdef Py_ssize_t side = 2 * half_count + 1
    cdef Py_ssize_t total = 1, dim
    for dim in range(n):
        total *= side
    table_arr = np.empty(total, dtype=np.int64)
    mask_arr = np.zeros(total, dtype=np.uint8)
    cdef long long[::1] table = table_arr
    cdef unsigned char[::1] mask = mask_arr

    cdef long long uu[3][3]
    cdef long long c[3]
    cdef Py_ssize_t idx[3]
    cdef Py_ssize_t nb[3]
    cdef long long v, acc
    cdef Py_ssize_t flat, pos, axis, noff, d0, d1, d2
    cdef bint is_min, carry

    for d0 in range(n):
        for d1 in range(n):
            uu[d0][d1] = u[d0] * u[d1]

    with nogil:
        for flat in range(total):
            pos = flat
            for axis in range(n - 1, -1, -1):
                idx[axis] = pos % side
                pos //= side
                c[axis] = (<long long>(idx[axis]) - half_count) * step_scaled
            acc = 0
            for d0 in range(n):
                for d1 in range(n):
                    v = c[d0] * c[d1] - uu[d0][d1]
                    acc += v if v >= 0 else -v
            table[flat] = acc

        # Moore neighborhood: all offset combinations in {-1,0,1}^n except 0.
        for flat in range(total):
            pos = flat
            for axis in range(n - 1, -1, -1):
                idx[axis] = pos % side
                pos //= side
            is_min = True
            for axis in range(n):
                nb[axis] = -1
            while True:
                # Skip the zero offset and out-of-box neighbors.
                noff = 0
                for axis in range(n):
                    if nb[axis] != 0:
                        noff = 1
                    if idx[axis] + nb[axis] < 0 or idx[axis] + nb[axis] >= side:
                        noff = -1
                        break
                if noff == 1:
                    pos = 0
                    for axis in range(n):
                        pos = pos * side + idx[axis] + nb[axis]
                    if table[pos] < table[flat]:
                        is_min = False
                        break
                # Next offset vector.
                carry = True
                for axis in range(n - 1, -1, -1):
                    if nb[axis] < 1:
                        nb[axis] += 1
                        carry = False
                        break
                    nb[axis] = -1
                if carry:
                    break
            if is_min:
                mask[flat] = 1

    return table_arr, mask_arr
