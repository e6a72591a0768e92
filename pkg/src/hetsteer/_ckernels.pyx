# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batched coherent-state quadratic forms.

Same contract as ``_kernels_py.quadratic_forms``; points are spread over
OpenMP threads and each slice of ``f`` is read only on and above the diagonal.
"""
import numpy as np

from cython.parallel cimport prange, threadid
from libc.math cimport sqrt, log, fabs

cimport openmp

cdef double RESCALE = 1e150


cdef void _point(const double[:, :, ::1] fr, const double[:, :, ::1] fi,
                 double br, double bi, double* ur, double* ui, int k,
                 double* q, double* log_mass) noexcept nogil:
    cdef int n, i, j
    cdef double log_scale = 0.0, s = 0.0, inv, a, tr, ti, pr, pi
    ur[0] = 1.0
    ui[0] = 0.0
    for n in range(k - 1):
        a = 1.0 / sqrt(n + 1.0)
        tr = (ur[n] * br - ui[n] * bi) * a
        ti = (ur[n] * bi + ui[n] * br) * a
        ur[n + 1] = tr
        ui[n + 1] = ti
        if fabs(tr) > RESCALE or fabs(ti) > RESCALE:
            for i in range(n + 2):
                ur[i] /= RESCALE
                ui[i] /= RESCALE
            log_scale += log(RESCALE)
    for i in range(k):
        s += ur[i] * ur[i] + ui[i] * ui[i]
    inv = 1.0 / sqrt(s)
    for i in range(k):
        ur[i] *= inv
        ui[i] *= inv
    log_mass[0] = -(br * br + bi * bi) + 2.0 * log_scale + log(s)

    # four operator slices, interleaved as (k, k, 4); eight independent accumulators
    cdef double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0
    cdef double c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0
    cdef const double* rr
    cdef const double* ri
    for i in range(k):
        rr = &fr[i, 0, 0]
        ri = &fi[i, 0, 0]
        pr = ur[i] * ur[i] + ui[i] * ui[i]
        a0 += pr * rr[4 * i]
        a1 += pr * rr[4 * i + 1]
        a2 += pr * rr[4 * i + 2]
        a3 += pr * rr[4 * i + 3]
        for j in range(i + 1, k):
            # conj(u_i) u_j, doubled for the mirrored lower-triangle term
            pr = 2.0 * (ur[i] * ur[j] + ui[i] * ui[j])
            pi = 2.0 * (ur[i] * ui[j] - ui[i] * ur[j])
            a0 += pr * rr[4 * j]
            a1 += pr * rr[4 * j + 1]
            a2 += pr * rr[4 * j + 2]
            a3 += pr * rr[4 * j + 3]
            c0 += pi * ri[4 * j]
            c1 += pi * ri[4 * j + 1]
            c2 += pi * ri[4 * j + 2]
            c3 += pi * ri[4 * j + 3]
    q[0] = a0 - c0
    q[1] = a1 - c1
    q[2] = a2 - c2
    q[3] = a3 - c3

def quadratic_forms(f, betas, int num_threads=0):
    f = np.asarray(f, dtype=np.complex128)
    cdef const double[:, :, ::1] fr = np.ascontiguousarray(f.real.transpose(1, 2, 0))
    cdef const double[:, :, ::1] fi = np.ascontiguousarray(f.imag.transpose(1, 2, 0))
    b = np.ascontiguousarray(np.asarray(betas, dtype=np.complex128).reshape(-1))
    cdef const double[::1] bre = np.ascontiguousarray(b.real)
    cdef const double[::1] bim = np.ascontiguousarray(b.imag)
    if f.ndim != 3 or f.shape[0] != 4 or f.shape[1] != f.shape[2]:
        raise ValueError(f"expected operators of shape (4, k, k), got {f.shape}")
    cdef int nv = 4, k = f.shape[2]
    cdef Py_ssize_t m = b.shape[0], p
    if num_threads <= 0:
        num_threads = openmp.omp_get_max_threads()
    q = np.zeros((m, nv))
    log_mass = np.zeros(m)
    cdef double[:, ::1] qv = q
    cdef double[::1] lm = log_mass
    cdef double[:, ::1] ur = np.empty((num_threads, k))
    cdef double[:, ::1] ui = np.empty((num_threads, k))
    cdef int t
    if m == 0:
        return q, log_mass
    for p in prange(m, nogil=True, schedule="static", num_threads=num_threads):
        t = threadid()
        _point(fr, fi, bre[p], bim[p], &ur[t, 0], &ui[t, 0], k, &qv[p, 0], &lm[p])
    return q, log_mass
