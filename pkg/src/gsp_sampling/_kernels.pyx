# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled greedy-selection kernel.

Mirrors ``_kernels_py.candidate_spectra``. The selected rows are first
reduced to their triangular QR factor ``R`` (at most ``k`` rows); since
``[A; u]`` and ``[R; u]`` have the same singular values, each candidate
then needs an SVD of at most ``(k + 1) x k`` rather than ``(m + 1) x k``.
LAPACK ``dgesdd`` is called directly on a reusable buffer.
"""

import numpy as np
from libc.math cimport log
from libc.stdlib cimport malloc, free
from scipy.linalg.cython_lapack cimport dgesdd


def candidate_spectra(const double[:, ::1] u_k, const Py_ssize_t[::1] selected,
                      const Py_ssize_t[::1] candidates, double rtol):
    cdef int k = <int>u_k.shape[1]
    cdef const double[:, ::1] base
    if selected.shape[0] > 0:
        base = np.ascontiguousarray(np.linalg.qr(np.asarray(u_k)[np.asarray(selected)], mode="r"))
    else:
        base = np.zeros((0, k))
    cdef Py_ssize_t m = base.shape[0]
    cdef Py_ssize_t c = candidates.shape[0]
    cdef int rows = <int>(m + 1)
    cdef int ns = k if k < rows else rows
    cdef int lda = k
    cdef int one = 1
    cdef int lwork = -1
    cdef int info = 0
    cdef double wquery = 0.0
    cdef double dummy = 0.0
    cdef char jobz = b'N'

    rank_out = np.zeros(c, dtype=np.int64)
    recip_out = np.zeros(c, dtype=np.float64)
    logdet_out = np.zeros(c, dtype=np.float64)
    minsq_out = np.zeros(c, dtype=np.float64)
    cdef long long[::1] rank_v = rank_out
    cdef double[::1] recip_v = recip_out
    cdef double[::1] logdet_v = logdet_out
    cdef double[::1] minsq_v = minsq_out

    if c == 0 or k == 0:
        return rank_out, recip_out, logdet_out, minsq_out

    cdef double *a = <double *>malloc(k * rows * sizeof(double))
    cdef double *s = <double *>malloc(ns * sizeof(double))
    cdef int *iwork = <int *>malloc(8 * ns * sizeof(int))
    cdef double *work = NULL
    if a == NULL or s == NULL or iwork == NULL:
        free(a); free(s); free(iwork)
        raise MemoryError()

    # Column-major k x rows view of the row-major gather: the transpose of
    # U_k[S + v], which has the same singular values.
    dgesdd(&jobz, &lda, &rows, a, &lda, s, &dummy, &one, &dummy, &one,
           &wquery, &lwork, iwork, &info)
    lwork = <int>wquery + 1
    work = <double *>malloc(lwork * sizeof(double))
    if work == NULL:
        free(a); free(s); free(iwork)
        raise MemoryError()

    cdef Py_ssize_t ci, r, j, row
    cdef int nz
    cdef double cut, sq, rs, ld
    try:
        with nogil:
            for ci in range(c):
                # dgesdd overwrites its input, so R is re-copied each time.
                for r in range(m):
                    for j in range(k):
                        a[r * k + j] = base[r, j]
                row = candidates[ci]
                for j in range(k):
                    a[m * k + j] = u_k[row, j]
                dgesdd(&jobz, &lda, &rows, a, &lda, s, &dummy, &one, &dummy, &one,
                       work, &lwork, iwork, &info)
                if info != 0:
                    break
                cut = rtol * s[0]
                nz = 0
                rs = 0.0
                ld = 0.0
                for j in range(ns):
                    if s[j] > cut:
                        sq = s[j] * s[j]
                        nz += 1
                        rs += 1.0 / sq
                        ld += log(sq)
                rank_v[ci] = nz
                recip_v[ci] = rs
                logdet_v[ci] = ld
                if nz > 0:
                    minsq_v[ci] = s[nz - 1] * s[nz - 1]
        if info != 0:
            raise ArithmeticError(f"dgesdd failed with info={info}")
    finally:
        free(a); free(s); free(iwork); free(work)
    return rank_out, recip_out, logdet_out, minsq_out
