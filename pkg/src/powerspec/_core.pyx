# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Mirrors ``_fallback`` function by function."""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport fabs, sqrt, pow

cnp.import_array()


def jacobi_eigh(double[:, ::1] H, double tol=1e-14, int max_sweeps=100):
    """Cyclic Jacobi eigensolver for a real symmetric matrix.

    Returns ``(w, V, sweeps)`` with unsorted eigenvalues ``w`` and orthonormal
    eigenvector columns ``V``. ``sweeps == -1`` signals non-convergence.
    """
    cdef Py_ssize_t n = H.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] A_arr = np.array(H, dtype=np.float64, copy=True)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] V_arr = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] A = A_arr
    cdef double[:, ::1] V = V_arr
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double off, scale, apq, theta, t, c, s, akp, akq, vkp, vkq, app, aqq
    scale = 0.0
    for p in range(n):
        for q in range(n):
            scale += A[p, q] * A[p, q]
    scale = sqrt(scale)
    if n < 2 or scale == 0.0:
        return np.diagonal(A_arr).copy(), V_arr, 0
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += A[p, q] * A[p, q]
        if sqrt(2.0 * off) <= tol * scale:
            return np.diagonal(A_arr).copy(), V_arr, sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                app = A[p, p]
                aqq = A[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if theta >= 0:
                    t = 1.0 / (theta + sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + sqrt(1.0 + theta * theta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * akq
                    A[k, q] = s * akp + c * akq
                for k in range(n):
                    akp = A[p, k]
                    akq = A[q, k]
                    A[p, k] = c * akp - s * akq
                    A[q, k] = s * akp + c * akq
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - s * vkq
                    V[k, q] = s * vkp + c * vkq
    return np.diagonal(A_arr).copy(), V_arr, -1


cdef double _steps_integral(const double[::1] xa, const double[::1] ca,
                            const double[::1] xb, const double[::1] cb,
                            double p) noexcept nogil:
    cdef Py_ssize_t i = 0, j = 0
    cdef Py_ssize_t na = xa.shape[0], nb = xb.shape[0]
    cdef double prev = 0.0, cur, d, total = 0.0
    while i < na and j < nb:
        if ca[i] < cb[j]:
            cur = ca[i]
        else:
            cur = cb[j]
        d = fabs(xa[i] - xb[j])
        if p == 1.0:
            total += (cur - prev) * d
        else:
            total += (cur - prev) * pow(d, p)
        prev = cur
        if ca[i] == cur:
            i += 1
        if cb[j] == cur:
            j += 1
    return total


def wasserstein_steps(const double[::1] xa, const double[::1] ca,
                      const double[::1] xb, const double[::1] cb, double p):
    """Integral of |qa - qb|^p over (0, 1] for two step quantile functions.

    ``ca``/``cb`` are cumulative masses ending in exactly 1.0.
    """
    return _steps_integral(xa, ca, xb, cb, p)


def pairwise_cdf_l1(const double[:, ::1] cdf, const double[::1] widths, int threads=1):
    """D[i, j] = sum_k widths[k] * |cdf[i, k] - cdf[j, k]|."""
    cdef Py_ssize_t n = cdf.shape[0], m = cdf.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] D = out
    cdef Py_ssize_t i, j, k
    cdef double acc
    for i in prange(n, nogil=True, schedule="dynamic", num_threads=threads):
        for j in range(i + 1, n):
            acc = 0.0
            for k in range(m):
                acc = acc + widths[k] * fabs(cdf[i, k] - cdf[j, k])
            D[i, j] = acc
            D[j, i] = acc
    return out


def pairwise_sqdist(const double[:, ::1] X, int threads=1):
    """Squared Euclidean distances from coordinate differences."""
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] D = out
    cdef Py_ssize_t i, j, k
    cdef double acc, diff
    for i in prange(n, nogil=True, schedule="dynamic", num_threads=threads):
        for j in range(i + 1, n):
            acc = 0.0
            for k in range(d):
                diff = X[i, k] - X[j, k]
                acc = acc + diff * diff
            D[i, j] = acc
            D[j, i] = acc
    return out


cdef inline double _sqdist(const double[:, ::1] X, Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t k
    cdef double acc = 0.0, diff
    for k in range(X.shape[1]):
        diff = X[i, k] - X[j, k]
        acc += diff * diff
    return acc


def dbscan(const double[:, ::1] X, double eps, int min_pts, int threads=1):
    """DBSCAN labels (-1 noise). A point counts itself as a neighbour."""
    cdef Py_ssize_t n = X.shape[0]
    cdef double eps2 = eps * eps
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] labels_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] queue_arr = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] queued_arr = np.zeros(n, dtype=np.uint8)
    cdef long long[::1] counts = counts_arr
    cdef long long[::1] labels = labels_arr
    cdef long long[::1] queue = queue_arr
    cdef unsigned char[::1] queued = queued_arr
    cdef Py_ssize_t i, j, head, tail, cur
    cdef long long c, cluster = 0
    for i in prange(n, nogil=True, schedule="dynamic", num_threads=threads):
        c = 0
        for j in range(n):
            if _sqdist(X, i, j) <= eps2:
                c = c + 1
        counts[i] = c
    for i in range(n):
        if labels[i] != -1 or counts[i] < min_pts:
            continue
        labels[i] = cluster
        head = 0
        tail = 0
        queue[tail] = i
        tail += 1
        queued[i] = 1
        while head < tail:
            cur = queue[head]
            head += 1
            for j in range(n):
                if _sqdist(X, cur, j) > eps2:
                    continue
                if labels[j] == -1:
                    labels[j] = cluster
                if counts[j] >= min_pts and not queued[j]:
                    queued[j] = 1
                    queue[tail] = j
                    tail += 1
        cluster += 1
    return labels_arr
