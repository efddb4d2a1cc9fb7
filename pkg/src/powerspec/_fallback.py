"""Pure numpy versions of the kernels in ``_core.pyx``.

Same signatures and results; used when the extension is not built or
``POWERSPEC_PURE_PYTHON`` is set.
"""
import numpy as np


def jacobi_eigh(H, tol=1e-14, max_sweeps=100):
    A = np.array(H, dtype=np.float64, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    scale = np.linalg.norm(A)
    if n < 2 or scale == 0.0:
        return np.diagonal(A).copy(), V, 0
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps):
        if np.sqrt(2.0 * np.sum(A[iu] ** 2)) <= tol * scale:
            return np.diagonal(A).copy(), V, sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta >= 0:
                    t = 1.0 / (theta + np.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + np.sqrt(1.0 + theta * theta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = c * colp - s * colq
                A[:, q] = s * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = c * rowp - s * rowq
                A[q, :] = s * rowp + c * rowq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    return np.diagonal(A).copy(), V, -1


def wasserstein_steps(xa, ca, xb, cb, p):
    # both cumulative sequences end at exactly 1.0
    breaks = np.union1d(ca, cb)
    widths = np.diff(breaks, prepend=0.0)
    qa = xa[np.searchsorted(ca, breaks, side="left")]
    qb = xb[np.searchsorted(cb, breaks, side="left")]
    d = np.abs(qa - qb)
    if p != 1.0:
        d = d**p
    return float(np.dot(widths, d))


def pairwise_cdf_l1(cdf, widths, threads=1):
    n = cdf.shape[0]
    out = np.zeros((n, n))
    for i in range(n - 1):
        out[i, i + 1 :] = np.abs(cdf[i + 1 :] - cdf[i]) @ widths
    return out + out.T


def pairwise_sqdist(X, threads=1):
    n = X.shape[0]
    out = np.empty((n, n))
    for i in range(n):
        diff = X - X[i]
        out[i] = np.einsum("ij,ij->i", diff, diff)
    np.fill_diagonal(out, 0.0)
    return out


def dbscan(X, eps, min_pts, threads=1):
    n = X.shape[0]
    near = pairwise_sqdist(X) <= eps * eps
    counts = near.sum(axis=1)
    labels = np.full(n, -1, dtype=np.int64)
    queued = np.zeros(n, dtype=bool)
    cluster = 0
    for i in range(n):
        if labels[i] != -1 or counts[i] < min_pts:
            continue
        labels[i] = cluster
        queue = [i]
        queued[i] = True
        head = 0
        while head < len(queue):
            cur = queue[head]
            head += 1
            for j in np.flatnonzero(near[cur]):
                if labels[j] == -1:
                    labels[j] = cluster
                if counts[j] >= min_pts and not queued[j]:
                    queued[j] = True
                    queue.append(j)
        cluster += 1
    return labels
