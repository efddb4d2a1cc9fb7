"""Quantile features of vertex spectra, PCA and DBSCAN clustering."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .diffusion import diffusion_operator
from .errors import LengthMismatch, ValidationError, ZeroVariance
from .measures import midpoint_grid
from .signatures import MASS_FLOOR, vertex_mass_matrix
from .spectral import _eigh, decompose


@dataclass(frozen=True, eq=False)
class QuantileMatrix:
    rows: np.ndarray

    @property
    def n(self):
        return self.rows.shape[0]

    @property
    def m(self):
        return self.rows.shape[1]


@dataclass(frozen=True, eq=False)
class PCAResult:
    scores: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    mean: np.ndarray

    @property
    def k(self):
        return self.components.shape[0]

    def reconstruct(self):
        return self.scores @ self.components + self.mean


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    labels: np.ndarray
    k: int

    @property
    def noise(self):
        return int(np.sum(self.labels == -1))

    def clusters(self):
        """Clusters as a set of frozensets of point indices, independent of label ids."""
        return {frozenset(np.flatnonzero(self.labels == c).tolist()) for c in range(self.k)}


def _quantile_rows(masses, atoms, grid):
    masses = np.where(masses >= MASS_FLOOR, masses, 0.0)
    cum = np.cumsum(masses, axis=1)
    cum /= cum[:, -1:]
    cum[:, -1] = 1.0
    out = np.empty((masses.shape[0], len(grid)))
    for i, row in enumerate(cum):
        out[i] = atoms[np.searchsorted(row, grid, side="left")]
    return out


def quantile_matrix(d, m):
    """Row ``x`` samples the quantile function of the spectrum of ``delta_x`` on the midpoint grid."""
    if m < 1:
        raise ValidationError("need at least one quantile")
    M = vertex_mass_matrix(d)
    atoms = d.distinct_eigenvalues
    grid = midpoint_grid(m)
    workers = _kernels.num_threads()
    chunks = np.array_split(np.arange(d.n), max(1, min(workers, d.n // 64)))
    if len(chunks) == 1:
        return QuantileMatrix(_quantile_rows(M, atoms, grid))
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(pool.map(lambda idx: _quantile_rows(M[idx], atoms, grid), chunks))
    return QuantileMatrix(np.vstack(parts))


def _orient(components):
    # deterministic signs: largest-magnitude entry of each component positive
    idx = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(len(components)), idx])
    signs[signs == 0] = 1.0
    return components * signs[:, None]


def pca(X, k):
    """Principal components of the column-centred data.

    Eigendecomposes the ``m x m`` covariance when ``m <= n`` and the ``n x n``
    Gram matrix otherwise. In the Gram route, directions with (numerically)
    zero variance have no defined component and are dropped, so fewer than
    ``k`` components may come back.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValidationError("pca expects a 2-D array")
    n, m = X.shape
    if n < 2:
        raise ValidationError("pca needs at least two rows")
    if not 1 <= k <= min(n, m):
        raise ValidationError(f"k must lie in 1..{min(n, m)}, got {k}")
    mu = X.mean(axis=0)
    Xc = X - mu
    if m <= n:
        C = Xc.T @ Xc / (n - 1)
        w, V = _eigh(0.5 * (C + C.T), "lapack")
        order = np.argsort(w)[::-1][:k]
        var = np.clip(w[order], 0.0, None)
        comps = V[:, order].T
    else:
        G = Xc @ Xc.T
        w, U = _eigh(0.5 * (G + G.T), "lapack")
        order = np.argsort(w)[::-1][:k]
        w = w[order]
        tol = max(w[0], 0.0) * max(n, m) * np.finfo(float).eps
        keep = w > tol
        w, U = w[keep], U[:, order][:, keep]
        comps = (Xc.T @ U / np.sqrt(w)).T
        var = w / (n - 1)
    comps = _orient(comps)
    return PCAResult(Xc @ comps.T, comps, var, mu)


def dbscan(X, eps, min_pts):
    """Density clustering under the Euclidean metric; label -1 marks noise.

    A point is core when at least ``min_pts`` points (itself included) lie
    within ``eps``. Clusters are numbered in order of their first core point.
    """
    if not eps > 0:
        raise ValidationError(f"eps must be positive, got {eps}")
    if min_pts < 1:
        raise ValidationError(f"min_pts must be >= 1, got {min_pts}")
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    labels = np.asarray(_kernels.dbscan(X, eps, min_pts), dtype=np.int64)
    return ClusterAssignment(labels, int(labels.max(initial=-1) + 1))


def default_dbscan_eps(X, fraction=0.05):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    diam = float(np.sqrt(_kernels.pairwise_sqdist(X).max(initial=0.0)))
    return fraction * diam if diam > 0 else 1.0


def correlation(a, b):
    """Pearson correlation coefficient."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise LengthMismatch(f"lengths {a.size} and {b.size}")
    if a.size < 2:
        raise ValidationError("correlation needs at least two samples")
    a = a - a.mean()
    b = b - b.mean()
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVariance("correlation undefined for a constant vector")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


@dataclass(frozen=True, eq=False)
class PipelineResult:
    eigenvalues: np.ndarray
    quantiles: QuantileMatrix
    pca: PCAResult
    clusters: ClusterAssignment
    dbscan_eps: float


def run_pipeline(pc, params, m=1000, pca_k=2, dbscan_eps=None, min_pts=10):
    """Diffusion operator, vertex spectra as quantile vectors, PCA, then DBSCAN on the scores."""
    d = decompose(diffusion_operator(pc, params))
    Q = quantile_matrix(d, m)
    k = min(pca_k, Q.n, Q.m)
    p = pca(Q.rows, k)
    eps = default_dbscan_eps(p.scores) if dbscan_eps is None else dbscan_eps
    labels = dbscan(p.scores, eps, min_pts)
    return PipelineResult(d.eigenvalues, Q, p, labels, eps)


def write_csv_matrix(M, path, columns=None, header=None):
    M = np.asarray(M)
    with open(path, "w") as fh:
        if header:
            fh.write(f"# {header}\n")
        if columns:
            fh.write(",".join(columns) + "\n")
        fmt = (lambda v: str(int(v))) if np.issubdtype(M.dtype, np.integer) else (lambda v: repr(float(v)))
        for row in np.atleast_2d(M.T).T if M.ndim == 1 else M:
            row = np.atleast_1d(row)
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_csv_matrix(path, dtype=float):
    """Read a CSV written by ``write_csv_matrix`` (comment lines and a text header are skipped)."""
    rows = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                rows.append([dtype(v) for v in line.split(",")])
            except ValueError:
                if rows:
                    raise
    return np.array(rows, dtype=dtype)
