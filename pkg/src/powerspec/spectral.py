"""Symmetric eigendecomposition with explicit eigenspace grouping.

Eigenvalues closer than ``group_tol`` are treated as one distinct eigenvalue;
everything downstream (power spectra, projections, gaps) works with those
groups rather than with individual, basis-dependent eigenvectors.
"""
import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NotSymmetric,
    SingleEigenvalue,
    SolverFailure,
    ValidationError,
)

SYMMETRY_RTOL = 1e-10


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues, their multiplicities and an orthonormal basis.

    Attributes
    ----------
    distinct_eigenvalues : ndarray (m,)
        Strictly increasing group representatives (mean of each group).
    multiplicities : ndarray (m,)
        Group sizes, summing to ``n``.
    eigenvectors : ndarray (n, n)
        Orthonormal columns; group ``k`` owns columns
        ``group_offsets[k]:group_offsets[k + 1]``.
    group_offsets : ndarray (m + 1,)
    eigenvalues : ndarray (n,)
        Raw ascending eigenvalues before grouping.
    group_tol : float
    """

    distinct_eigenvalues: np.ndarray
    multiplicities: np.ndarray
    eigenvectors: np.ndarray
    group_offsets: np.ndarray
    eigenvalues: np.ndarray
    group_tol: float

    @property
    def n(self):
        return self.eigenvectors.shape[0]

    @property
    def m(self):
        return len(self.distinct_eigenvalues)

    def group_slice(self, k):
        return slice(int(self.group_offsets[k]), int(self.group_offsets[k + 1]))

    def group_of_column(self):
        return np.repeat(np.arange(self.m), self.multiplicities)

    def reconstruct(self):
        Q = self.eigenvectors
        return (Q * self.eigenvalues) @ Q.T

    def with_basis(self, Q):
        """Same grouping with a different orthonormal basis (columns aligned to groups)."""
        return SpectralDecomposition(
            self.distinct_eigenvalues, self.multiplicities, np.asarray(Q, dtype=float),
            self.group_offsets, self.eigenvalues, self.group_tol,
        )

    def to_json(self):
        return {
            "n": self.n,
            "group_tol": self.group_tol,
            "distinct_eigenvalues": self.distinct_eigenvalues.tolist(),
            "multiplicities": self.multiplicities.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "eigenvectors": self.eigenvectors.tolist(),
        }


def check_symmetric(H):
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise ValidationError("matrix has non-finite entries")
    scale = np.max(np.abs(H)) if H.size else 0.0
    if H.size and np.max(np.abs(H - H.T)) > SYMMETRY_RTOL * max(scale, np.finfo(float).tiny):
        raise NotSymmetric(f"max asymmetry {np.max(np.abs(H - H.T)):.3e} exceeds tolerance")
    return 0.5 * (H + H.T)


def default_group_tol(w):
    return 1e-8 * max(1.0, float(np.max(np.abs(w))) if len(w) else 1.0)


def _eigh(H, method):
    if method == "lapack":
        try:
            return np.linalg.eigh(H)
        except np.linalg.LinAlgError as exc:
            raise SolverFailure(str(exc)) from exc
    if method == "jacobi":
        w, V, sweeps = _kernels.jacobi_eigh(H)
        if sweeps < 0:
            raise SolverFailure("Jacobi iteration did not converge")
        order = np.argsort(w, kind="stable")
        return w[order], V[:, order]
    raise ValidationError(f"unknown eigensolver {method!r}")


def group_eigenvalues(w, tol):
    """Split ascending ``w`` wherever consecutive values differ by more than ``tol``."""
    if len(w) == 0:
        return np.array([0])
    cuts = np.flatnonzero(np.diff(w) > tol) + 1
    return np.concatenate([[0], cuts, [len(w)]])


def decompose(H, group_tol=None, method="lapack"):
    """Eigendecompose a real symmetric matrix and group degenerate eigenvalues.

    ``method`` is ``"lapack"`` (numpy ``eigh``) or ``"jacobi"`` (cyclic Jacobi
    kernel). ``group_tol`` defaults to ``1e-8 * max(1, ||H||_2)``.
    """
    H = check_symmetric(H)
    w, Q = _eigh(H, method)
    if group_tol is None:
        group_tol = default_group_tol(w)
    offsets = group_eigenvalues(w, group_tol)
    mult = np.diff(offsets)
    distinct = np.add.reduceat(w, offsets[:-1]) / mult if len(w) else np.empty(0)
    return SpectralDecomposition(distinct, mult, Q, offsets, w, float(group_tol))


def projection(d, k):
    """Orthogonal projection onto the eigenspace of distinct eigenvalue ``k``."""
    if not 0 <= k < d.m:
        raise IndexOutOfRange(f"group {k} outside 0..{d.m - 1}")
    Phi = d.eigenvectors[:, d.group_slice(k)]
    return Phi @ Phi.T


def projections(d):
    return [projection(d, k) for k in range(d.m)]


def spectral_gap(d):
    """Smallest distance between distinct eigenvalues."""
    if d.m < 2:
        raise SingleEigenvalue("spectral gap needs at least two distinct eigenvalues")
    return float(np.min(np.diff(d.distinct_eigenvalues)))


def operator_two_norm(M):
    """Spectral radius of a symmetric matrix."""
    M = check_symmetric(M)
    if M.size == 0:
        return 0.0
    try:
        w = np.linalg.eigvalsh(M)
    except np.linalg.LinAlgError as exc:
        raise SolverFailure(str(exc)) from exc
    return float(np.max(np.abs(w)))


def read_matrix(path):
    """Load a dense matrix from CSV (row per line, ``#`` comments) or JSON."""
    path = str(path)
    if path.endswith(".json"):
        with open(path) as fh:
            obj = json.load(fh)
        n = int(obj["n"])
        data = np.asarray(obj["data"], dtype=float)
        if data.size != n * n:
            raise DimensionMismatch(f"{path}: expected {n * n} entries, got {data.size}")
        return data.reshape(n, n)
    M = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    return M


def write_matrix(M, path, header=None):
    M = np.asarray(M, dtype=float)
    path = str(path)
    if path.endswith(".json"):
        obj = {"n": M.shape[0], "data": M.ravel().tolist()}
        if header:
            obj["config"] = header
        with open(path, "w") as fh:
            json.dump(obj, fh)
            fh.write("\n")
        return
    with open(path, "w") as fh:
        if header:
            fh.write(f"# {header}\n")
        for row in M:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
