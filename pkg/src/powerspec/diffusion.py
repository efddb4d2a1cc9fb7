"""Diffusion-map operators on point clouds and the torus sampler."""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import BadRadii, DegenerateWeight, DimensionMismatch, ValidationError


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise DimensionMismatch(f"points must be an (n, d) array, got shape {pts.shape}")
        if pts.shape[0] < 2:
            raise ValidationError("a point cloud needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("point cloud has non-finite coordinates")
        object.__setattr__(self, "points", np.ascontiguousarray(pts))

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]

    def sq_distances(self):
        return _kernels.pairwise_sqdist(self.points)


@dataclass(frozen=True)
class DiffusionParams:
    epsilon: float
    alpha: float = 0.5

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValidationError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 <= self.alpha <= 1:
            raise ValidationError(f"alpha must lie in [0, 1], got {self.alpha}")


def gaussian_kernel_matrix(pc, epsilon):
    """``exp(-|x - y|^2 / (2 epsilon^2))`` for every pair of points."""
    if not epsilon > 0:
        raise ValidationError(f"epsilon must be positive, got {epsilon}")
    # divide twice so epsilon**2 never underflows to zero
    with np.errstate(over="ignore"):
        K = np.exp(-(pc.sq_distances() / epsilon / epsilon) / 2.0)
    np.fill_diagonal(K, 1.0)
    return K


def diffusion_operator(pc, params):
    """Symmetric diffusion matrix ``k~(x, y) / sqrt(nu(x) nu(y))``.

    ``k~ = k / (omega(x) omega(y))^alpha`` with ``omega`` the kernel row sums and
    ``nu`` the row sums of ``k~`` (uniform empirical measure on the cloud).
    """
    K = gaussian_kernel_matrix(pc, params.epsilon)
    omega = K.sum(axis=1)
    if np.any(omega <= 0) or not np.all(np.isfinite(omega)):
        raise DegenerateWeight("kernel row sum vanished; epsilon is too small")
    wa = omega ** (-params.alpha)
    Kt = wa[:, None] * K * wa[None, :]
    nu = Kt.sum(axis=1)
    if np.any(nu <= 0) or not np.all(np.isfinite(nu)):
        raise DegenerateWeight("normalized kernel row sum vanished")
    s = 1.0 / np.sqrt(nu)
    S = s[:, None] * Kt * s[None, :]
    return 0.5 * (S + S.T)


def stationary_direction(pc, params):
    """Unit vector proportional to ``sqrt(nu)``: the eigenvalue-1 eigenvector of the operator."""
    K = gaussian_kernel_matrix(pc, params.epsilon)
    wa = K.sum(axis=1) ** (-params.alpha)
    nu = (wa[:, None] * K * wa[None, :]).sum(axis=1)
    v = np.sqrt(nu)
    return v / np.linalg.norm(v)


def sample_torus(n, R=1.0, r=0.25, seed=0):
    """``n`` points uniform in surface area on a torus about the z-axis.

    The tube angle is drawn by rejection against the area density
    ``1 + (r/R) cos v``.
    """
    if not 0 < r < R:
        raise BadRadii(f"need 0 < r < R, got R={R}, r={r}")
    if n < 2:
        raise ValidationError("need at least two points")
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 2.0 * np.pi, size=n)
    v = np.empty(n)
    filled = 0
    ratio = r / R
    while filled < n:
        batch = max(16, 2 * (n - filled))
        cand = rng.uniform(0.0, 2.0 * np.pi, size=batch)
        accept = rng.uniform(0.0, 1.0 + ratio, size=batch) <= 1.0 + ratio * np.cos(cand)
        take = cand[accept][: n - filled]
        v[filled : filled + len(take)] = take
        filled += len(take)
    rho = R + r * np.cos(v)
    pts = np.column_stack([rho * np.cos(u), rho * np.sin(u), r * np.sin(v)])
    return PointCloud(pts)


def cylindrical_radius(pc):
    return np.hypot(pc.points[:, 0], pc.points[:, 1])


def read_point_cloud(path):
    """CSV with one point per line; a non-numeric first line is treated as a header."""
    rows = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                rows.append([float(v) for v in line.split(",")])
            except ValueError:
                if rows:
                    raise ValidationError(f"{path}: unparseable row {line!r}") from None
                continue
    if rows and len({len(r) for r in rows}) != 1:
        raise DimensionMismatch(f"{path}: rows have differing dimensions")
    return PointCloud(np.array(rows, dtype=float))


def write_point_cloud(pc, path, header=None):
    with open(path, "w") as fh:
        if header:
            fh.write(f"# {header}\n")
        fh.write(",".join(f"x{i}" for i in range(pc.d)) + "\n")
        for row in pc.points:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
