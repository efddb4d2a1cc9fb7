import numpy as np
import pytest

from powerspec.diffusion import (
    DiffusionParams,
    PointCloud,
    cylindrical_radius,
    diffusion_operator,
    gaussian_kernel_matrix,
    read_point_cloud,
    sample_torus,
    stationary_direction,
    write_point_cloud,
)
from powerspec.errors import BadRadii, DimensionMismatch, ValidationError
from powerspec.spectral import decompose

GAUSS_DIST2_EPS1 = 0.1353352832366127  # exp(-2)


def reference_operator(X, eps, alpha):
    """Loop-based construction straight from the definitions."""
    n = len(X)
    K = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            K[i, j] = np.exp(-np.sum((X[i] - X[j]) ** 2) / (2 * eps**2))
    omega = K.sum(axis=1)
    Kt = np.array([[K[i, j] / (omega[i] * omega[j]) ** alpha for j in range(n)] for i in range(n)])
    nu = Kt.sum(axis=1)
    return np.array([[Kt[i, j] / np.sqrt(nu[i] * nu[j]) for j in range(n)] for i in range(n)])


def test_gaussian_kernel_value():
    pc = PointCloud([[0.0, 0.0], [2.0, 0.0]])
    K = gaussian_kernel_matrix(pc, 1.0)
    assert K[0, 1] == pytest.approx(GAUSS_DIST2_EPS1, abs=1e-15)
    assert K[0, 0] == 1.0


def test_identical_points():
    S = diffusion_operator(PointCloud([[1.0, 1.0], [1.0, 1.0]]), DiffusionParams(1.0))
    assert np.allclose(S, 0.5, atol=1e-15)
    assert np.allclose(decompose(S).distinct_eigenvalues, [0, 1], atol=1e-14)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_operator_matches_reference(rng, impl, alpha):
    X = rng.normal(size=(15, 3))
    S = diffusion_operator(PointCloud(X), DiffusionParams(0.8, alpha))
    assert np.allclose(S, reference_operator(X, 0.8, alpha), atol=1e-13)


def test_operator_properties(rng):
    pc = PointCloud(rng.normal(size=(40, 2)))
    params = DiffusionParams(0.7)
    S = diffusion_operator(pc, params)
    assert np.array_equal(S, S.T)
    w = np.linalg.eigvalsh(S)
    assert w.min() >= -1e-12 and w.max() <= 1 + 1e-12
    v = stationary_direction(pc, params)
    assert np.allclose(S @ v, v, atol=1e-12)


def test_tiny_epsilon_decouples_points():
    pc = PointCloud([[0.0], [1.0], [3.0]])
    with np.errstate(all="raise"):
        S = diffusion_operator(pc, DiffusionParams(1e-300, 1.0))
    assert np.array_equal(S, np.eye(3))


def test_params_validation():
    with pytest.raises(ValidationError):
        DiffusionParams(0.0)
    with pytest.raises(ValidationError):
        DiffusionParams(1.0, 1.5)


def test_point_cloud_validation():
    with pytest.raises(DimensionMismatch):
        PointCloud([1.0, 2.0])
    with pytest.raises(ValidationError):
        PointCloud([[1.0]])
    with pytest.raises(ValidationError):
        PointCloud([[np.nan], [1.0]])


def test_torus_geometry():
    R, r = 1.0, 0.25
    pc = sample_torus(500, R, r, seed=3)
    x, y, z = pc.points.T
    rho = cylindrical_radius(pc)
    assert np.allclose((rho - R) ** 2 + z**2, r**2, atol=1e-12)
    assert rho.min() >= R - r - 1e-12 and rho.max() <= R + r + 1e-12


def test_torus_deterministic():
    a = sample_torus(100, seed=5).points
    b = sample_torus(100, seed=5).points
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_torus(100, seed=6).points)


def test_torus_area_uniform():
    # outer half (cos v > 0) carries area fraction 1/2 + (r/R)/pi
    R, r = 1.0, 0.5
    pc = sample_torus(40000, R, r, seed=1)
    outer = np.mean(cylindrical_radius(pc) > R)
    expected = 0.5 + (r / R) / np.pi
    assert abs(outer - expected) < 4 * np.sqrt(expected * (1 - expected) / 40000)


def test_torus_bad_radii():
    for R, r in ((1.0, 1.0), (1.0, 0.0), (1.0, 2.0)):
        with pytest.raises(BadRadii):
            sample_torus(10, R, r)


def test_point_cloud_io(tmp_path, rng):
    pc = PointCloud(rng.normal(size=(6, 3)))
    path = tmp_path / "pc.csv"
    write_point_cloud(pc, path, header="config: {}")
    assert np.array_equal(read_point_cloud(path).points, pc.points)
