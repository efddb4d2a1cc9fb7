import numpy as np
import pytest

from helpers import random_connected_graph
from powerspec.analysis import (
    correlation,
    dbscan,
    default_dbscan_eps,
    pca,
    quantile_matrix,
    read_csv_matrix,
    run_pipeline,
    write_csv_matrix,
)
from powerspec.diffusion import DiffusionParams, cylindrical_radius, sample_torus
from powerspec.errors import LengthMismatch, ValidationError, ZeroVariance
from powerspec.graph import normalized_laplacian, path_graph
from powerspec.measures import sample_quantiles
from powerspec.signatures import vertex_spectra
from powerspec.spectral import decompose


def test_quantile_matrix_p3():
    d = decompose(normalized_laplacian(path_graph(3)))
    Q = quantile_matrix(d, 4).rows
    assert np.allclose(Q[0], [0, 1, 1, 2], atol=1e-12)
    assert np.allclose(Q[1], [0, 0, 2, 2], atol=1e-12)


def test_quantile_matrix_matches_per_vertex(rng):
    d = decompose(normalized_laplacian(random_connected_graph(rng, 150)))
    Q = quantile_matrix(d, 37)
    assert (Q.n, Q.m) == (150, 37)
    for x, s in enumerate(vertex_spectra(d)):
        assert np.array_equal(Q.rows[x], sample_quantiles(s.measure, 37).values)


def test_quantile_matrix_invalid_m():
    with pytest.raises(ValidationError):
        quantile_matrix(decompose(np.eye(2)), 0)


def test_pca_line():
    t = np.linspace(-1, 1, 11)
    X = np.column_stack([t, 2 * t, np.zeros_like(t)])
    p = pca(X, 1)
    assert np.allclose(p.components[0], np.array([1, 2, 0]) / np.sqrt(5))
    assert np.allclose(p.scores[:, 0], np.sqrt(5) * t)
    assert np.allclose(p.reconstruct(), X)


@pytest.mark.parametrize("shape", [(40, 5), (5, 40)])
def test_pca_matches_svd(rng, shape):
    X = rng.normal(size=shape) @ np.diag(np.linspace(3, 0.5, shape[1]))[: shape[1], : shape[1]]
    k = 3
    p = pca(X, k)
    Xc = X - X.mean(axis=0)
    _, s, Vt = np.linalg.svd(Xc, full_matrices=False)
    assert np.allclose(p.explained_variance, s[:k] ** 2 / (shape[0] - 1))
    for i in range(k):
        assert abs(abs(p.components[i] @ Vt[i]) - 1) <= 1e-10
        j = np.argmax(np.abs(p.components[i]))
        assert p.components[i, j] > 0
    assert np.allclose(p.components @ p.components.T, np.eye(k), atol=1e-10)


def test_pca_gram_route_drops_null_directions():
    X = np.array([[0.0, 0, 0, 0, 0], [1.0, 0, 0, 0, 0], [2.0, 0, 0, 0, 0]])
    p = pca(X, 2)
    assert p.k == 1


def test_pca_validation(rng):
    with pytest.raises(ValidationError):
        pca(rng.normal(size=(5, 3)), 4)
    with pytest.raises(ValidationError):
        pca(rng.normal(size=(1, 3)), 1)


def test_dbscan_two_blobs(rng, impl):
    X = np.vstack([rng.normal(0, 0.05, (30, 2)), rng.normal(5, 0.05, (30, 2)), [[2.5, 2.5]]])
    c = dbscan(X, 0.5, 5)
    assert c.k == 2
    assert c.noise == 1 and c.labels[-1] == -1
    assert c.clusters() == {frozenset(range(30)), frozenset(range(30, 60))}
    assert c.labels[0] == 0


def test_dbscan_self_counts():
    c = dbscan(np.array([[0.0], [10.0]]), 1.0, 1)
    assert c.k == 2 and c.noise == 0
    c = dbscan(np.array([[0.0], [10.0]]), 1.0, 2)
    assert c.k == 0 and c.noise == 2


def test_dbscan_border_point():
    # the last point is within eps of one core point but has too few neighbours itself
    X = np.array([[0.0], [0.1], [0.2], [0.9]])
    c = dbscan(X, 0.75, 3)
    assert c.labels.tolist() == [0, 0, 0, 0]


def test_dbscan_validation():
    with pytest.raises(ValidationError):
        dbscan(np.zeros((3, 1)), 0.0, 2)
    with pytest.raises(ValidationError):
        dbscan(np.zeros((3, 1)), 1.0, 0)


def test_default_eps():
    assert default_dbscan_eps(np.array([[0.0, 0.0], [3.0, 4.0]])) == pytest.approx(0.25)
    assert default_dbscan_eps(np.zeros((3, 2))) == 1.0


def test_correlation():
    a = np.arange(10.0)
    assert correlation(a, 2 * a + 1) == pytest.approx(1.0)
    assert correlation(a, -a) == pytest.approx(-1.0)
    with pytest.raises(ZeroVariance):
        correlation(a, np.ones(10))
    with pytest.raises(LengthMismatch):
        correlation(a, a[:5])


def test_correlation_matches_numpy(rng):
    a, b = rng.normal(size=(2, 50))
    assert correlation(a, b) == pytest.approx(np.corrcoef(a, b)[0, 1], abs=1e-12)


def test_pipeline_small_torus():
    pc = sample_torus(300, seed=2)
    res = run_pipeline(pc, DiffusionParams(1.0), m=200, min_pts=5)
    assert res.quantiles.rows.shape == (300, 200)
    assert res.pca.scores.shape == (300, 2)
    assert len(res.clusters.labels) == 300
    assert res.eigenvalues.min() >= -1e-10 and res.eigenvalues.max() <= 1 + 1e-10
    # the first principal coordinate tracks distance from the axis monotonically
    rho = cylindrical_radius(pc)
    ranks = lambda v: np.argsort(np.argsort(v))
    assert abs(correlation(ranks(res.pca.scores[:, 0]), ranks(rho))) >= 0.85


def test_csv_matrix_roundtrip(tmp_path, rng):
    M = rng.normal(size=(4, 3))
    path = tmp_path / "m.csv"
    write_csv_matrix(M, path, columns=["a", "b", "c"], header="config: {}")
    assert np.array_equal(read_csv_matrix(path), M)
    labels = np.array([0, -1, 2])
    write_csv_matrix(labels, path, columns=["label"])
    assert read_csv_matrix(path, dtype=int).ravel().tolist() == [0, -1, 2]


def test_dbscan_identical_points_one_cluster():
    c = dbscan(np.ones((12, 2)), 0.1, 5)
    assert c.k == 1 and c.noise == 0


def test_dbscan_tiny_eps_all_noise(rng):
    c = dbscan(rng.normal(size=(20, 2)), 1e-9, 2)
    assert c.k == 0 and c.noise == 20


def test_dbscan_permutation_invariant_sets(rng):
    X = np.vstack([rng.normal(0, 0.1, (25, 2)), rng.normal(3, 0.1, (25, 2)), rng.normal(-3, 0.1, (25, 2))])
    base = dbscan(X, 0.5, 4)
    assert np.array_equal(base.labels, dbscan(X, 0.5, 4).labels)
    perm = rng.permutation(len(X))
    moved = dbscan(X[perm], 0.5, 4)
    relabeled = {frozenset(int(perm[i]) for i in s) for s in moved.clusters()}
    assert relabeled == base.clusters()


@pytest.mark.parametrize("shape", [(10, 4), (4, 10)])
def test_pca_full_rank_reconstruction(rng, shape):
    X = rng.normal(size=shape)
    p = pca(X, min(shape))
    assert np.max(np.abs(p.reconstruct() - X)) <= 1e-8


def test_correlation_independent_samples(rng):
    a, b = rng.normal(size=(2, 1000))
    assert abs(correlation(a, b)) < 0.1
