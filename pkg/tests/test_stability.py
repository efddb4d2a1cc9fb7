import numpy as np
import pytest

from helpers import planted_automorphism_graph, random_connected_graph
from powerspec.errors import IndexOutOfRange, InvalidPermutation, TheoremViolation, ValidationError
from powerspec.graph import cycle_graph, normalized_laplacian
from powerspec.spectral import decompose
from powerspec.stability import (
    approximate_symmetry_bound,
    check_permutation,
    convergence_radius,
    convergence_sequence,
    degenerate_matrix,
    degenerate_stress_trial,
    first_order_projection,
    first_order_projection_sum,
    hks_stability_check,
    lipschitz_trial,
    permute_matrix,
    projection_difference_quotient,
    random_symmetric,
    random_trial,
    random_unit_vector,
    read_trials_csv,
    reduced_resolvent,
    run_ensemble,
    summarize,
    write_trials_csv,
)


def test_identity_shift_ratio(rng):
    # H + t c I shifts every atom by t c, so W1 = t c and the ratio is exactly 1/n
    for n in (2, 5, 9):
        H = random_symmetric(rng, n)
        tr = lipschitz_trial(H, 0.7 * np.eye(n), 0.3, random_unit_vector(rng, n))
        assert tr.w1 == pytest.approx(0.21, abs=1e-12)
        assert tr.ratio == pytest.approx(1.0 / n, abs=1e-12)
        assert not tr.violated


def test_zero_perturbation():
    tr = lipschitz_trial(np.eye(3), np.zeros((3, 3)), 1.0, np.array([1.0, 0, 0]))
    assert tr.w1 == 0.0 and tr.ratio == 0.0


def test_trial_requires_unit_function():
    with pytest.raises(ValidationError):
        lipschitz_trial(np.eye(2), np.eye(2), 0.1, np.array([1.0, 1.0]))


def test_degenerate_stress(rng):
    base = np.diag([0.0, 1.0, 1.0, 2.0])
    tr = degenerate_stress_trial(base, random_symmetric(rng, 4), 1e-3)
    assert tr.kind == "degenerate"
    assert not tr.violated
    with pytest.raises(ValidationError):
        degenerate_stress_trial(np.diag([0.0, 1.0]), np.eye(2), 0.1)


@pytest.mark.parametrize("gap", [0.0, 1e-12])
def test_degenerate_matrix_has_cluster(rng, gap):
    for _ in range(20):
        n = int(rng.integers(2, 12))
        w = np.linalg.eigvalsh(degenerate_matrix(rng, n, gap=gap))
        assert np.min(np.diff(w)) <= 1e-10


@pytest.mark.parametrize("kind", ["goe", "degenerate", "near_degenerate"])
def test_random_trials_within_bound(kind):
    for seed in range(50):
        assert not random_trial(seed, kind=kind).violated


def test_random_trial_unknown_kind():
    with pytest.raises(ValidationError):
        random_trial(0, kind="wigner")


def test_run_ensemble_deterministic():
    a = run_ensemble(100, seed=4, workers=4)
    b = run_ensemble(100, seed=4, workers=1)
    assert [t.ratio for t in a] == [t.ratio for t in b]
    assert [t.kind for t in a[:3]] == ["goe", "degenerate", "near_degenerate"]
    s = summarize(a)
    assert s["trials"] == 100 and s["violations"] == 0
    assert 0 < s["max_ratio"] <= 1


def test_trials_csv_roundtrip(tmp_path):
    trials = run_ensemble(5, seed=1)
    path = tmp_path / "t.csv"
    write_trials_csv(trials, path, header="config: {}")
    rows = read_trials_csv(path)
    assert [r["ratio"] for r in rows] == [t.ratio for t in trials]
    assert [r["dim"] for r in rows] == [t.dim for t in trials]


def test_convergence_sequence(rng):
    H = random_symmetric(rng, 6)
    seq = convergence_sequence(H, random_symmetric(rng, 6), random_unit_vector(rng, 6), [1, 10, 100, 1000])
    w1 = [w for _, w, _ in seq]
    assert all(w <= b + 1e-12 for _, w, b in seq)
    assert w1[-1] < 1e-2 * w1[0] + 1e-12


def test_reduced_resolvent(rng):
    d = decompose(random_symmetric(rng, 5))
    for h in range(d.m):
        S = reduced_resolvent(d, h)
        lam = d.distinct_eigenvalues[h]
        # S (H - lambda_h) = I - P_h
        P = d.eigenvectors[:, d.group_slice(h)] @ d.eigenvectors[:, d.group_slice(h)].T
        assert np.allclose(S @ (d.reconstruct() - lam * np.eye(5)), np.eye(5) - P, atol=1e-10)
    with pytest.raises(IndexOutOfRange):
        reduced_resolvent(d, d.m)


def test_first_order_routes_agree(rng):
    for _ in range(10):
        d = decompose(normalized_laplacian(random_connected_graph(rng, 8)))
        Delta = random_symmetric(rng, 8)
        for k in range(1, d.m):
            a = first_order_projection(d, Delta, k)
            b = first_order_projection_sum(d, Delta, k)
            assert np.max(np.abs(a - b)) <= 1e-9


def test_first_order_degenerate_groups():
    # C6 has multiplicity-2 groups; the formula works group-wise
    rng = np.random.default_rng(2)
    d = decompose(normalized_laplacian(cycle_graph(6)))
    Delta = random_symmetric(rng, 6)
    for k in range(1, d.m):
        assert np.allclose(first_order_projection(d, Delta, k), first_order_projection_sum(d, Delta, k), atol=1e-10)


def test_first_order_matches_finite_difference(rng):
    for _ in range(20):
        H = random_symmetric(rng, 6)
        Delta = random_symmetric(rng, 6)
        d = decompose(H)
        k = int(rng.integers(1, d.m))
        exact = first_order_projection(d, Delta, k)
        t = 0.05 * convergence_radius(d, Delta)
        r1 = np.max(np.abs(projection_difference_quotient(d, H, Delta, k, t) - exact))
        r2 = np.max(np.abs(projection_difference_quotient(d, H, Delta, k, t / 2) - exact))
        assert r2 <= r1 / 3.5 or r2 <= 1e-9
        f1 = np.max(np.abs(projection_difference_quotient(d, H, Delta, k, t, central=False) - exact))
        f2 = np.max(np.abs(projection_difference_quotient(d, H, Delta, k, t / 2, central=False) - exact))
        # one-sided quotient is only first order
        assert 1.5 <= f1 / f2 <= 2.5


def test_first_order_index_errors(rng):
    d = decompose(random_symmetric(rng, 3))
    with pytest.raises(IndexOutOfRange):
        first_order_projection(d, np.eye(3), 0)
    with pytest.raises(IndexOutOfRange):
        first_order_projection_sum(d, np.eye(3), d.m)


def test_hks_stability(rng):
    for _ in range(20):
        g = random_connected_graph(rng, 8)
        L = normalized_laplacian(g)
        E = random_symmetric(rng, 8) * 1e-2
        for t in (0.1, 1.0, 10.0):
            lhs, rhs = hks_stability_check(L, L + E, 0, t)
            assert lhs <= rhs + 1e-12


def test_permute_matrix():
    H = np.arange(9.0).reshape(3, 3)
    H = H + H.T
    sigma = np.array([2, 0, 1])
    P = np.eye(3)[:, sigma]
    assert np.array_equal(permute_matrix(H, sigma), P.T @ H @ P)


def test_check_permutation():
    assert check_permutation([1, 0, 2], 3).tolist() == [1, 0, 2]
    for bad in ([0, 0, 1], [0, 1], [1, 2, 3]):
        with pytest.raises(InvalidPermutation):
            check_permutation(bad, 3)


def test_exact_symmetry_gives_zero(rng):
    for _ in range(10):
        g, sigma = planted_automorphism_graph(rng, 4)
        L = normalized_laplacian(g)
        lhs, rhs = approximate_symmetry_bound(decompose(L), sigma, L)
        assert rhs <= 1e-12
        assert lhs.max() <= 1e-9


def test_approximate_symmetry(rng):
    for _ in range(10):
        g, sigma = planted_automorphism_graph(rng, 4)
        L = normalized_laplacian(g) + 1e-3 * random_symmetric(rng, 8)
        L = 0.5 * (L + L.T)
        lhs, rhs = approximate_symmetry_bound(decompose(L), sigma, L)
        assert lhs.max() <= rhs


def test_symmetry_violation_raises():
    # a bogus decomposition whose spectra do not come from H triggers the check
    H = np.zeros((2, 2))
    d = decompose(np.diag([0.0, 1.0]))
    with pytest.raises(TheoremViolation):
        approximate_symmetry_bound(d, [1, 0], H)


def test_torus_rotation_symmetry():
    from scipy.optimize import linear_sum_assignment

    from powerspec.diffusion import DiffusionParams, diffusion_operator, sample_torus

    pc = sample_torus(150, seed=3)
    c, s = np.cos(0.3), np.sin(0.3)
    rotated = pc.points @ np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]]).T
    cost = ((rotated[:, None, :] - pc.points[None, :, :]) ** 2).sum(axis=-1)
    _, sigma = linear_sum_assignment(cost)
    S = diffusion_operator(pc, DiffusionParams(1.0))
    assert np.mean(sigma != np.arange(pc.n)) > 0.5
    lhs, rhs = approximate_symmetry_bound(decompose(S), sigma, S)
    assert 0 < rhs
    assert lhs.max() <= rhs


def test_random_permutation_on_asymmetric_graph(rng):
    for _ in range(10):
        g = random_connected_graph(rng, 9)
        L = normalized_laplacian(g)
        lhs, rhs = approximate_symmetry_bound(decompose(L), rng.permutation(9), L)
        assert lhs.max() <= rhs


@pytest.mark.parametrize("gap", [1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12])
def test_no_blowup_as_gap_closes(gap):
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(40):
        n = int(rng.integers(2, 12))
        H = degenerate_matrix(rng, n, gap=gap)
        tr = lipschitz_trial(H, random_symmetric(rng, n), 10.0 ** rng.uniform(-6, 0), random_unit_vector(rng, n))
        worst = max(worst, tr.ratio)
    assert worst <= 1.0
