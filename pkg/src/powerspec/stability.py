"""Perturbation harness for the W1 Lipschitz bound on power spectra.

For symmetric ``H``, ``H'`` of size ``n`` and unit ``f``, the spectra of ``f``
satisfy ``W1(mu_f^H, mu_f^H') <= n ||H - H'||_2`` whether or not ``H`` has
repeated eigenvalues. The functions here measure both sides on concrete
matrices, and provide the first-order eigenprojection formulas used in the
argument as checkable closed forms.
"""
import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidPermutation,
    TheoremViolation,
    ValidationError,
)
from .graph import indicator
from .measures import wasserstein
from .signatures import heat_kernel_signature, power_spectrum, signature_distance_matrix
from .spectral import check_symmetric, decompose, operator_two_norm, projection, spectral_gap

VIOLATION_RTOL = 1e-9
TRIAL_FIELDS = ("dim", "t", "delta_norm", "w1", "bound", "ratio", "seed")


@dataclass(frozen=True, eq=False)
class PerturbationTrial:
    H: np.ndarray
    Delta: np.ndarray
    t: float
    f: np.ndarray
    w1: float
    bound: float
    ratio: float
    delta_norm: float
    seed: int = -1
    kind: str = ""

    @property
    def dim(self):
        return self.H.shape[0]

    @property
    def violated(self):
        return self.ratio > 1.0 + VIOLATION_RTOL

    def row(self):
        return {
            "dim": self.dim,
            "t": self.t,
            "delta_norm": self.delta_norm,
            "w1": self.w1,
            "bound": self.bound,
            "ratio": self.ratio,
            "seed": self.seed,
        }


def lipschitz_trial(H, Delta, t, f, seed=-1, kind=""):
    """Measure ``W1`` between the spectra of ``f`` under ``H`` and ``H + t Delta``."""
    H = check_symmetric(H)
    Delta = check_symmetric(Delta)
    if H.shape != Delta.shape:
        raise DimensionMismatch(f"H is {H.shape}, Delta is {Delta.shape}")
    f = np.asarray(f, dtype=float)
    if abs(np.linalg.norm(f) - 1.0) > 1e-12:
        raise ValidationError("trial function must have unit norm")
    n = H.shape[0]
    mu0 = power_spectrum(decompose(H), f).measure
    mu1 = power_spectrum(decompose(H + t * Delta), f).measure
    w1 = wasserstein(mu0, mu1, 1.0)
    delta_norm = operator_two_norm(Delta)
    bound = n * abs(t) * delta_norm
    if bound > 0:
        ratio = w1 / bound
    else:
        ratio = 0.0 if w1 == 0 else np.inf
    return PerturbationTrial(H, Delta, float(t), f, w1, bound, ratio, delta_norm, seed, kind)


def degenerate_stress_trial(base, Delta, t, f=None, seed=-1):
    """Lipschitz trial on a base matrix that has a repeated eigenvalue."""
    d = decompose(base)
    if np.all(d.multiplicities < 2):
        raise ValidationError("base matrix has no degenerate eigenvalue")
    if f is None:
        f = indicator(0, d.n)
    return lipschitz_trial(base, Delta, t, f, seed=seed, kind="degenerate")


def reduced_resolvent(d, h):
    """``sum_{k != h} P_k / (lambda_k - lambda_h)``."""
    if not 0 <= h < d.m:
        raise IndexOutOfRange(f"group {h} outside 0..{d.m - 1}")
    lam = d.distinct_eigenvalues
    S = np.zeros((d.n, d.n))
    for k in range(d.m):
        if k != h:
            S += projection(d, k) / (lam[k] - lam[h])
    return S


def first_order_projection(d, Delta, k):
    """First-order change of the projection onto the lowest ``k`` eigenspaces.

    Closed form ``sum_{h < k <= j} (P_h D P_j + P_j D P_h) / (lambda_h - lambda_j)``
    (0-based groups), evaluated in the eigenbasis.
    """
    if not 1 <= k < d.m:
        raise IndexOutOfRange(f"k must lie in 1..{d.m - 1}, got {k}")
    Delta = check_symmetric(Delta)
    Q = d.eigenvectors
    group = d.group_of_column()
    lam = d.distinct_eigenvalues[group]
    low = group < k
    C = np.zeros((d.n, d.n))
    diff = lam[low][:, None] - lam[~low][None, :]
    C[np.ix_(low, ~low)] = 1.0 / diff
    C = C + C.T
    return Q @ (C * (Q.T @ Delta @ Q)) @ Q.T


def first_order_projection_sum(d, Delta, k):
    """Same quantity as ``first_order_projection``, summed group by group.

    Uses ``-(P_h D S_h + S_h D P_h)`` for each of the lowest ``k`` groups with
    explicit projection and reduced-resolvent matrices.
    """
    if not 1 <= k < d.m:
        raise IndexOutOfRange(f"k must lie in 1..{d.m - 1}, got {k}")
    Delta = check_symmetric(Delta)
    total = np.zeros((d.n, d.n))
    for h in range(k):
        P = projection(d, h)
        S = reduced_resolvent(d, h)
        total -= P @ Delta @ S + S @ Delta @ P
    return total


def lowest_projection(H, r):
    """Projection onto the span of the ``r`` lowest eigenvectors of ``H``."""
    _, V = np.linalg.eigh(check_symmetric(H))
    Vr = V[:, :r]
    return Vr @ Vr.T


def projection_difference_quotient(d, H, Delta, k, t, central=True):
    """Finite-difference derivative of the lowest-``k``-groups projection along ``Delta``.

    Only meaningful while ``t ||Delta||_2 < gamma(H) / 2`` so the perturbed
    groups do not cross.
    """
    r = int(d.group_offsets[k])
    if central:
        return (lowest_projection(H + t * Delta, r) - lowest_projection(H - t * Delta, r)) / (2 * t)
    P0 = d.eigenvectors[:, :r] @ d.eigenvectors[:, :r].T
    return (lowest_projection(H + t * Delta, r) - P0) / t


def convergence_radius(d, Delta):
    return spectral_gap(d) / (2.0 * operator_two_norm(Delta))


def hks_stability_check(L, L_prime, x, t):
    """``(|hks_L(x,t) - hks_L'(x,t)|, t n ||L - L'||_2)``."""
    L = check_symmetric(L)
    L_prime = check_symmetric(L_prime)
    if L.shape != L_prime.shape:
        raise DimensionMismatch(f"{L.shape} vs {L_prime.shape}")
    if not t > 0:
        raise ValidationError("t must be positive")
    lhs = abs(heat_kernel_signature(decompose(L), x, t) - heat_kernel_signature(decompose(L_prime), x, t))
    rhs = t * L.shape[0] * operator_two_norm(L - L_prime)
    return lhs, rhs


def permute_matrix(H, sigma):
    """``(P_sigma^T H P_sigma)_{ij} = H_{sigma(i) sigma(j)}``."""
    sigma = np.asarray(sigma)
    return H[np.ix_(sigma, sigma)]


def check_permutation(sigma, n):
    sigma = np.asarray(sigma)
    if sigma.shape != (n,) or not np.array_equal(np.sort(sigma), np.arange(n)):
        raise InvalidPermutation(f"not a permutation of 0..{n - 1}")
    return sigma.astype(np.int64)


def approximate_symmetry_bound(d, sigma, H, check=True):
    """Per-vertex ``W1(mu_i, mu_sigma(i))`` against ``n ||H - P^T H P||_2``."""
    H = check_symmetric(H)
    sigma = check_permutation(sigma, H.shape[0])
    D = signature_distance_matrix(d).dist
    lhs = D[np.arange(len(sigma)), sigma]
    rhs = H.shape[0] * operator_two_norm(H - permute_matrix(H, sigma))
    if check and lhs.max(initial=0.0) > rhs + 1e-9:
        raise TheoremViolation(f"max W1 {lhs.max():.3e} exceeds bound {rhs:.3e}")
    return lhs, rhs


# randomized ensembles


def random_symmetric(rng, n):
    G = rng.standard_normal((n, n))
    return (G + G.T) / np.sqrt(2.0)


def random_orthogonal(rng, n):
    Z = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return Q * np.sign(np.diag(R))


def random_unit_vector(rng, n):
    f = rng.standard_normal(n)
    return f / np.linalg.norm(f)


def degenerate_matrix(rng, n, gap=0.0):
    """Random orthogonal conjugate of a diagonal with a repeated eigenvalue.

    With ``gap > 0`` the repeated copies are split by ``gap`` instead.
    """
    n_distinct = max(1, rng.integers(1, max(2, n // 2) + 1))
    values = np.sort(rng.standard_normal(n_distinct))
    counts = rng.multinomial(n - n_distinct, np.ones(n_distinct) / n_distinct) + 1
    if counts.max() < 2 and n >= 2:
        counts[0] += 1
        counts[-1] -= 1
        if counts[-1] == 0:
            counts, values = counts[:-1], values[:-1]
    lam = np.concatenate([v + gap * np.arange(c) for v, c in zip(values, counts)])
    Q = random_orthogonal(rng, n)
    H = (Q * lam) @ Q.T
    return 0.5 * (H + H.T)


ENSEMBLE_KINDS = ("goe", "degenerate", "near_degenerate")


def random_trial(seed, dims=(2, 16), t_range=(1e-6, 1.0), kind="goe"):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(dims[0], dims[1] + 1))
    if kind == "goe":
        H = random_symmetric(rng, n)
    elif kind == "degenerate":
        H = degenerate_matrix(rng, n)
    elif kind == "near_degenerate":
        gap = 1e-12 if rng.random() < 0.5 else 10.0 ** rng.uniform(-12, -2)
        H = degenerate_matrix(rng, n, gap=gap)
    else:
        raise ValidationError(f"unknown trial kind {kind!r}")
    Delta = random_symmetric(rng, n)
    lo, hi = np.log10(t_range[0]), np.log10(t_range[1])
    t = 10.0 ** rng.uniform(lo, hi)
    f = random_unit_vector(rng, n)
    return lipschitz_trial(H, Delta, t, f, seed=int(seed), kind=kind)


def trial_seeds(base_seed, trials):
    children = np.random.SeedSequence(base_seed).spawn(trials)
    return [int(c.generate_state(1, dtype=np.uint64)[0] >> 1) for c in children]


def run_ensemble(trials, seed=0, dims=(2, 16), t_range=(1e-6, 1.0), kinds=ENSEMBLE_KINDS, workers=None):
    """Independent randomized Lipschitz trials; trial ``i`` uses kind ``kinds[i % len(kinds)]``."""
    seeds = trial_seeds(seed, trials)
    jobs = [(s, kinds[i % len(kinds)]) for i, s in enumerate(seeds)]

    def run(job):
        return random_trial(job[0], dims=dims, t_range=t_range, kind=job[1])

    workers = workers or _kernels.num_threads()
    if workers == 1 or trials < 64:
        return [run(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, jobs, chunksize=64))


def summarize(trials):
    ratios = np.array([tr.ratio for tr in trials])
    return {
        "trials": len(trials),
        "max_ratio": float(ratios.max(initial=0.0)),
        "mean_ratio": float(ratios.mean()) if len(ratios) else 0.0,
        "violations": int(sum(tr.violated for tr in trials)),
    }


def convergence_sequence(H, Delta, f, ks):
    """``(k, W1(mu^{H + Delta/k}, mu^H), n ||Delta||_2 / k)`` for each ``k``."""
    out = []
    for k in ks:
        tr = lipschitz_trial(H, Delta, 1.0 / k, f)
        out.append((k, tr.w1, tr.bound))
    return out


def write_trials_csv(trials, path, header=None):
    with open(path, "w", newline="") as fh:
        if header:
            fh.write(f"# {header}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRIAL_FIELDS)
        for tr in trials:
            r = tr.row()
            writer.writerow([r["dim"], repr(r["t"]), repr(r["delta_norm"]), repr(r["w1"]),
                             repr(r["bound"]), repr(r["ratio"]), r["seed"]])


def read_trials_csv(path):
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.DictReader(lines))
    out = []
    for r in rows:
        out.append({
            "dim": int(r["dim"]),
            "t": float(r["t"]),
            "delta_norm": float(r["delta_norm"]),
            "w1": float(r["w1"]),
            "bound": float(r["bound"]),
            "ratio": float(r["ratio"]),
            "seed": int(r["seed"]),
        })
    return out


def write_summary_json(summary, path):
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
