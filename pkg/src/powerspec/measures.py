"""Finitely supported measures on the real line and 1-D Wasserstein distances."""
import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    LengthMismatch,
    MassMismatch,
    NegativeMass,
    NotProbability,
    OutOfDomain,
    ValidationError,
)

MASS_SUM_TOL = 1e-9
NEGATIVE_MASS_TOL = 1e-12
MERGE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Measure ``sum_i masses[i] * delta(atoms[i])`` with strictly increasing atoms."""

    atoms: np.ndarray
    masses: np.ndarray
    probability: bool = False

    def __len__(self):
        return len(self.atoms)

    @property
    def cumulative(self):
        """Cumulative masses; for probability measures the last entry is exactly 1."""
        c = np.cumsum(self.masses)
        if self.probability and len(c):
            c = np.minimum(c, 1.0)
            c[-1] = 1.0
        return c

    def shifted(self, c):
        return DiscreteMeasure(self.atoms + c, self.masses, self.probability)

    def to_json(self):
        return {"atoms": self.atoms.tolist(), "masses": self.masses.tolist()}

    def to_records(self):
        return [{"atom": float(a), "mass": float(w)} for a, w in zip(self.atoms, self.masses)]

    def allclose(self, other, atol=1e-12):
        return (
            len(self) == len(other)
            and np.allclose(self.atoms, other.atoms, rtol=0, atol=atol)
            and np.allclose(self.masses, other.masses, rtol=0, atol=atol)
        )


@dataclass(frozen=True, eq=False)
class QuantileVector:
    """Quantile function sampled on the midpoint grid ``(i + 1/2) / m``."""

    values: np.ndarray

    @property
    def m(self):
        return len(self.values)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def _merge(atoms, masses):
    order = np.argsort(atoms, kind="stable")
    atoms = atoms[order]
    masses = masses[order]
    if len(atoms) < 2:
        return atoms, masses
    tol = MERGE_RTOL * max(1.0, float(atoms[-1] - atoms[0]))
    starts = np.concatenate([[0], np.flatnonzero(np.diff(atoms) > tol) + 1])
    merged_masses = np.add.reduceat(masses, starts)
    return atoms[starts], merged_masses


def make_measure(atoms, masses):
    """Signed measure in canonical form (sorted, duplicate atoms merged)."""
    atoms = np.asarray(atoms, dtype=float).ravel()
    masses = np.asarray(masses, dtype=float).ravel()
    if atoms.shape != masses.shape:
        raise LengthMismatch(f"{len(atoms)} atoms but {len(masses)} masses")
    a, w = _merge(atoms, masses)
    return DiscreteMeasure(a, w, probability=False)


def make_probability_measure(atoms, masses):
    """Canonical probability measure: sort, merge, clamp round-off negatives, renormalize."""
    atoms = np.asarray(atoms, dtype=float).ravel()
    masses = np.asarray(masses, dtype=float).ravel()
    if atoms.shape != masses.shape:
        raise LengthMismatch(f"{len(atoms)} atoms but {len(masses)} masses")
    if len(atoms) == 0:
        raise MassMismatch("empty measure has total mass 0")
    if not (np.all(np.isfinite(atoms)) and np.all(np.isfinite(masses))):
        raise ValidationError("non-finite atom or mass")
    if np.any(masses < -NEGATIVE_MASS_TOL):
        raise NegativeMass(f"mass {masses.min():.3e} below -{NEGATIVE_MASS_TOL}")
    total = masses.sum()
    if abs(total - 1.0) > MASS_SUM_TOL:
        raise MassMismatch(f"masses sum to {total!r}, expected 1")
    masses = np.clip(masses, 0.0, None)
    a, w = _merge(atoms, masses)
    keep = w > 0
    a, w = a[keep], w[keep]
    return DiscreteMeasure(a, w / w.sum(), probability=True)


def point_mass(a):
    return DiscreteMeasure(np.array([float(a)]), np.array([1.0]), probability=True)


def _require_probability(*mus):
    for mu in mus:
        if not mu.probability:
            raise NotProbability("operation needs a probability measure")


def cdf(mu, x):
    """Right-continuous distribution function; vectorized over ``x``."""
    c = np.concatenate([[0.0], mu.cumulative])
    idx = np.searchsorted(mu.atoms, x, side="right")
    out = c[idx]
    return float(out) if np.ndim(out) == 0 else out


def quantile(mu, t):
    """Generalized inverse ``inf{x : F(x) >= t}`` for ``t`` in (0, 1]."""
    _require_probability(mu)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0) or np.any(t_arr > 1) or np.any(np.isnan(t_arr)):
        raise OutOfDomain("quantile level must lie in (0, 1]")
    idx = np.searchsorted(mu.cumulative, t_arr, side="left")
    out = mu.atoms[idx]
    return float(out) if np.ndim(out) == 0 else out


def midpoint_grid(m):
    return (np.arange(m) + 0.5) / m


def sample_quantiles(mu, m):
    if m < 1:
        raise ValidationError("need at least one quantile")
    return QuantileVector(quantile(mu, midpoint_grid(m)))


def wasserstein(mu, nu, p=1.0):
    """Exact p-Wasserstein distance via a merge of the two quantile step functions."""
    _require_probability(mu, nu)
    if p < 1:
        raise ValidationError(f"p must be >= 1, got {p}")
    integral = _kernels.wasserstein_steps(mu.atoms, mu.cumulative, nu.atoms, nu.cumulative, p)
    return integral if p == 1 else integral ** (1.0 / p)


def wasserstein_from_quantiles(a, b, p=1.0):
    """Mean-power distance between quantile vectors; converges to ``wasserstein`` as m grows."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"quantile vectors of lengths {a.size} and {b.size}")
    if p < 1:
        raise ValidationError(f"p must be >= 1, got {p}")
    return float(np.mean(np.abs(a - b) ** p) ** (1.0 / p))


def expectation(mu, g):
    """``sum_i masses[i] * g(atoms[i])``."""
    try:
        vals = np.asarray(g(mu.atoms), dtype=float)
        if vals.shape != mu.atoms.shape:
            raise ValueError
    except (TypeError, ValueError):
        vals = np.array([g(a) for a in mu.atoms], dtype=float)
    return float(np.dot(mu.masses, vals))


def mean(mu):
    return float(np.dot(mu.masses, mu.atoms))


def measure_from_json(obj, probability=True):
    build = make_probability_measure if probability else make_measure
    return build(obj["atoms"], obj["masses"])


def write_measure_json(mu, path):
    with open(path, "w") as fh:
        json.dump(mu.to_json(), fh)
        fh.write("\n")


def read_measure_json(path, probability=True):
    with open(path) as fh:
        return measure_from_json(json.load(fh), probability)


def write_measure_csv(mu, path):
    with open(path, "w") as fh:
        fh.write("atom,mass\n")
        for a, w in zip(mu.atoms, mu.masses):
            fh.write(f"{float(a)!r},{float(w)!r}\n")


def read_measure_csv(path, probability=True):
    data = np.loadtxt(path, delimiter=",", comments="#", skiprows=1, ndmin=2)
    build = make_probability_measure if probability else make_measure
    return build(data[:, 0], data[:, 1])
