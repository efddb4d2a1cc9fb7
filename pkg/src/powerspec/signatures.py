"""Power spectrum signatures and the point signatures expressible through them.

The power spectrum of a unit vertex function ``f`` with respect to a symmetric
operator puts mass ``<f, P_lambda f>`` on each distinct eigenvalue ``lambda``.
Heat kernel, wavelet and diffusion-distance signatures are expectations under
that measure; the global point signature is included for comparison but,
unlike the others, depends on eigenvector signs.
"""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    MissingPair,
    SameVertex,
    ZeroFunction,
)
from .graph import indicator, pair_indicator
from .measures import DiscreteMeasure, expectation, make_probability_measure, mean

MASS_FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class PowerSpectrum:
    measure: DiscreteMeasure
    source: object
    f_norm: float = 1.0

    @property
    def atoms(self):
        return self.measure.atoms

    @property
    def masses(self):
        return self.measure.masses


@dataclass(frozen=True, eq=False)
class SignatureMatrix:
    n: int
    dist: np.ndarray


def _check_vertex(d, x):
    if not 0 <= x < d.n:
        raise IndexOutOfRange(f"vertex {x} outside 0..{d.n - 1}")


def _spectrum_from_group_masses(d, w, f_norm):
    keep = w >= MASS_FLOOR
    measure = make_probability_measure(d.distinct_eigenvalues[keep], w[keep])
    return PowerSpectrum(measure, d, f_norm)


def group_masses(d, f):
    """Squared norm of the projection of unit ``f`` onto each eigenspace."""
    coeff = d.eigenvectors.T @ f
    return np.add.reduceat(coeff * coeff, d.group_offsets[:-1])


def power_spectrum(d, f):
    f = np.asarray(f, dtype=float)
    if f.shape != (d.n,):
        raise DimensionMismatch(f"function of shape {f.shape} on an operator of size {d.n}")
    norm = float(np.linalg.norm(f))
    if norm == 0.0:
        raise ZeroFunction("power spectrum of the zero function is undefined")
    return _spectrum_from_group_masses(d, group_masses(d, f / norm), norm)


def vertex_mass_matrix(d):
    """Row ``x`` holds the masses of the spectrum of ``delta_x`` over all distinct eigenvalues."""
    Q = d.eigenvectors
    return np.add.reduceat(Q * Q, d.group_offsets[:-1], axis=1)


def vertex_spectrum(d, x):
    _check_vertex(d, x)
    return power_spectrum(d, indicator(x, d.n))


def vertex_spectra(d):
    M = vertex_mass_matrix(d)
    return [_spectrum_from_group_masses(d, row, 1.0) for row in M]


def pair_spectra(d):
    """Spectra of every pair indicator, keyed by ``(x, y)`` with ``x <= y``."""
    out = {}
    for x in range(d.n):
        for y in range(x, d.n):
            out[(x, y)] = power_spectrum(d, pair_indicator(x, y, d.n))
    return out


def _lookup(spectra, x, y):
    for key in ((x, y), (y, x), frozenset((x, y)) if x != y else frozenset((x,))):
        if key in spectra:
            s = spectra[key]
            return s.measure if isinstance(s, PowerSpectrum) else s
    raise MissingPair(f"no spectrum for pair ({x}, {y})")


def reconstruct_matrix(spectra, n=None):
    """Recover the operator from first moments of its pair-indicator spectra.

    ``spectra`` maps ``(x, y)`` (either order) to a ``PowerSpectrum`` or a
    ``DiscreteMeasure``. The diagonal is the mean of the spectrum of
    ``delta_x``; off-diagonal entries subtract half the two diagonal means from
    the mean of the spectrum of ``(delta_x + delta_y)/sqrt(2)``.
    """
    if n is None:
        keys = [k for k in spectra if isinstance(k, tuple)]
        n = 1 + max((max(k) for k in keys), default=-1)
    diag = np.array([mean(_lookup(spectra, x, x)) for x in range(n)])
    H = np.diag(diag)
    for x in range(n):
        for y in range(x + 1, n):
            H[x, y] = H[y, x] = mean(_lookup(spectra, x, y)) - 0.5 * (diag[x] + diag[y])
    return H


def heat_kernel_signature(d, x, t):
    return expectation(vertex_spectrum(d, x).measure, lambda s: np.exp(-s * t))


def heat_kernel(d, x, y, t):
    """``k_t(x, y) = sum_i exp(-lambda_i t) phi_i(x) phi_i(y)``."""
    _check_vertex(d, x)
    _check_vertex(d, y)
    Q = d.eigenvectors
    return float(np.sum(np.exp(-d.eigenvalues * t) * Q[x] * Q[y]))


def wavelet_signature(d, x, g, t):
    return expectation(vertex_spectrum(d, x).measure, lambda s: g(t * s))


def diffusion_distance_sq(d, x, y, t):
    """Squared diffusion distance ``sum_i exp(-lambda_i t) (phi_i(x) - phi_i(y))^2``."""
    if x == y:
        raise SameVertex("diffusion distance needs two distinct vertices")
    _check_vertex(d, x)
    _check_vertex(d, y)
    f = indicator(x, d.n) - indicator(y, d.n)
    ps = power_spectrum(d, f)
    return ps.f_norm**2 * expectation(ps.measure, lambda s: np.exp(-s * t))


def global_point_signature(d, x):
    """``phi_i(x) / sqrt(lambda_i)`` over eigenvalues above the grouping tolerance.

    Defined only up to the sign of each eigenvector.
    """
    _check_vertex(d, x)
    keep = d.eigenvalues > d.group_tol
    return d.eigenvectors[x, keep] / np.sqrt(d.eigenvalues[keep])


def vertex_cdf_matrix(d):
    return np.cumsum(vertex_mass_matrix(d), axis=1)


def signature_distance_matrix(d):
    """All-pairs W1 between vertex spectra.

    All vertex spectra share the distinct eigenvalues as support, so W1 is the
    gap-weighted L1 distance between rows of the CDF matrix.
    """
    F = vertex_cdf_matrix(d)[:, :-1]
    widths = np.diff(d.distinct_eigenvalues)
    if F.shape[1] == 0:
        return SignatureMatrix(d.n, np.zeros((d.n, d.n)))
    D = _kernels.pairwise_cdf_l1(F, widths)
    return SignatureMatrix(d.n, D)


def spectra_to_records(spectra):
    return [{"vertex": i, "spectrum": s.measure.to_records()} for i, s in enumerate(spectra)]
