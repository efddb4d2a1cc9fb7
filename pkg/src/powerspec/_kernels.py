"""Kernel dispatch: compiled ``_core`` when available, numpy fallback otherwise.

Set ``POWERSPEC_PURE_PYTHON=1`` before import to force the fallback.
``SPECTRA_SIG_THREADS`` caps the worker count used by parallel kernels.
"""
import os

import numpy as np

from . import _fallback

if os.environ.get("POWERSPEC_PURE_PYTHON"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"


def num_threads():
    env = os.environ.get("SPECTRA_SIG_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def jacobi_eigh(H, tol=1e-14, max_sweeps=100, impl=None):
    return (impl or _impl).jacobi_eigh(_c(H), tol, max_sweeps)


def wasserstein_steps(xa, ca, xb, cb, p, impl=None):
    return (impl or _impl).wasserstein_steps(_c(xa), _c(ca), _c(xb), _c(cb), float(p))


def pairwise_cdf_l1(cdf, widths, impl=None):
    return (impl or _impl).pairwise_cdf_l1(_c(cdf), _c(widths), num_threads())


def pairwise_sqdist(X, impl=None):
    return (impl or _impl).pairwise_sqdist(_c(X), num_threads())


def dbscan(X, eps, min_pts, impl=None):
    return (impl or _impl).dbscan(_c(X), float(eps), int(min_pts), num_threads())
