import numpy as np
import pytest

from powerspec import _fallback, _kernels


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


def _impls():
    out = [pytest.param(_fallback, id="python")]
    if _kernels.BACKEND == "cython":
        from powerspec import _core

        out.append(pytest.param(_core, id="cython"))
    return out


@pytest.fixture(params=_impls())
def impl(request, monkeypatch):
    """Run a test once per kernel backend."""
    monkeypatch.setattr(_kernels, "_impl", request.param)
    return request.param
