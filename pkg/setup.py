"""Build the optional compiled kernels.

The package imports and runs without them; ``powerspec._kernels`` falls back
to numpy implementations when ``powerspec._core`` is missing.
"""
import os
import sys

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install
    cythonize = None


def _openmp_flags():
    if os.environ.get("POWERSPEC_NO_OPENMP") or sys.platform == "darwin":
        return [], []
    return ["-fopenmp"], ["-fopenmp"]


ext_modules = []
if cythonize is not None and not os.environ.get("POWERSPEC_PURE_PYTHON"):
    compile_args, link_args = _openmp_flags()
    ext_modules = cythonize(
        [
            Extension(
                "powerspec._core",
                ["src/powerspec/_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"] + compile_args,
                extra_link_args=link_args,
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
