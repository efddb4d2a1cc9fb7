"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py --n 1000 --repeat 3
"""
import argparse
import timeit

import numpy as np

from powerspec import _fallback, _kernels
from powerspec.diffusion import sample_torus


def cases(n, rng):
    X = sample_torus(n, seed=0).points
    F = np.cumsum(rng.dirichlet(np.ones(80), size=n), axis=1)[:, :-1]
    widths = rng.uniform(0.001, 0.02, size=79)
    H = rng.standard_normal((60, 60))
    H = H + H.T
    xa, xb = np.sort(rng.normal(size=400)), np.sort(rng.normal(size=400))
    ca = np.cumsum(rng.dirichlet(np.ones(400)))
    cb = np.cumsum(rng.dirichlet(np.ones(400)))
    ca[-1] = cb[-1] = 1.0
    return {
        "pairwise_sqdist": lambda impl: _kernels.pairwise_sqdist(X, impl=impl),
        "pairwise_cdf_l1": lambda impl: _kernels.pairwise_cdf_l1(F, widths, impl=impl),
        "dbscan": lambda impl: _kernels.dbscan(X, 0.1, 10, impl=impl),
        "jacobi_eigh (60x60)": lambda impl: _kernels.jacobi_eigh(H, impl=impl),
        "wasserstein_steps x200": lambda impl: [
            _kernels.wasserstein_steps(xa, ca, xb, cb, 1.0, impl=impl) for _ in range(200)
        ],
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--n", type=int, default=1000, help="points for the pairwise kernels (default 1000)")
    parser.add_argument("--repeat", type=int, default=3, help="best of this many runs (default 3)")
    args = parser.parse_args()

    try:
        from powerspec import _core
    except ImportError:
        _core = None
    rng = np.random.default_rng(0)
    print(f"threads: {_kernels.num_threads()}  n: {args.n}")
    print(f"{'kernel':<26}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for name, fn in cases(args.n, rng).items():
        t_py = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=args.repeat))
        if _core is None:
            print(f"{name:<26}{t_py:>12.4f}{'n/a':>12}{'':>10}")
            continue
        t_c = min(timeit.repeat(lambda: fn(_core), number=1, repeat=args.repeat))
        print(f"{name:<26}{t_py:>12.4f}{t_c:>12.4f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
