"""Weighted undirected graphs, normalized Laplacians and vertex indicators."""
from dataclasses import dataclass, field

import numpy as np

from .errors import IndexOutOfRange, InvalidGraph, IsolatedVertex


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1`` with positive weights.

    ``edges`` holds ``(i, j, w)`` triples; each unordered pair appears once.
    """

    n: int
    edges: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.n < 0:
            raise InvalidGraph(f"vertex count must be nonnegative, got {self.n}")
        seen = set()
        canon = []
        for e in self.edges:
            if len(e) == 2:
                i, j, w = e[0], e[1], 1.0
            else:
                i, j, w = e
            i, j, w = int(i), int(j), float(w)
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InvalidGraph(f"edge ({i}, {j}) outside 0..{self.n - 1}")
            if i == j:
                raise InvalidGraph(f"self-loop at vertex {i}")
            if not w > 0 or not np.isfinite(w):
                raise InvalidGraph(f"edge ({i}, {j}) has non-positive weight {w}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise InvalidGraph(f"duplicate edge {key}")
            seen.add(key)
            canon.append((i, j, w))
        object.__setattr__(self, "edges", tuple(canon))

    @classmethod
    def from_adjacency(cls, A, tol=0.0):
        A = np.asarray(A, dtype=float)
        iu, ju = np.nonzero(np.triu(A, 1) > tol)
        return cls(A.shape[0], tuple((int(i), int(j), float(A[i, j])) for i, j in zip(iu, ju)))

    def permuted(self, sigma):
        """Relabel vertex ``v`` as ``sigma[v]``."""
        sigma = np.asarray(sigma)
        return Graph(self.n, tuple((int(sigma[i]), int(sigma[j]), w) for i, j, w in self.edges))


def cycle_graph(n):
    return Graph(n, tuple((i, (i + 1) % n, 1.0) for i in range(n)))


def path_graph(n):
    return Graph(n, tuple((i, i + 1, 1.0) for i in range(n - 1)))


def adjacency_matrix(g):
    A = np.zeros((g.n, g.n))
    for i, j, w in g.edges:
        A[i, j] = A[j, i] = w
    return A


def degrees(g):
    return adjacency_matrix(g).sum(axis=1)


def normalized_laplacian(g):
    """``I - D^{-1/2} A D^{-1/2}``; raises ``IsolatedVertex`` on zero degree."""
    A = adjacency_matrix(g)
    deg = A.sum(axis=1)
    zero = np.flatnonzero(deg <= 0)
    if zero.size:
        raise IsolatedVertex(int(zero[0]))
    s = 1.0 / np.sqrt(deg)
    L = -(s[:, None] * A * s[None, :])
    L[np.diag_indices_from(L)] = 1.0
    return 0.5 * (L + L.T)


def indicator(x, n):
    if not 0 <= x < n:
        raise IndexOutOfRange(f"vertex {x} outside 0..{n - 1}")
    f = np.zeros(n)
    f[x] = 1.0
    return f


def pair_indicator(x, y, n):
    """Unit-norm ``(delta_x + delta_y)/sqrt(2)``; reduces to ``indicator(x)`` when x == y."""
    if x == y:
        return indicator(x, n)
    f = indicator(x, n) + indicator(y, n)
    return f / np.sqrt(2.0)


def read_edge_list(path):
    """Parse ``i j [w]`` lines with ``#`` comments and an optional ``n <count>`` header."""
    n = None
    edges = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "n":
                if len(parts) != 2:
                    raise InvalidGraph(f"{path}:{lineno}: bad header {raw.strip()!r}")
                n = int(parts[1])
                continue
            if len(parts) not in (2, 3):
                raise InvalidGraph(f"{path}:{lineno}: expected 'i j [w]', got {raw.strip()!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError as exc:
                raise InvalidGraph(f"{path}:{lineno}: {exc}") from None
            edges.append((i, j, w))
    if n is None:
        n = 1 + max((max(i, j) for i, j, _ in edges), default=-1)
    return Graph(n, tuple(edges))


def write_edge_list(g, path, header=None):
    with open(path, "w") as fh:
        if header:
            fh.write(f"# {header}\n")
        fh.write(f"n {g.n}\n")
        for i, j, w in g.edges:
            fh.write(f"{i} {j} {w!r}\n")
